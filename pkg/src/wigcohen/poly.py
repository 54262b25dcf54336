"""Sparse commutative polynomials with complex coefficients.

``Poly`` is used in two roles: as the bivariate kernel polynomials
P(xi, eta) and q(xi, eta) (``nvars == 2``), and as operator symbols in
(x, y, xi, eta) (``nvars == 4``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

Exponent = tuple[int, ...]


def _clean(terms: Mapping[Exponent, complex]) -> dict[Exponent, complex]:
    return {e: complex(c) for e, c in terms.items() if c != 0}


@dataclass(frozen=True)
class Poly:
    """Immutable sparse polynomial; ``terms`` maps exponent tuples to coefficients."""

    nvars: int
    terms: Mapping[Exponent, complex] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = _clean(self.terms)
        for e in cleaned:
            if len(e) != self.nvars or any(k < 0 for k in e):
                raise ValueError(f"bad exponent {e} for {self.nvars} variables")
        object.__setattr__(self, "terms", cleaned)

    # construction -------------------------------------------------------
    @classmethod
    def const(cls, c: complex, nvars: int = 2) -> "Poly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, i: int, nvars: int = 2) -> "Poly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1.0})

    # predicates -----------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_real(self) -> bool:
        return all(c.imag == 0 for c in self.terms.values())

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and dict(self.terms) == dict(other.terms)

    def __hash__(self):
        return hash((self.nvars, tuple(sorted(self.terms.items(), key=lambda t: t[0]))))

    # arithmetic ------------------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            return other
        return Poly.const(other, self.nvars)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Poly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict[Exponent, complex] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = Poly.const(1.0, self.nvars)
        for _ in range(n):
            out = out * self
        return out

    # calculus ----------------------------------------------------------------
    def diff(self, i: int) -> "Poly":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return Poly(self.nvars, out)

    def integrate(self, i: int) -> "Poly":
        """Antiderivative in variable ``i`` vanishing at 0."""
        out = {}
        for e, c in self.terms.items():
            ne = list(e)
            ne[i] += 1
            out[tuple(ne)] = c / ne[i]
        return Poly(self.nvars, out)

    def __call__(self, *args):
        """Evaluate; arguments may be scalars or broadcastable arrays."""
        if len(args) != self.nvars:
            raise TypeError(f"expected {self.nvars} arguments")
        args = [np.asarray(a) for a in args]
        total = np.zeros(np.broadcast(*args).shape, dtype=complex) if args else 0j
        for e, c in self.terms.items():
            term = c
            for a, k in zip(args, e):
                if k:
                    term = term * a**k
            total = total + term
        return total

    def compose(self, subs: Iterable) -> object:
        """Substitute values supporting + and * (numbers, Poly, WeylOp...).

        Only valid when the substituted values commute with each other.
        """
        subs = list(subs)
        out = None
        for e, c in self.terms.items():
            term = None
            for s, k in zip(subs, e):
                for _ in range(k):
                    term = s if term is None else term * s
            term = c if term is None else term * c
            out = term if out is None else out + term
        return out

    # serialization -------------------------------------------------------------
    def to_json(self, names: tuple[str, ...] = ("i", "j")) -> list[dict]:
        rows = []
        for e in sorted(self.terms):
            c = self.terms[e]
            row = {n: k for n, k in zip(names, e)}
            row["re"] = c.real
            row["im"] = c.imag
            rows.append(row)
        return rows

    @classmethod
    def from_json(cls, rows: list[dict], names: tuple[str, ...] = ("i", "j")) -> "Poly":
        terms: dict[Exponent, complex] = {}
        for row in rows:
            e = tuple(int(row[n]) for n in names)
            terms[e] = terms.get(e, 0) + complex(row["re"], row["im"])
        return cls(len(names), terms)


def Poly2(terms: Mapping[Exponent, complex] | None = None) -> Poly:
    """Bivariate polynomial in (xi, eta)."""
    return Poly(2, terms or {})


XI = Poly.var(0, 2)
ETA = Poly.var(1, 2)
