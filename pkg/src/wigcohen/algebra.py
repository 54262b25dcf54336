"""Weyl algebra in the generators M1, M2, D1, D2 and the operator transforms.

Monomials are kept in normal order ``M1^m M2^n D1^h D2^k`` with the
convention D = -i d/dx, so that ``[D1, M1] = [D2, M2] = -i`` and every other
pair of generators commutes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, factorial
from typing import Mapping

import numpy as np

from .poly import Poly

Key = tuple[int, int, int, int]


@lru_cache(maxsize=None)
def _reorder(h: int, m: int) -> tuple[tuple[int, complex], ...]:
    """Coefficients of D^h M^m = sum_j c_j M^(m-j) D^(h-j)."""
    out = []
    for j in range(min(h, m) + 1):
        c = comb(h, j) * (factorial(m) // factorial(m - j)) * (-1j) ** j
        out.append((j, complex(c)))
    return tuple(out)


@dataclass(frozen=True)
class WeylOp:
    """Normal-ordered noncommutative polynomial in M1, M2, D1, D2."""

    terms: Mapping[Key, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for k, c in self.terms.items():
            k = tuple(int(v) for v in k)
            if len(k) != 4 or any(v < 0 for v in k):
                raise ValueError(f"bad exponent quadruple {k}")
            c = complex(c)
            if c != 0:
                clean[k] = clean.get(k, 0) + c
        object.__setattr__(self, "terms", {k: c for k, c in clean.items() if c != 0})

    # constructors ------------------------------------------------------
    @classmethod
    def identity(cls, c: complex = 1.0) -> "WeylOp":
        return cls({(0, 0, 0, 0): c})

    @classmethod
    def zero(cls) -> "WeylOp":
        return cls({})

    @classmethod
    def monomial(cls, m=0, n=0, h=0, k=0, c: complex = 1.0) -> "WeylOp":
        return cls({(m, n, h, k): c})

    # queries -----------------------------------------------------------
    @property
    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=0)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, WeylOp):
            return NotImplemented
        return dict(self.terms) == dict(other.terms)

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items(), key=lambda t: t[0])))

    def close_to(self, other: "WeylOp", tol: float = 1e-12) -> bool:
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.terms.get(k, 0) - other.terms.get(k, 0)) <= tol for k in keys)

    # arithmetic ----------------------------------------------------------
    def _coerce(self, other) -> "WeylOp":
        if isinstance(other, WeylOp):
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return WeylOp.identity(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return WeylOp(out)

    __radd__ = __add__

    def __neg__(self):
        return WeylOp({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, WeylOp):
            return normal_mul(self, other)
        if isinstance(other, (int, float, complex, np.number)):
            return WeylOp({k: c * other for k, c in self.terms.items()})
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return WeylOp({k: c * other for k, c in self.terms.items()})
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = WeylOp.identity()
        for _ in range(n):
            out = normal_mul(out, self)
        return out

    # serialization ---------------------------------------------------------
    def to_json(self) -> list[dict]:
        return [
            {"m": k[0], "n": k[1], "h": k[2], "k": k[3],
             "re": self.terms[k].real, "im": self.terms[k].imag}
            for k in sorted(self.terms)
        ]

    @classmethod
    def from_json(cls, rows: list[dict]) -> "WeylOp":
        terms: dict[Key, complex] = {}
        for r in rows:
            key = (int(r["m"]), int(r["n"]), int(r["h"]), int(r["k"]))
            terms[key] = terms.get(key, 0) + complex(r["re"], r["im"])
        return cls(terms)

    def __repr__(self):
        from .dsl import format_op

        return f"WeylOp({format_op(self)})"


M1 = WeylOp.monomial(m=1)
M2 = WeylOp.monomial(n=1)
D1 = WeylOp.monomial(h=1)
D2 = WeylOp.monomial(k=1)
ID = WeylOp.identity()


def normal_mul(a: WeylOp, b: WeylOp) -> WeylOp:
    """Product ``a * b`` reduced to normal order."""
    out: dict[Key, complex] = {}
    for (m1, n1, h1, k1), c1 in a.terms.items():
        for (m2, n2, h2, k2), c2 in b.terms.items():
            # D1^h1 M1^m2 and D2^k1 M2^n2 are the only pairs that need reordering
            for j1, r1 in _reorder(h1, m2):
                for j2, r2 in _reorder(k1, n2):
                    key = (m1 + m2 - j1, n1 + n2 - j2, h1 + h2 - j1, k1 + k2 - j2)
                    out[key] = out.get(key, 0) + c1 * c2 * r1 * r2
    return WeylOp(out)


def substitute_ordered(B: WeylOp, x1: WeylOp, x2: WeylOp, y1: WeylOp, y2: WeylOp) -> WeylOp:
    """Replace each term c*M1^m M2^n D1^h D2^k by c * x1^m x2^n y1^h y2^k."""
    powers: dict[tuple[int, int], WeylOp] = {}

    def pw(which: int, e: int) -> WeylOp:
        key = (which, e)
        if key not in powers:
            base = (x1, x2, y1, y2)[which]
            powers[key] = WeylOp.identity() if e == 0 else normal_mul(pw(which, e - 1), base)
        return powers[key]

    out = WeylOp.zero()
    for (m, n, h, k), c in B.terms.items():
        term = normal_mul(normal_mul(pw(0, m), pw(1, n)), normal_mul(pw(2, h), pw(3, k)))
        out = out + c * term
    return out


def poly_at(p: Poly, a: WeylOp, b: WeylOp) -> WeylOp:
    """Evaluate a bivariate polynomial at a commuting operator pair (a, b)."""
    out = WeylOp.zero()
    for (i, j), c in p.terms.items():
        out = out + c * normal_mul(a**i, b**j)
    return out


@dataclass(frozen=True)
class KernelSpec:
    """Cohen kernel with Fourier transform q(xi, eta) * exp(-i P(xi, eta))."""

    P: Poly = field(default_factory=lambda: Poly(2))
    q: Poly = field(default_factory=lambda: Poly.const(1.0, 2))

    def __post_init__(self):
        if self.P.nvars != 2 or self.q.nvars != 2:
            raise ValueError("kernel polynomials must be bivariate")
        if not self.P.is_real:
            raise ValueError("phase polynomial P must have real coefficients")
        if self.q.is_zero:
            raise ValueError("q must not be the zero polynomial")

    @property
    def P1(self) -> Poly:
        return self.P.diff(0)

    @property
    def P2(self) -> Poly:
        return self.P.diff(1)

    def validate(self, radius: float = 64.0, seed: int = 0) -> None:
        """Spot-check that q has no zero on R^2; raises KernelError if one is found."""
        check_nonvanishing(self.q, radius=radius, seed=seed)

    def to_json(self) -> dict:
        return {"P": self.P.to_json(), "q": self.q.to_json()}


class KernelError(ValueError):
    """Raised when q vanishes (or nearly vanishes) on R^2."""


def check_nonvanishing(q: Poly, radius: float = 64.0, seed: int = 0, tol: float = 1e-10) -> float:
    """Dense sampling plus local minimisation of |q| on expanding boxes.

    Returns the smallest |q| found; raises KernelError below ``tol``.
    """
    from scipy.optimize import minimize

    if q.degree == 0:
        c = abs(q.terms.get((0, 0), 0))
        if c <= tol:
            raise KernelError("q vanishes identically")
        return c
    rng = np.random.default_rng(seed)
    best = np.inf
    best_pt = None
    r = 1.0
    while r <= radius:
        g = np.linspace(-r, r, 81)
        X, Y = np.meshgrid(g, g, indexing="ij")
        pts = np.column_stack([X.ravel(), Y.ravel()])
        pts = np.vstack([pts, rng.uniform(-r, r, size=(2000, 2))])
        vals = np.abs(q(pts[:, 0], pts[:, 1]))
        for idx in np.argsort(vals)[:5]:
            res = minimize(lambda v: abs(q(v[0], v[1])) ** 2, pts[idx], method="Nelder-Mead",
                           options={"xatol": 1e-12, "fatol": 1e-28, "maxiter": 4000})
            val = abs(q(*res.x))
            if val < best:
                best, best_pt = val, res.x
        r *= 2
    if best <= tol:
        raise KernelError(f"q vanishes numerically near (xi, eta) = ({best_pt[0]:.8g}, {best_pt[1]:.8g})")
    return float(best)


def wig_pushforward(B: WeylOp) -> WeylOp:
    """Operator acting before the Wigner transform: B Wig[w] = Wig[pushforward(B) w]."""
    return substitute_ordered(B, 0.5 * (M1 + M2), 0.5 * (D1 - D2), D1 + D2, M2 - M1)


def bar_transform(B: WeylOp, ker: KernelSpec) -> WeylOp:
    """B_bar with B Q[w] = Q[B_bar w]."""
    s, d = D1 + D2, M2 - M1
    x1 = 0.5 * (M1 + M2) + poly_at(ker.P1, s, d)
    x2 = 0.5 * (D1 - D2) + poly_at(ker.P2, s, d)
    return substitute_ordered(B, x1, x2, s, d)


def tilde_transform(B: WeylOp, ker: KernelSpec) -> WeylOp:
    """B_tilde with Q[B w] = B_tilde Q[w]."""
    p1 = poly_at(ker.P1, D1, D2)
    p2 = poly_at(ker.P2, D1, D2)
    x1 = M1 - 0.5 * D2 - p1
    x2 = M1 + 0.5 * D2 - p1
    y1 = 0.5 * D1 + M2 - p2
    y2 = 0.5 * D1 - M2 + p2
    return substitute_ordered(B, x1, x2, y1, y2)


def a_of_q(q: Poly) -> WeylOp:
    """A = q(D1 + D2, M2 - M1)."""
    return poly_at(q, D1 + D2, M2 - M1)


def symbol_of(B: WeylOp) -> Poly:
    """Normal-ordered symbol as a polynomial in (x, y, xi, eta)."""
    return Poly(4, {k: c for k, c in B.terms.items()})
