"""Exact backend: functions of the form p(v) * exp(-1/2 v^T A v + b^T v + c).

The class is closed under coordinate multiplication, differentiation,
real-linear changes of variables, partial Fourier transforms and
multiplication by exp(-i P) with deg P <= 2, which is everything needed to
write Wig[w] and Q[w] in closed form for polynomial-times-Gaussian input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import log, pi

import numpy as np

from .algebra import KernelSpec, WeylOp
from .poly import Poly

_PD_TOL = 1e-12


class DegenerateGaussian(ValueError):
    """Real part of the quadratic form is not positive definite where required."""


def _poly_linear(coeffs: tuple[complex, complex, complex]) -> Poly:
    """c0 + c1*v1 + c2*v2."""
    c0, c1, c2 = coeffs
    return Poly(2, {(0, 0): c0, (1, 0): c1, (0, 1): c2})


def _horner(coeffs: list[complex], z: Poly) -> Poly:
    out = Poly.const(0, 2)
    for c in reversed(coeffs):
        out = out * z + c
    return out


def _moment_polys(kmax: int, a: complex) -> list[list[complex]]:
    """h_k(z) with int t^k e^{-a t^2/2 + z t} dt = sqrt(2 pi / a) e^{z^2/(2a)} h_k(z)."""
    hs = [[1.0 + 0j]]
    for _ in range(kmax):
        h = hs[-1]
        nxt = [0j] * (len(h) + 1)
        for j, c in enumerate(h):
            nxt[j + 1] += c / a
            if j:
                nxt[j - 1] += j * c
        hs.append(nxt)
    return hs


@dataclass(frozen=True, eq=False)
class PolyGauss:
    p: Poly
    A: np.ndarray
    b: np.ndarray = field(default_factory=lambda: np.zeros(2, complex))
    c: complex = 0j

    def __post_init__(self):
        A = np.array(self.A, dtype=complex).reshape(2, 2)
        A = 0.5 * (A + A.T)
        b = np.array(self.b, dtype=complex).reshape(2)
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", complex(self.c))
        if self.p.nvars != 2:
            raise ValueError("PolyGauss polynomial must be bivariate")

    @classmethod
    def gaussian(cls, p: Poly | None = None) -> "PolyGauss":
        """p * exp(-(x^2 + y^2)/2); p defaults to 1."""
        return cls(p if p is not None else Poly.const(1.0, 2), np.eye(2))

    def is_positive(self) -> bool:
        R = self.A.real
        return R[0, 0] > _PD_TOL and np.linalg.det(R) > _PD_TOL

    # evaluation ---------------------------------------------------------------
    def exponent(self, x, y):
        A, b = self.A, self.b
        return (-0.5 * (A[0, 0] * x * x + 2 * A[0, 1] * x * y + A[1, 1] * y * y)
                + b[0] * x + b[1] * y + self.c)

    def __call__(self, x, y):
        return self.p(x, y) * np.exp(self.exponent(x, y))

    def log_abs(self, x, y):
        """log |f| computed without forming exp, so far tails do not underflow."""
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.p(x, y))) + self.exponent(x, y).real

    def on_grid(self, N: int = 256, L: float = 12.0, Ly: float | None = None, kind: str = "space"):
        from .grid import Grid2

        Ly = L if Ly is None else Ly
        x = -L + 2 * L / N * np.arange(N)
        y = -Ly + 2 * Ly / N * np.arange(N)
        X, Y = np.meshgrid(x, y, indexing="ij")
        return Grid2(self(X, Y), L, Ly, kind=kind)

    # algebraic operations -------------------------------------------------------
    def with_poly(self, p: Poly) -> "PolyGauss":
        return PolyGauss(p, self.A, self.b, self.c)

    def __add__(self, other: "PolyGauss") -> "PolyGauss":
        if not (np.array_equal(self.A, other.A) and np.array_equal(self.b, other.b) and self.c == other.c):
            raise ValueError("summands must share the exponent")
        return self.with_poly(self.p + other.p)

    def scale(self, s: complex) -> "PolyGauss":
        return self.with_poly(self.p * s)

    def mul_coord(self, i: int) -> "PolyGauss":
        return self.with_poly(self.p * Poly.var(i, 2))

    def grad_exponent(self, i: int) -> Poly:
        A, b = self.A, self.b
        lin = [b[i], -A[i, 0], -A[i, 1]]
        return _poly_linear(tuple(lin))

    def deriv(self, i: int) -> "PolyGauss":
        """Plain partial derivative d/dv_i."""
        return self.with_poly(self.p.diff(i) + self.p * self.grad_exponent(i))

    def D(self, i: int) -> "PolyGauss":
        """D_i = -i d/dv_i."""
        return self.deriv(i).scale(-1j)

    def change_vars(self, T: np.ndarray) -> "PolyGauss":
        """g(u) = f(T u) for a real invertible 2x2 matrix T."""
        T = np.asarray(T, dtype=float)
        subs = [_poly_linear((0, T[0, 0], T[0, 1])), _poly_linear((0, T[1, 0], T[1, 1]))]
        p = self.p.compose(subs) if not self.p.is_zero else self.p
        if not isinstance(p, Poly):
            p = Poly.const(p, 2)
        return PolyGauss(p, T.T @ self.A @ T, T.T @ self.b, self.c)

    def partial_ft(self, axis: int, inverse: bool = False) -> "PolyGauss":
        """Fourier transform in one variable, the other left in place.

        Forward: int e^{-i t y} f dt.  Inverse: (2 pi)^{-1} int e^{+i t y} f dt.
        """
        o = 1 - axis
        A, b = self.A, self.b
        a = A[axis, axis]
        if a.real <= _PD_TOL:
            raise DegenerateGaussian("Re of the transformed variable's quadratic coefficient must be positive")
        s = 1j if inverse else -1j
        axt = A[o, axis]
        # z = b_t - A_xt * v_o + s * y   (y takes the slot of the transformed variable)
        zc = [0j, 0j, 0j]
        zc[0] = b[axis]
        zc[1 + o] = -axt
        zc[1 + axis] = s
        z = _poly_linear(tuple(zc))
        kmax = max((e[axis] for e in self.p.terms), default=0)
        hs = _moment_polys(kmax, a)
        newp = Poly.const(0, 2)
        for e, coef in self.p.terms.items():
            k = e[axis]
            mono = [0, 0]
            mono[o] = e[o]
            newp = newp + Poly(2, {tuple(mono): coef}) * _horner(hs[k], z)
        A2 = np.zeros((2, 2), complex)
        A2[o, o] = A[o, o] - axt * axt / a
        A2[o, axis] = A2[axis, o] = s * axt / a
        A2[axis, axis] = -(s * s) / a
        b2 = np.zeros(2, complex)
        b2[o] = b[o] - b[axis] * axt / a
        b2[axis] = s * b[axis] / a
        c2 = self.c + b[axis] ** 2 / (2 * a) + 0.5 * np.log(2 * pi / a)
        if inverse:
            c2 -= log(2 * pi)
        return PolyGauss(newp, A2, b2, c2)

    def ft2(self, inverse: bool = False) -> "PolyGauss":
        return self.partial_ft(1, inverse).partial_ft(0, inverse)

    def times_phase(self, P: Poly) -> "PolyGauss":
        """Multiply by exp(-i P(v)) for a polynomial P of degree <= 2."""
        if P.degree > 2:
            raise ValueError("degree of P exceeds 2")
        t = P.terms
        H = np.array([[2 * t.get((2, 0), 0), t.get((1, 1), 0)],
                      [t.get((1, 1), 0), 2 * t.get((0, 2), 0)]], dtype=complex)
        g = np.array([t.get((1, 0), 0), t.get((0, 1), 0)], dtype=complex)
        return PolyGauss(self.p, self.A + 1j * H, self.b - 1j * g, self.c - 1j * t.get((0, 0), 0))


def apply_op_exact(B: WeylOp, f: PolyGauss) -> PolyGauss:
    """B(M1, M2, D1, D2) f in closed form; every term keeps the exponent of f."""
    derivs: dict[tuple[int, int], PolyGauss] = {(0, 0): f}

    def d(h: int, k: int) -> PolyGauss:
        if (h, k) not in derivs:
            derivs[(h, k)] = d(h, k - 1).D(1) if k else d(h - 1, 0).D(0)
        return derivs[(h, k)]

    total = Poly.const(0, 2)
    for (m, n, h, k), c in B.terms.items():
        total = total + d(h, k).p * Poly(2, {(m, n): c})
    return f.with_poly(total)


_WIG_T = np.array([[1.0, 0.5], [1.0, -0.5]])


def wig_exact(f: PolyGauss) -> PolyGauss:
    """Closed-form Wig[f](x, y) = int e^{-i t y} f(x + t/2, x - t/2) dt."""
    return f.change_vars(_WIG_T).partial_ft(1)


def cohen_q_exact(f: PolyGauss, ker: KernelSpec) -> PolyGauss:
    """Closed-form Q[f] = F^{-1}(q e^{-iP} F(Wig[f])) for deg P <= 2."""
    if ker.P.degree > 2:
        raise ValueError("degree of P exceeds 2")
    W = wig_exact(f)
    if ker.P.is_zero and ker.q == Poly.const(1.0, 2):
        return W
    spec = W.ft2()
    spec = spec.times_phase(ker.P).with_poly(spec.p * ker.q)
    return spec.ft2(inverse=True)
