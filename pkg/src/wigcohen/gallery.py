"""Example operators: hypoellipticity probing, the twisted Laplacian and a catalog
of operators obtained as transforms of simple regular ones."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate, optimize, special

from .algebra import (D1, D2, M1, M2, KernelSpec, WeylOp, poly_at, symbol_of,
                      tilde_transform, wig_pushforward)
from .dsl import (Gen, Power, Sum, format_op, format_poly, lower, op, parse_op, parse_poly2,
                  substitute_ast)
from .grid import Grid2, apply_op
from .poly import Poly

# hypoellipticity -------------------------------------------------------------------

WITNESS_C = 1e-12


@dataclass(frozen=True)
class HypoParams:
    """Parameters of the lower bound |a(p)| >= c <p>^m' probed on spheres |p| = r in R^4."""

    m_prime: float = 0.0
    rho: float = 1.0
    B: float = 1.0
    radii: tuple[float, ...] = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0)
    density: int = 2000
    deriv_order: int = 0
    seed: int = 0
    n_starts: int = 8

    def __post_init__(self):
        if not 0 < self.rho <= 1:
            raise ValueError("rho must lie in (0, 1]")
        r = list(self.radii)
        if not r or any(b <= a for a, b in zip(r, r[1:])):
            raise ValueError("radii must be increasing")
        if r[0] < self.B:
            raise ValueError("radii must be >= B")
        if self.density < 1 or self.n_starts < 0 or self.deriv_order < 0:
            raise ValueError("density, n_starts and deriv_order must be nonnegative")


@dataclass
class HypoVerdict:
    violated: bool
    radius: float
    witness: dict | None
    c_per_shell: list[dict] = field(default_factory=list)
    deriv_C_per_shell: list[dict] = field(default_factory=list)
    text: str = ""

    def to_json(self) -> dict:
        return asdict(self)


def _bracket(P: np.ndarray) -> np.ndarray:
    return np.sqrt(1.0 + np.sum(P * P, axis=-1))


def _directions(a: Poly, n_random: int, seed: int) -> np.ndarray:
    """Unit vectors in R^4: axes, pairwise diagonals, Hessian eigenvectors at 0, random."""
    dirs = []
    eye = np.eye(4)
    for i in range(4):
        dirs += [eye[i], -eye[i]]
        for j in range(i + 1, 4):
            for s in (1, -1):
                dirs += [(eye[i] + s * eye[j]) / math.sqrt(2), -(eye[i] + s * eye[j]) / math.sqrt(2)]
    # the top-degree quadratic part usually exposes the null directions
    H = np.zeros((4, 4), complex)
    for (e, c) in a.terms.items():
        if sum(e) == 2:
            idx = [i for i in range(4) for _ in range(e[i])]
            H[idx[0], idx[1]] += c / (1 if idx[0] == idx[1] else 2)
            if idx[0] != idx[1]:
                H[idx[1], idx[0]] += c / 2
    for part in (H.real, H.imag):
        if np.any(part):
            _, V = np.linalg.eigh((part + part.T) / 2)
            for v in V.T:
                dirs += [v, -v]
    rng = np.random.default_rng(seed)
    R = rng.standard_normal((n_random, 4))
    dirs += list(R / np.linalg.norm(R, axis=1, keepdims=True))
    return np.array(dirs)


def _as_symbol(a) -> Poly:
    if isinstance(a, WeylOp):
        return symbol_of(a)
    if isinstance(a, Poly) and a.nvars == 4:
        return a
    raise TypeError("expected a polynomial in (x, y, xi, eta) or a WeylOp")


def hypo_check(a, params: HypoParams | None = None) -> HypoVerdict:
    """Probe |a(p)| / <p>^m' on spheres; a near-zero ratio is a witness against the bound.

    The verdict is one-sided. A witness disproves the lower bound, while the
    lack of one up to the largest radius proves nothing.
    """
    params = params or HypoParams()
    a = _as_symbol(a)
    U = _directions(a, params.density, params.seed)

    def ratio(P):
        return np.abs(a(*np.moveaxis(P, -1, 0))) / _bracket(P) ** params.m_prime

    shells, dshells = [], []
    witness = None
    for r in params.radii:
        P = r * U
        vals = ratio(P)
        best_i = int(np.argmin(vals))
        best, best_p = float(vals[best_i]), P[best_i]
        for i in np.argsort(vals)[: params.n_starts]:
            def obj(v, r=r):
                n = np.linalg.norm(v)
                return float(ratio(r * v / n)) if n else math.inf
            res = optimize.minimize(obj, U[i], method="Nelder-Mead",
                                    options={"xatol": 1e-12, "fatol": 1e-300, "maxiter": 2000})
            if res.fun < best:
                best, best_p = float(res.fun), r * res.x / np.linalg.norm(res.x)
        shells.append({"radius": r, "c": best, "argmin": [float(t) for t in best_p]})
        if params.deriv_order:
            dshells.append({"radius": r, "C": _deriv_ratio(a, P, params)})
        if witness is None and best < WITNESS_C:
            val = complex(a(*best_p))
            witness = {"point": {k: float(t) for k, t in zip(("x", "y", "xi", "eta"), best_p)},
                       "abs_a": abs(val), "bracket": float(_bracket(best_p)), "radius": r}
    R = params.radii[-1]
    if witness is not None:
        text = (f"lower bound violated: |a| = {witness['abs_a']:.3g} at radius {witness['radius']:g}, "
                f"below {WITNESS_C:g} * <p>^{params.m_prime:g}")
    else:
        text = (f"no violation found up to radius {R:g}; this is not a proof that the lower bound holds")
    return HypoVerdict(witness is not None, R, witness, shells, dshells, text)


def _deriv_ratio(a: Poly, P: np.ndarray, params: HypoParams) -> float:
    """max over sampled points and 1 <= |gamma| <= order of |d^gamma a| <p>^(rho|gamma|) / |a|."""
    args = np.moveaxis(P, -1, 0)
    base = np.abs(a(*args))
    br = _bracket(P)
    worst = 0.0
    frontier = [(a, 0)]
    seen = set()
    for _ in range(params.deriv_order):
        nxt = []
        for p, k in frontier:
            for i in range(4):
                d = p.diff(i)
                key = tuple(sorted(d.terms.items()))
                if key in seen:
                    continue
                seen.add(key)
                nxt.append((d, k + 1))
                with np.errstate(divide="ignore", invalid="ignore"):
                    q = np.abs(d(*args)) * br ** (params.rho * (k + 1)) / base
                q = q[np.isfinite(q)]
                if q.size:
                    worst = max(worst, float(q.max()))
        frontier = nxt
    return worst


# twisted Laplacian -----------------------------------------------------------------

TWISTED = op("(Dx - y/2)^2 + (Dy + x/2)^2")
_LOG_CUTOFF = math.log(1e18)


def twisted_green(r: float) -> float:
    """g(r) = (1/4pi) int_0^inf exp(-r^2 cosh(t) / 4) dt by adaptive quadrature."""
    if not r > 0:
        raise ValueError("twisted_green needs r > 0 (logarithmic singularity at 0)")
    z = r * r / 4
    T = math.acosh(1 + _LOG_CUTOFF / z)
    val, _ = integrate.quad(lambda t: math.exp(-z * (math.cosh(t) - 1)), 0, T,
                            epsabs=4e-12 * math.pi * math.exp(min(z, 700.0)), epsrel=1e-13, limit=200)
    return val * math.exp(-z) / (4 * math.pi)


def twisted_green_u(r: float) -> float:
    """Same function through u = cosh t: (1/4pi) int_1^inf e^{-r^2 u/4} / sqrt(u^2 - 1) du."""
    if not r > 0:
        raise ValueError("r must be positive")
    z = r * r / 4
    U = 1 + _LOG_CUTOFF / z
    # (u - 1)^(-1/2) handled as an algebraic weight
    val, _ = integrate.quad(lambda u: math.exp(-z * (u - 1)) / math.sqrt(u + 1), 1, U,
                            weight="alg", wvar=(-0.5, 0.0), epsabs=1e-14, epsrel=1e-13, limit=200)
    return val * math.exp(-z) / (4 * math.pi)


def twisted_green_k0(r):
    """Closed form K0(r^2/4) / (4 pi)."""
    return special.k0(np.asarray(r, float) ** 2 / 4) / (4 * np.pi)


@dataclass
class GreenBound:
    c: float
    s: float
    C: float
    r_min: float
    r_max: float
    violations: int
    checked: int

    def to_json(self) -> dict:
        return asdict(self)


def green_bound(c: float = 0.1, s: float = 2.0, r_min: float = 0.05, r_max: float = 6.0,
                n_fit: int = 400, n_check: int = 4000) -> GreenBound:
    """Fit C in g(r) <= C r^-s e^{-c r^2}, then count violations on a finer independent grid.

    C is the maximum of g(r) r^s e^{c r^2}, found on a grid and refined by bounded
    search, times 1 + 1e-9 to absorb quadrature error.
    """
    def h(r):
        return twisted_green(r) * r**s * math.exp(c * r * r)

    rf = np.linspace(r_min, r_max, n_fit)
    hv = np.array([h(r) for r in rf])
    k = int(np.argmax(hv))
    lo, hi = rf[max(k - 1, 0)], rf[min(k + 1, n_fit - 1)]
    res = optimize.minimize_scalar(lambda r: -h(r), bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-12})
    C = max(float(hv[k]), -float(res.fun)) * (1 + 1e-9)
    rc = np.geomspace(r_min, r_max, n_check)
    g = twisted_green_k0(rc)
    viol = int(np.sum(g > C * rc ** (-s) * np.exp(-c * rc * rc)))
    return GreenBound(c, s, C, r_min, r_max, viol, n_check)


def _centre_weight(h: float) -> float:
    """Mean of g over the square cell [-h/2, h/2]^2.

    By symmetry this is 8 / h^2 times the integral over the triangle 0 <= theta <= pi/4,
    r <= h / (2 cos theta); the radial part has the closed form
    int_0^rho g(r) r dr = (1/2pi) int_0^{rho^2/4} K0(s) ds.
    """
    def radial(rho):
        v, _ = integrate.quad(special.k0, 0, rho * rho / 4, epsabs=1e-15, limit=200)
        return v / (2 * math.pi)

    tri, _ = integrate.quad(lambda th: radial(h / (2 * math.cos(th))), 0, math.pi / 4, epsabs=1e-15)
    return 8 * tri / (h * h)


MAX_SOLVE_N = 128


def twisted_solve(f: Grid2) -> Grid2:
    """Solve L u = f through u(z) = int g(w) e^{i(z2 w1 - z1 w2)/2} f(z - w) dw.

    Direct lattice summation with weight dx^2.  The singular w = 0 sample is
    replaced by the mean of g over its cell; the value is stored in ``meta``.
    """
    if f.kind != "space" or not np.isclose(f.Lx, f.Ly):
        raise ValueError("twisted_solve expects a square space-domain grid")
    N, h = f.N, f.dx
    if N > MAX_SOLVE_N:
        raise ValueError(f"grid too large for direct summation (N = {N} > {MAX_SOLVE_N})")
    x = f.x
    off = h * np.arange(-(N - 1), N)
    R = np.hypot(off[:, None], off[None, :])
    with np.errstate(divide="ignore"):
        G = twisted_green_k0(R)
    g0 = _centre_weight(h)
    G[N - 1, N - 1] = g0
    G *= h * h
    F = f.values
    # u[i,j] = sum_{a,b} G[i-a, j-b] e^{i(x_i x_b - x_j x_a)/2} F[a,b]
    E = np.exp(0.5j * np.outer(x, x))  # E[i, b] = e^{i x_i x_b / 2}
    idx = np.arange(N)
    Jb = (idx[:, None] - idx[None, :]) + N - 1  # j - b + N - 1
    u = np.empty((N, N), complex)
    for i in range(N):
        Gi = G[i - idx + N - 1][:, Jb]  # (a, j, b)
        T = F * E[i][None, :]  # (a, b)
        S = np.einsum("ajb,ab->aj", Gi, T)
        u[i] = np.einsum("ja,aj->j", E.conj(), S)
    meta = dict(f.meta)
    meta.update({"solver": "direct twisted convolution", "centre_weight": g0,
                 "centre_rule": "mean of g over the centre cell"})
    return f.with_values(u, meta=meta)


def twisted_residual(f: Grid2, u: Grid2 | None = None) -> float:
    """||L u - f|| / ||f|| with L applied spectrally."""
    u = twisted_solve(f) if u is None else u
    return (apply_op(TWISTED, u) - f).norm() / f.norm()


# catalog -----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class NamedExample:
    """A catalog operator ``form`` with a ``base`` operator and kernel such that form = tilde(base)."""

    name: str
    params: dict
    form: WeylOp
    base: WeylOp
    kernel: KernelSpec
    notes: str
    condition: dict | None = None

    def check(self) -> bool:
        return tilde_transform(self.base, self.kernel) == self.form

    def roundtrip(self) -> bool:
        return op(format_op(self.form)) == self.form

    def symbol(self) -> Poly:
        return symbol_of(self.form)

    def to_json(self) -> dict:
        return {
            "name": self.name, "params": {k: str(v) for k, v in self.params.items()},
            "form": format_op(self.form), "base": format_op(self.base),
            "P": format_poly(self.kernel.P), "q": format_poly(self.kernel.q),
            "tilde_check": self.check(), "notes": self.notes, "condition": self.condition,
        }


def _one_var(text: str, gen: str) -> tuple[Poly, object]:
    """Parse a constant-coefficient real operator in the single generator ``gen``."""
    expr = parse_op(text)
    B = lower(expr)
    axis = {"Dx": 0, "Dy": 1}[gen]
    p = {}
    for (m, n, h, k), c in B.terms.items():
        if m or n or (h if axis else k):
            raise ValueError(f"{text!r} must be a polynomial in {gen} alone")
        if c.imag:
            raise ValueError(f"{text!r} must have real coefficients")
        p[(h, k)] = c.real
    return Poly(2, p), expr


def _const_coeff(text: str) -> tuple[Poly, object]:
    """Parse a real operator in Dx, Dy and return its symbol in (xi, eta)."""
    expr = parse_op(text)
    B = lower(expr)
    p = {}
    for (m, n, h, k), c in B.terms.items():
        if m or n:
            raise ValueError(f"{text!r} must have constant coefficients")
        if c.imag:
            raise ValueError(f"{text!r} must have real coefficients")
        p[(h, k)] = c.real
    return Poly(2, p), expr


HARMONIC = op("x^2 + Dx^2")
_XI, _ETA = Poly.var(0, 2), Poly.var(1, 2)


def ex1(b: str = "x^2 + 1", P: str = "Dx*Dy") -> NamedExample:
    """b(x + P(Dx, Dy)) from the multiplication operator b(x)."""
    bexpr = parse_op(b)
    base = lower(bexpr)
    if any(n or h or k for (m, n, h, k) in base.terms):
        raise ValueError("b must be a polynomial in x alone")
    Pp, Pexpr = _const_coeff(P)
    form = lower(substitute_ast(bexpr, {"x": Sum(Gen("x"), Pexpr)}))
    ker = KernelSpec(-Pp.integrate(0) - 0.5 * _XI * _ETA)
    return NamedExample("ex1", {"b": b, "P": P}, form, base, ker,
                        "regular (and omega-regular) whenever b has no real zero", None)


def HO1(P: str = "0") -> NamedExample:
    """(x - Dy/2 - P1(D))^2 + (y + Dx/2 - P2(D))^2 with P1, P2 the partials of P."""
    Pp = parse_poly2(P)
    p1, p2 = poly_at(Pp.diff(0), D1, D2), poly_at(Pp.diff(1), D1, D2)
    form = (M1 - 0.5 * D2 - p1) ** 2 + (M2 + 0.5 * D1 - p2) ** 2
    return NamedExample("HO1", {"P": P}, form, HARMONIC, KernelSpec(Pp),
                        "transform of the harmonic oscillator x^2 + Dx^2; Schwartz regular", None)


def _squares(head1: str, Qe, head2: str, Re):
    """AST of (head1 + Q)^2 + (head2 + R)^2 with Q, R spliced in as subtrees."""
    return Sum(Power(Sum(parse_op(head1), Qe), 2), Power(Sum(parse_op(head2), Re), 2))


def HO2(Q: str = "0", R: str = "0") -> NamedExample:
    """(x - Dy/2 + Q(Dx))^2 + (y + Dx/2 + R(Dy))^2."""
    Qp, Qe = _one_var(Q, "Dx")
    Rp, Re = _one_var(R, "Dy")
    form = lower(_squares("x - Dy/2", Qe, "y + Dx/2", Re))
    P = -Qp.integrate(0) - Rp.integrate(1)
    return NamedExample("HO2", {"Q": Q, "R": R}, form, HARMONIC, KernelSpec(P),
                        "Schwartz regular for any real Q(Dx), R(Dy)", None)


def HO3(Q: str = "0", R: str = "0") -> NamedExample:
    """(x - Dy + Q(Dx))^2 + (y + R(Dy))^2."""
    Qp, Qe = _one_var(Q, "Dx")
    Rp, Re = _one_var(R, "Dy")
    form = lower(_squares("x - Dy", Qe, "y", Re))
    P = 0.5 * _XI * _ETA - Qp.integrate(0) - Rp.integrate(1)
    return NamedExample("HO3", {"Q": Q, "R": R}, form, HARMONIC, KernelSpec(P),
                        "Schwartz regular for any real Q(Dx), R(Dy)", None)


def twisted() -> NamedExample:
    """The twisted Laplacian; its preimage under the P = 0 transform is its Wigner pushforward."""
    return NamedExample("twisted", {}, TWISTED, wig_pushforward(TWISTED), KernelSpec(),
                        "regular and omega-regular but not globally hypoelliptic: "
                        "the symbol vanishes on xi = y/2, eta = -x/2", None)


def harmonic2d() -> NamedExample:
    form = op("x^2 + y^2 + Dx^2 + Dy^2")
    return NamedExample("harmonic2d", {}, form, wig_pushforward(form), KernelSpec(),
                        "globally hypoelliptic; symbol equals <p>^2 - 1", None)


def airy(alpha: complex = 1j, m: int = 1, P: str = "0") -> NamedExample:
    """Dx/2 + y - P2 + alpha (x - Dy/2 - P1)^m, the transform of Dx + alpha x^m."""
    if int(m) != m or m < 1:
        raise ValueError("m must be a positive integer")
    m = int(m)
    alpha = complex(alpha)
    Pp = parse_poly2(P)
    p1, p2 = poly_at(Pp.diff(0), D1, D2), poly_at(Pp.diff(1), D1, D2)
    base = D1 + alpha * M1**m
    form = 0.5 * D1 + M2 - p2 + alpha * (M1 - 0.5 * D2 - p1) ** m
    val = alpha.imag**m
    cond = {"expression": "(Im alpha)^m > 0", "value": val, "satisfied": bool(val > 0),
            "tested": False}
    return NamedExample("airy", {"alpha": alpha, "m": m, "P": P}, form, base, KernelSpec(Pp),
                        "regularity condition recorded for reference, not tested here", cond)


BUILDERS = {"ex1": ex1, "HO1": HO1, "HO2": HO2, "HO3": HO3, "twisted": twisted,
            "harmonic2d": harmonic2d, "airy": airy}


def catalog() -> list[NamedExample]:
    """Every entry at its default parameters."""
    return [b() for b in BUILDERS.values()]


def build(name: str, **params) -> NamedExample:
    if name not in BUILDERS:
        raise KeyError(f"unknown example {name!r}; choose from {sorted(BUILDERS)}")
    return BUILDERS[name](**params)
