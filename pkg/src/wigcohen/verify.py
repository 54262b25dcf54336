"""Residual harness for the intertwining identities of Wig and Q."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from math import ceil, log2, pi, sqrt

import numpy as np

from .algebra import (D1, D2, M1, M2, KernelSpec, WeylOp, a_of_q, bar_transform,
                      tilde_transform, wig_pushforward)
from .cohen import cohen_q, wig
from .dsl import format_op, format_poly, op
from .grid import Grid2, apply_op
from .poly import ETA, XI, Poly
from .polygauss import PolyGauss, apply_op_exact, cohen_q_exact, wig_exact

IDENTITIES = ("wig-constcoef", "wig-pushforward", "cohen-bar", "cohen-tilde", "sigma1-oscillator")
SUITES = {
    "wigner": ("wig-constcoef", "wig-pushforward"),
    "cohen": ("cohen-bar", "cohen-tilde"),
    "sigma1": ("sigma1-oscillator",),
}
SUITES["all"] = SUITES["wigner"] + SUITES["cohen"] + SUITES["sigma1"]

RESOLUTION_WARNING = 1e-3


@dataclass
class IdentityReport:
    name: str
    backend: str
    N: int | None
    L: float | None
    abs_residual: float
    rel_residual: float
    operator: str
    P: str
    q: str
    w: str
    passed: bool | None = None
    warnings: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def relative(abs_res: float, ref: float) -> float:
    if ref == 0:
        return 0.0 if abs_res == 0 else float("inf")
    return abs_res / ref


# standard test matrix ------------------------------------------------------------

TWISTED_L = op("(Dx - y/2)^2 + (Dy + x/2)^2")

STANDARD_OPERATORS: dict[str, WeylOp] = {
    "x": M1,
    "Dx": D1,
    "x*Dx": M1 * D1,
    "x^2+Dx^2": M1 * M1 + D1 * D1,
    "twisted": TWISTED_L,
}
STANDARD_PHASES: dict[str, Poly] = {"0": Poly(2), "xi*eta/2": 0.5 * XI * ETA, "xi^2-eta^2": XI**2 - ETA**2}
STANDARD_FACTORS: dict[str, Poly] = {"1": Poly.const(1.0, 2), "xi^2+eta^2+1": XI**2 + ETA**2 + 1}
STANDARD_FUNCTIONS: dict[str, PolyGauss] = {
    "gaussian": PolyGauss.gaussian(),
    "x*gaussian": PolyGauss.gaussian(Poly.var(0, 2)),
    "(x^2+y)*gaussian": PolyGauss.gaussian(Poly.var(0, 2) ** 2 + Poly.var(1, 2)),
}
CONSTCOEF_SYMBOLS: dict[str, WeylOp] = {"Dx": D1, "Dy": D2, "Dx^2*Dy": D1 * D1 * D2}


# grid sizing -----------------------------------------------------------------------

def grid_for(ker: KernelSpec, N: int = 256, L: float = 12.0, cap: int = 1024) -> tuple[int, float]:
    """Grid large enough to hold Q[gaussian] for this kernel.

    For a quadratic phase Q spreads like a Gaussian with covariance
    inv(Re A) read off the exact backend; the half-width is chosen so the
    envelope falls below ~1e-16 and N so that the Wigner frequency axis
    (half-width pi N / 4L) is at least as wide.
    """
    if ker.P.degree < 2 or ker.P.degree > 2:
        return N, L
    Q = cohen_q_exact(PolyGauss.gaussian(), KernelSpec(ker.P))
    sd = sqrt(float(np.max(np.linalg.eigvalsh(np.linalg.inv(Q.A.real)))))
    need = 8.5 * sd + 1.0
    if need <= L:
        return N, L
    L2 = float(ceil(need))
    N2 = max(N, 2 ** ceil(log2(4 * L2 * L2 / pi)))
    return min(N2, cap), L2


# backends ------------------------------------------------------------------------

class _GridBackend:
    name = "grid"

    def __init__(self, N: int, L: float):
        self.N, self.L = N, L
        self._cache: dict = {}

    def sample(self, f: PolyGauss) -> Grid2:
        return f.on_grid(self.N, self.L)

    def apply(self, B: WeylOp, v):
        return apply_op(B, v)

    def wig(self, v):
        return wig(v)

    def q(self, v, ker: KernelSpec):
        return cohen_q(v, ker)

    def norm(self, v) -> float:
        return v.norm()

    def diff(self, a, b) -> float:
        return (a - b).norm()


def _envelope_box(f: PolyGauss, floor: float = 40.0) -> tuple[float, float]:
    R = np.linalg.inv(f.A.real)
    sd = np.sqrt(np.maximum(np.diag(R), 1e-12))
    return tuple(float(max(6.0, sqrt(2 * floor) * s + 2.0)) for s in sd)


class _ExactBackend:
    """Closed-form evaluation; norms by spectrally accurate quadrature."""

    name = "exact"

    def __init__(self, n: int = 384):
        self.n = n

    def sample(self, f: PolyGauss) -> PolyGauss:
        return f

    def apply(self, B, v):
        return apply_op_exact(B, v)

    def wig(self, v):
        return wig_exact(v)

    def q(self, v, ker):
        return cohen_q_exact(v, ker)

    def _mesh(self, *fs):
        bx, by = (max(vals) for vals in zip(*(_envelope_box(f) for f in fs)))
        x = np.linspace(-bx, bx, self.n, endpoint=False)
        y = np.linspace(-by, by, self.n, endpoint=False)
        X, Y = np.meshgrid(x, y, indexing="ij")
        return X, Y, (x[1] - x[0]) * (y[1] - y[0])

    def norm(self, v) -> float:
        X, Y, dA = self._mesh(v)
        return float(np.sqrt(np.sum(np.abs(v(X, Y)) ** 2) * dA))

    def diff(self, a, b) -> float:
        if np.array_equal(a.A, b.A) and np.array_equal(a.b, b.b) and a.c == b.c:
            d = a.with_poly(a.p - b.p)
            if d.p.is_zero:
                return 0.0
            return self.norm(d)
        X, Y, dA = self._mesh(a, b)
        return float(np.sqrt(np.sum(np.abs(a(X, Y) - b(X, Y)) ** 2) * dA))


def _sides(name: str, B: WeylOp, ker: KernelSpec, w, be, cache: dict):
    """Return (lhs, rhs) for the named identity."""
    P_only = KernelSpec(ker.P)

    def memo(key, fn):
        if key not in cache:
            cache[key] = fn()
        return cache[key]

    wid = id(w)
    if name in ("wig-constcoef", "wig-pushforward"):
        if name == "wig-constcoef" and any(m or n for (m, n, _, _) in B.terms):
            raise ValueError("wig-constcoef takes a constant-coefficient operator in D1, D2")
        W = memo(("wig", wid), lambda: be.wig(w))
        return be.apply(B, W), be.wig(be.apply(wig_pushforward(B), w))
    if name == "cohen-bar":
        Q1 = memo(("q", wid, ker), lambda: be.q(w, ker))
        Bbar_A = bar_transform(B, P_only) * a_of_q(ker.q)
        return be.apply(B, Q1), be.q(be.apply(Bbar_A, w), P_only)
    AB = a_of_q(ker.q) * B
    Qs = memo(("q", wid, P_only), lambda: be.q(w, P_only))
    rhs = be.apply(tilde_transform(AB, P_only), Qs)
    if name == "cohen-tilde":
        return be.q(be.apply(AB, w), P_only), rhs
    if name == "sigma1-oscillator":
        return be.q(be.apply(B, w), ker), rhs
    raise ValueError(f"unknown identity {name!r}; expected one of {IDENTITIES}")


def verify_identity(name: str, B: WeylOp, ker: KernelSpec, w, backend: str = "grid",
                    N: int | None = None, L: float | None = None, labels: dict | None = None,
                    _cache: dict | None = None) -> IdentityReport:
    """Evaluate both sides of an identity and report L2 residuals.

    ``w`` is a PolyGauss (sampled for the grid backend) or a Grid2 (grid only).
    """
    if name not in IDENTITIES:
        raise ValueError(f"unknown identity {name!r}; expected one of {IDENTITIES}")
    labels = labels or {}
    if backend == "grid":
        if isinstance(w, Grid2):
            be, wv = _GridBackend(w.N, w.Lx), w
        else:
            if N is None or L is None:
                N, L = grid_for(ker, N or 256, L or 12.0)
            be = _GridBackend(N, L)
            wv = be.sample(w)
    elif backend == "exact":
        if not isinstance(w, PolyGauss):
            raise TypeError("exact backend needs a PolyGauss input")
        be, wv, N, L = _ExactBackend(), w, None, None
    else:
        raise ValueError("backend must be 'grid' or 'exact'")
    cache = _cache if _cache is not None else {}
    lhs, rhs = _sides(name, B, ker, wv, be, cache)
    a = be.diff(lhs, rhs)
    r = relative(a, be.norm(rhs))
    rep = IdentityReport(
        name=name, backend=be.name, N=N, L=L, abs_residual=a, rel_residual=r,
        operator=labels.get("operator", format_op(B)),
        P=labels.get("P", format_poly(ker.P)), q=labels.get("q", format_poly(ker.q)),
        w=labels.get("w", "grid" if isinstance(w, Grid2) else "polygauss"),
    )
    if r > RESOLUTION_WARNING:
        rep.warnings.append("residual above 1e-3: grid resolution likely insufficient")
    return rep


@dataclass
class MatrixConfig:
    """Options for a run of the standard matrix."""

    backend: str = "grid"
    N: int = 256
    L: float = 12.0
    tol: float = 1e-6
    phases: dict[str, Poly] | None = None
    factors: dict[str, Poly] | None = None
    operators: dict[str, WeylOp] | None = None
    auto_grid: bool = True


def standard_cases(name: str, cfg: MatrixConfig):
    """Yield (B label, B, P label, q label, ker, w label, w) for one identity."""
    phases = cfg.phases or STANDARD_PHASES
    factors = cfg.factors or STANDARD_FACTORS
    if name == "sigma1-oscillator" and cfg.factors is None:
        factors = {k: v for k, v in factors.items() if v.degree > 0}
    operators = cfg.operators or STANDARD_OPERATORS
    if name.startswith("wig-"):
        if name == "wig-pushforward":
            ops = operators
        elif cfg.operators is None:
            ops = CONSTCOEF_SYMBOLS
        else:
            ops = {k: B for k, B in operators.items() if not any(m or n for (m, n, _, _) in B.terms)}
        for bl, B in ops.items():
            for wl, w in STANDARD_FUNCTIONS.items():
                yield bl, B, "0", "1", KernelSpec(), wl, w
        return
    for pl, P in phases.items():
        for ql, q in factors.items():
            ker = KernelSpec(P, q)
            for bl, B in operators.items():
                for wl, w in STANDARD_FUNCTIONS.items():
                    yield bl, B, pl, ql, ker, wl, w


def run_suite(suite: str, cfg: MatrixConfig | None = None) -> list[IdentityReport]:
    cfg = cfg or MatrixConfig()
    names = SUITES[suite] if suite in SUITES else (suite,)
    out = []
    for name in names:
        caches: dict = {}
        for bl, B, pl, ql, ker, wl, w in standard_cases(name, cfg):
            if cfg.backend == "exact" and ker.P.degree > 2:
                continue
            if cfg.backend == "grid":
                N, L = grid_for(ker, cfg.N, cfg.L) if cfg.auto_grid else (cfg.N, cfg.L)
            else:
                N = L = None
            cache = caches.setdefault((N, L, pl), {})
            cache_key = ("w", wl, N, L)
            # one sampled copy per function so id()-based memo keys are stable
            if cfg.backend == "grid":
                if cache_key not in cache:
                    cache[cache_key] = w.on_grid(N, L)
                wv = cache[cache_key]
            else:
                wv = w
            rep = verify_identity(name, B, ker, wv, backend=cfg.backend, N=N, L=L,
                                  labels={"operator": bl, "P": pl, "q": ql, "w": wl}, _cache=cache)
            rep.passed = rep.rel_residual <= cfg.tol
            out.append(rep)
    return out
