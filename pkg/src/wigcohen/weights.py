"""Weight functions, Young conjugates and the inequality lemmas around them.

A weight omega enters through phi(t) = omega(e^t) and its Young conjugate
phi*(s) = sup_{t >= 0} (s t - phi(t)), which may be +inf.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, optimize, special

INF = math.inf
T_CEIL = 700.0


@dataclass(frozen=True)
class WeightFunction:
    """A weight given by its phi (vectorised) and, when known, phi'.

    ``omega`` is recovered as phi(log t) for t > 0 and omega(0) = phi(-inf).
    """

    name: str
    phi_fn: Callable[[np.ndarray], np.ndarray]
    dphi_fn: Callable[[np.ndarray], np.ndarray] | None = None
    omega_fn: Callable[[np.ndarray], np.ndarray] | None = None
    tail: Callable[[float], float] | None = None
    normalized: bool = False
    params: dict = field(default_factory=dict)

    # evaluation ---------------------------------------------------------------
    def omega(self, t):
        t = np.asarray(t, dtype=float)
        if self.omega_fn is not None:
            val = self.omega_fn(t)
        else:
            with np.errstate(divide="ignore"):
                val = self.phi_fn(np.log(t))
        if self.normalized:
            val = np.maximum(0.0, val - self._omega1)
        return val

    @property
    def _omega1(self) -> float:
        return float(self.phi_fn(np.array(0.0)))

    def phi(self, t):
        t = np.asarray(t, dtype=float)
        val = self.phi_fn(t)
        if self.normalized:
            val = np.maximum(0.0, val - self._omega1)
        return val

    def dphi(self, t):
        t = np.asarray(t, dtype=float)
        if self.dphi_fn is None:
            h = 1e-6 * np.maximum(1.0, np.abs(t))
            d = (self.phi_fn(t + h) - self.phi_fn(t - h)) / (2 * h)
        else:
            d = self.dphi_fn(t)
        if self.normalized:
            d = np.where(t < 0, 0.0, d)
        return d

    def normalize(self) -> "WeightFunction":
        """omega replaced by max(0, omega - omega(1)), which vanishes on [0, 1]."""
        return WeightFunction(self.name, self.phi_fn, self.dphi_fn, self.omega_fn, self.tail,
                              True, dict(self.params))

    @property
    def id(self) -> str:
        return self.name + (":normalized" if self.normalized else "")


# builtins ---------------------------------------------------------------------

def classical() -> WeightFunction:
    """omega_0(t) = log(1 + t), the Schwartz-space weight."""
    return WeightFunction(
        "classical",
        phi_fn=lambda t: np.logaddexp(0.0, t),
        dphi_fn=lambda t: special.expit(t),
        omega_fn=lambda t: np.log1p(t),
        tail=lambda T: (math.log1p(T) + 1.0) / T,
    )


def gevrey(s: float) -> WeightFunction:
    """omega(t) = t^(1/s), s > 1."""
    if not s > 1:
        raise ValueError("gevrey weight needs s > 1")
    return WeightFunction(
        f"gevrey:{s:g}",
        phi_fn=lambda t: np.exp(t / s),
        dphi_fn=lambda t: np.exp(t / s) / s,
        omega_fn=lambda t: np.power(t, 1.0 / s),
        tail=lambda T: T ** (1.0 / s - 1.0) / (1.0 - 1.0 / s),
        params={"s": s},
    )


def powerlog(beta: float) -> WeightFunction:
    """omega(t) = log(1 + t)^beta, beta > 1."""
    if not beta > 1:
        raise ValueError("powerlog weight needs beta > 1")

    def tail(T: float) -> float:
        # int_T^inf (log t)^beta / t^2 dt = Gamma(beta + 1, log T), plus slack for log(1+t) > log t
        lt = math.log(T)
        return float(special.gammaincc(beta + 1, lt) * special.gamma(beta + 1)) * (1 + 1.0 / T) ** beta

    return WeightFunction(
        f"powerlog:{beta:g}",
        phi_fn=lambda t: np.logaddexp(0.0, t) ** beta,
        dphi_fn=lambda t: beta * np.logaddexp(0.0, t) ** (beta - 1) * special.expit(t),
        omega_fn=lambda t: np.log1p(t) ** beta,
        tail=tail,
        params={"beta": beta},
    )


def custom(name: str, omega: Callable, dphi: Callable | None = None) -> WeightFunction:
    """A user weight from omega alone; phi and its slope are derived numerically."""
    return WeightFunction(name, phi_fn=lambda t: omega(np.exp(t)), dphi_fn=dphi, omega_fn=omega)


REGISTRY = {"classical": lambda: classical(), "gevrey": gevrey, "powerlog": powerlog}


def builtin_weights() -> list[WeightFunction]:
    """The weights exercised by the test suites: classical, gevrey:2 and powerlog:1.5."""
    return [classical(), gevrey(2.0), powerlog(1.5)]


def get_weight(spec: str) -> WeightFunction:
    """Look up "classical", "gevrey:<s>" or "powerlog:<beta>"; a trailing ":normalized" normalizes."""
    parts = spec.split(":")
    norm = parts[-1] == "normalized"
    if norm:
        parts = parts[:-1]
    kind = parts[0]
    if kind not in REGISTRY:
        raise KeyError(f"unknown weight {spec!r}")
    if kind == "classical":
        if len(parts) != 1:
            raise KeyError(f"classical weight takes no parameter: {spec!r}")
        wf = classical()
    else:
        if len(parts) != 2:
            raise KeyError(f"weight {kind!r} needs one parameter, e.g. {kind}:2")
        try:
            wf = REGISTRY[kind](float(parts[1]))
        except ValueError as exc:
            raise KeyError(str(exc)) from exc
    return wf.normalize() if norm else wf


# Young conjugate ----------------------------------------------------------------

def young_conjugate(wf: WeightFunction, s):
    """phi*(s) = sup_{0 <= t} (s t - phi(t)); +inf where the slope at t = 700 is below s.

    Vectorised over ``s``.  The concave objective is maximised by bisection on
    phi'(t) = s (60 halvings of [0, 700]), which pins t* far below the 1e-10
    requirement; values where phi' at 0 already exceeds s sit at t = 0.
    """
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0) or np.any(~np.isfinite(s_arr)):
        raise ValueError("young_conjugate needs finite s >= 0")
    s_flat = s_arr.ravel()
    out = np.empty_like(s_flat)
    slope_ceil = float(wf.dphi(np.array(T_CEIL)))
    slope0 = float(wf.dphi(np.array(0.0)))
    inf_mask = s_flat > slope_ceil
    low_mask = s_flat <= slope0
    mid = ~(inf_mask | low_mask)
    out[inf_mask] = INF
    out[low_mask] = -float(wf.phi(np.array(0.0)))
    if mid.any():
        sm = s_flat[mid]
        lo = np.zeros_like(sm)
        hi = np.full_like(sm, T_CEIL)
        for _ in range(60):
            c = 0.5 * (lo + hi)
            up = wf.dphi(c) < sm
            lo = np.where(up, c, lo)
            hi = np.where(up, hi, c)
        t = 0.5 * (lo + hi)
        cand = np.stack([sm * t - wf.phi(t), sm * lo - wf.phi(lo), sm * hi - wf.phi(hi)])
        out[mid] = cand.max(axis=0)
    if s_arr.ndim == 0:
        return float(out[0])
    return out.reshape(s_arr.shape)


def young_conjugate_scalar(wf: WeightFunction, s: float) -> float:
    """Bounded golden-section/Brent search, used as an independent oracle."""
    if s > float(wf.dphi(np.array(T_CEIL))):
        return INF
    res = optimize.minimize_scalar(lambda t: -(s * t - float(wf.phi(np.array(t)))),
                                   bounds=(0.0, T_CEIL), method="bounded",
                                   options={"xatol": 1e-10})
    cands = [-res.fun, -float(wf.phi(np.array(0.0))), s * T_CEIL - float(wf.phi(np.array(T_CEIL)))]
    return float(max(cands))


def gevrey_conjugate_closed(s: float, sig: float = 2.0) -> float:
    """phi(t) = e^{t/sig}: phi*(s) = sig s log(sig s) - sig s if sig s >= 1, else -1."""
    if sig * s >= 1:
        return sig * s * math.log(sig * s) - sig * s
    return -1.0


def classical_conjugate_closed(s: float) -> float:
    if s > 1:
        return INF
    if s == 1:
        return 0.0
    if s < 0.5:
        return -math.log(2.0)
    return s * math.log(s) + (1 - s) * math.log(1 - s)


def biconjugate_gap(wf: WeightFunction, ts) -> float:
    """max |phi**(t) - phi(t)| over the given t >= 0.

    phi** is maximised over s in [0, min(2 phi'(max t) + 1, phi'(T_CEIL))], which
    contains the supporting slopes of every sample point and keeps phi* finite.
    """
    ts = np.asarray(ts, dtype=float)
    S = min(2.0 * float(wf.dphi(np.array(ts.max()))) + 1.0, float(wf.dphi(np.array(T_CEIL))))
    gap = 0.0
    for t in ts:
        f = lambda s: -(s * t - young_conjugate(wf, s))
        res = optimize.minimize_scalar(f, bounds=(0.0, S), method="bounded", options={"xatol": 1e-12})
        slope = float(wf.dphi(np.array(t)))
        vals = [-res.fun, -f(0.0)]
        if slope <= S:
            vals.append(-f(slope))
        gap = max(gap, abs(max(vals) - float(wf.phi(np.array(t)))))
    return gap


# conditions on omega --------------------------------------------------------------

@dataclass
class ConditionReport:
    weight: str
    t_max: float
    samples: int
    monotone: bool
    alpha: bool
    L: float
    beta: bool
    beta_integral: float
    gamma: bool
    a: float
    b: float
    delta: bool
    delta_min: float
    D: float
    witnesses: dict = field(default_factory=dict)

    @property
    def all_pass(self) -> bool:
        return self.monotone and self.alpha and self.beta and self.gamma and self.delta

    def to_json(self) -> dict:
        d = asdict(self)
        d["all_pass"] = self.all_pass
        return d

    def recheck(self, wf: WeightFunction) -> bool:
        """Re-verify the fitted constants on the sample ladder."""
        t = _ladder(self.t_max, self.samples)
        w = wf.omega(t)
        ok = np.all(wf.omega(2 * t) <= self.L * (w + 1) * (1 + 1e-12))
        ok &= np.all(wf.omega(math.e * t) <= self.D * (w + 1) * (1 + 1e-12))
        ok &= np.all(w >= self.a + self.b * np.log1p(t) - 1e-12)
        return bool(ok)


def _ladder(t_max: float, samples: int) -> np.ndarray:
    return np.concatenate([[0.0], np.geomspace(1e-3, t_max, samples - 1)])


def check_conditions(wf: WeightFunction, t_max: float = 1e4, samples: int = 2000) -> ConditionReport:
    """Fit witnesses for (alpha)-(delta) and the constant D of omega(e t) <= D (omega(t) + 1)."""
    if t_max < 1e3 or samples < 1e3:
        raise ValueError("need t_max >= 1e3 and samples >= 1e3")
    t = _ladder(t_max, samples)
    w = wf.omega(t)
    wit: dict = {}

    dw = np.diff(w)
    monotone = bool(np.all(dw >= -1e-12 * np.maximum(1, np.abs(w[1:]))) and w[0] >= 0)
    if not monotone:
        wit["monotone"] = float(t[1 + int(np.argmin(dw))])

    # L and D are suprema over all t >= 0; the far ladder reaches e^700, the
    # range on which phi* is resolved, so slowly saturating ratios are not underestimated
    far = np.concatenate([t, np.exp(np.linspace(math.log(t_max), T_CEIL, 400))])
    with np.errstate(over="ignore", invalid="ignore"):
        wfar = wf.omega(far)
        ratio = wf.omega(2 * far) / (wfar + 1)
        ratio_e = wf.omega(math.e * far) / (wfar + 1)
    L = float(np.nanmax(ratio))
    D = float(np.nanmax(ratio_e))
    # bounded iff the growth per decade of the ratio dies out
    dec = [float(np.nanmax(ratio[(far >= t_max * 10.0**k) & (far < t_max * 10.0**(k + 1))]))
           for k in range(-2, 2)]
    g1, g2, g3 = dec[1] - dec[0], dec[2] - dec[1], dec[3] - dec[2]
    # t^(1/s) has increments shrinking by 10^(-1/s) per decade; the far end catches s beyond ~20
    tail = ratio[-100:]
    saturated = bool(np.nanmax(tail) - np.nanmin(tail) <= 1e-4 * L) if math.isfinite(L) else False
    alpha = bool(math.isfinite(L) and (g3 <= 1e-2 * dec[3] or (g3 <= 0.9 * g2 and g2 <= 0.9 * g1) or saturated))
    if not alpha:
        wit["alpha"] = float(far[int(np.nanargmax(ratio))])

    # (beta): int_1^T omega/t^2 in log variables plus the analytic (or fitted power-law) tail
    body, _ = integrate.quad(lambda u: float(wf.omega(np.exp(u))) * math.exp(-u), 0.0, math.log(t_max), limit=400)
    if wf.tail is not None and not wf.normalized:
        tail = wf.tail(t_max)
    else:
        hi = np.geomspace(t_max / 10, t_max, 50)
        lw = np.log(np.maximum(wf.omega(hi), 1e-300))
        p = float(np.polyfit(np.log(hi), lw, 1)[0])
        tail = INF if p >= 1 - 1e-3 else float(wf.omega(np.array(t_max))) / t_max / (1 - p)
        if p >= 1 - 1e-3:
            wit["beta"] = {"t": t_max, "local_exponent": p}
    beta_int = body + tail
    beta = math.isfinite(beta_int)

    pos = t >= 1
    ratio_g = w[pos] / np.log1p(t[pos])
    b = float(min(1.0, ratio_g[t[pos] >= np.sqrt(t_max)].min()))
    a = float(np.min(w - b * np.log1p(t)))
    gamma = b > 0
    if not gamma:
        wit["gamma"] = float(t[pos][int(np.argmin(ratio_g))])

    u = np.linspace(-5.0, math.log(t_max), samples)
    ph = wf.phi(u)
    d2 = ph[2:] - 2 * ph[1:-1] + ph[:-2]
    scale = np.maximum(1.0, np.abs(ph[1:-1]))
    delta_min = float(np.min(d2 / scale))
    delta = delta_min >= -1e-12
    if not delta:
        wit["delta"] = float(np.exp(u[1 + int(np.argmin(d2 / scale))]))

    return ConditionReport(wf.id, t_max, samples, monotone, alpha, L, beta, beta_int, gamma, a, b,
                           delta, delta_min, D, wit)


# inequality lemmas ------------------------------------------------------------------

SLACK = 1e-9


@dataclass
class LemmaReport:
    lemma: str
    weight: str
    trials: int
    seed: int
    violations: int
    worst_excess: float
    worst_case: dict | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_json(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def check_lemma_lt(wf: WeightFunction, trials: int = 10_000, seed: int = 0,
                   a: float | None = None, b: float | None = None, j_max: int = 400,
                   t_max: float = 1e4) -> LemmaReport:
    """Randomised check of t^k e^{-lam omega(t)} <= e^{lam phi*(k/lam)} and of

    inf_j t^{-j} e^{lam phi*(j/lam)} <= e^{-(lam - 1/b) omega(t) - a/b}, in log form.
    """
    if a is None or b is None:
        rep = check_conditions(wf)
        a, b = rep.a, rep.b
    rng = np.random.default_rng(seed)
    t = np.exp(rng.uniform(0.0, math.log(t_max), trials))
    k = rng.integers(0, 61, trials)
    lam = np.exp(rng.uniform(math.log(0.1), math.log(10.0), trials))
    lt = np.log(t)
    om = wf.omega(t)

    with np.errstate(invalid="ignore"):
        lhs1 = k * lt - lam * om
        rhs1 = lam * young_conjugate(wf, k / lam)
    ex1 = np.where(np.isinf(rhs1), -INF, lhs1 - rhs1)

    js = np.arange(j_max + 1)
    lhs2 = np.empty(trials)
    for lo in range(0, trials, 500):
        sl = slice(lo, lo + 500)
        ps = young_conjugate(wf, js[None, :] / lam[sl, None])
        with np.errstate(invalid="ignore"):
            v = -js[None, :] * lt[sl, None] + lam[sl, None] * ps
        lhs2[sl] = np.min(v, axis=1)
    rhs2 = -(lam - 1.0 / b) * om - a / b
    ex2 = lhs2 - rhs2

    ex = np.maximum(ex1, ex2)
    bad = ex > SLACK
    worst = int(np.argmax(ex))
    return LemmaReport(
        "lt", wf.id, trials, seed, int(bad.sum()), float(ex[worst]),
        {"t": float(t[worst]), "k": int(k[worst]), "lambda": float(lam[worst]),
         "part": "i" if ex1[worst] >= ex2[worst] else "ii"},
        notes=[f"infimum over j <= {j_max}", f"t sampled log-uniformly in [1, {t_max:g}]"],
    )


def rho_lemma_constants(D: float, rho: float, lam: float) -> tuple[float, float]:
    """(log Lambda, lambda') for the rho-absorption inequality."""
    n = math.floor(math.log(rho) + 1)
    return lam * n, lam / D**n


def check_rho_lemma(wf: WeightFunction, rho: float, lam: float, j_max: int = 200,
                    D: float | None = None) -> LemmaReport:
    """rho^j e^{lam phi*(j/lam)} <= Lambda e^{lam' phi*(j/lam')} for j = 0..j_max."""
    if D is None:
        D = check_conditions(wf).D
    logL, lam2 = rho_lemma_constants(D, rho, lam)
    j = np.arange(j_max + 1)
    lhs = j * math.log(rho) + lam * young_conjugate(wf, j / lam)
    rhs = logL + lam2 * young_conjugate(wf, j / lam2)
    with np.errstate(invalid="ignore"):
        ex = np.where(np.isinf(lhs) & np.isinf(rhs), -INF, lhs - rhs)
    bad = np.nonzero(ex > SLACK)[0]
    worst = int(np.argmax(ex))
    return LemmaReport("rho", wf.id, j_max + 1, 0, len(bad), float(ex[worst]),
                       {"j": int(bad[0]) if len(bad) else None, "rho": rho, "lambda": lam,
                        "lambda_prime": lam2, "log_Lambda": logL, "D": D})


def check_rho_lemma_random(wf: WeightFunction, trials: int = 10_000, seed: int = 0,
                           j_max: int = 200) -> LemmaReport:
    """Randomised (rho in [1, 20], lambda in [0.1, 10], j <= j_max) version."""
    D = check_conditions(wf).D
    rng = np.random.default_rng(seed)
    rho = np.exp(rng.uniform(0.0, math.log(20.0), trials))
    lam = np.exp(rng.uniform(math.log(0.1), math.log(10.0), trials))
    j = rng.integers(0, j_max + 1, trials)
    n = np.floor(np.log(rho) + 1)
    lam2 = lam / D**n
    lhs = j * np.log(rho) + lam * young_conjugate(wf, j / lam)
    rhs = lam * n + lam2 * young_conjugate(wf, j / lam2)
    with np.errstate(invalid="ignore"):
        ex = np.where(np.isinf(lhs) & np.isinf(rhs), -INF, lhs - rhs)
    worst = int(np.argmax(ex))
    return LemmaReport("rho", wf.id, trials, seed, int(np.sum(ex > SLACK)), float(ex[worst]),
                       {"rho": float(rho[worst]), "lambda": float(lam[worst]), "j": int(j[worst]), "D": D},
                       notes=["rho sampled in [1, 20]"])


def check_factorial_bound(wf: WeightFunction, lam: float, n_max: int = 100) -> dict:
    """log C = max_n [log n! - lam phi*(n/lam)] over n with finite phi*."""
    n = np.arange(n_max + 1)
    ps = young_conjugate(wf, n / lam)
    finite = np.isfinite(ps)
    terms = np.where(finite, special.gammaln(n + 1) - lam * np.where(finite, ps, 0.0), -INF)
    i = int(np.argmax(terms))
    logC = float(terms[i])
    return {"weight": wf.id, "lambda": lam, "n_max": n_max, "log_C": logC,
            "C": math.exp(logC) if logC < 700 else INF, "argmax_n": i,
            "finite_terms": int(finite.sum()), "passed": math.isfinite(logC),
            "at_edge": i == n_max}
