"""Acceptance criteria 1-12.  Each test prints one PASS/FAIL line (also echoed in the summary).

Run alone with ``pytest tests/test_acceptance.py -v``; the lines appear in the
"acceptance criteria" section at the end of the session.
"""

import json
import math
import subprocess
import sys
import time
import warnings

import numpy as np
import pytest

from oracles import rewrite_product
from wigcohen.algebra import D1, D2, M1, M2, KernelSpec, WeylOp, normal_mul, tilde_transform
from wigcohen.cohen import cohen_q
from wigcohen.gallery import (TWISTED, green_bound, hypo_check, twisted_residual, twisted_solve)
from wigcohen.grid import Grid2
from wigcohen.poly import ETA, XI, Poly
from wigcohen.polygauss import PolyGauss, cohen_q_exact
from wigcohen.seminorms import Rational, seminorm
from wigcohen.verify import (STANDARD_FACTORS, STANDARD_FUNCTIONS, STANDARD_PHASES, MatrixConfig,
                             grid_for, run_suite)
from wigcohen.weights import (biconjugate_gap, builtin_weights, check_lemma_lt, check_rho_lemma_random,
                              classical, gevrey, gevrey_conjugate_closed, young_conjugate)

TOL = 1e-6


def _worst(reps):
    w = max(reps, key=lambda r: r.rel_residual)
    return w.rel_residual, f"{w.name} {w.operator} P={w.P} q={w.q} w={w.w}"


def test_c01_normal_mul_matches_rewrite_oracle(criterion):
    t0 = time.perf_counter()
    gens = (M1, M2, D1, D2)
    mism = 0
    pairs = 0
    for g in gens:
        for a in range(5):
            for h in gens:
                for b in range(5):
                    x, y = g**a, h**b
                    pairs += 1
                    if normal_mul(x, y) != rewrite_product(x, y):
                        mism += 1
    dt = time.perf_counter() - t0
    ok = mism == 0 and dt < 5
    criterion(1, ok, f"{pairs} generator-power pairs, {mism} mismatches, {dt:.2f}s")
    assert ok


def test_c02_wigner_pushforward_identity(criterion):
    reps = run_suite("wig-constcoef", MatrixConfig(N=256, L=12.0, auto_grid=False))
    worst, where = _worst(reps)
    ok = worst <= TOL and len(reps) == 9
    criterion(2, ok, f"{len(reps)} cases, worst rel residual {worst:.2e} ({where})")
    assert ok


@pytest.mark.slow
def test_c03_bar_and_tilde_identities(criterion):
    t0 = time.perf_counter()
    reps = run_suite("cohen", MatrixConfig())
    dt = time.perf_counter() - t0
    worst, where = _worst(reps)
    ok = worst <= TOL and len(reps) == 180 and dt < 120
    criterion(3, ok, f"{len(reps)} cases (90 per identity), worst {worst:.2e} ({where}), {dt:.0f}s")
    assert ok


@pytest.mark.slow
def test_c04_sigma1_identity(criterion):
    reps = run_suite("sigma1", MatrixConfig())
    worst, where = _worst(reps)
    ok = worst <= TOL and len(reps) == 45 and all(r.q == "xi^2+eta^2+1" for r in reps)
    criterion(4, ok, f"{len(reps)} cases with q = xi^2+eta^2+1, worst {worst:.2e} ({where})")
    assert ok


def test_c05_exact_vs_grid_quadratic_phases(criterion):
    worst = 0.0
    n = 0
    for P in STANDARD_PHASES.values():
        if P.degree != 2:
            continue
        for q in STANDARD_FACTORS.values():
            ker = KernelSpec(P, q)
            N, L = grid_for(ker)
            for w in STANDARD_FUNCTIONS.values():
                G = cohen_q(w.on_grid(N, L), ker)
                X, Y = G.mesh()
                box = (np.abs(X) <= 6) & (np.abs(Y) <= 6)
                E = cohen_q_exact(w, ker)(X[box], Y[box])
                worst = max(worst, float(np.max(np.abs(G.values[box] - E))))
                n += 1
    ok = worst <= 1e-8
    criterion(5, ok, f"{n} kernel/function pairs, sup |grid - exact| on |x|,|y| <= 6 is {worst:.2e}")
    assert ok


def test_c06_symbolic_harmonic_oscillator(criterion):
    B = M1 * M1 + D1 * D1
    t0 = tilde_transform(B, KernelSpec())
    t1 = tilde_transform(B, KernelSpec(0.5 * XI * ETA))
    e0 = (M1 - 0.5 * D2) ** 2 + (M2 + 0.5 * D1) ** 2
    e1 = (M1 - D2) ** 2 + M2**2
    ok = t0 == e0 and t1 == e1
    criterion(6, ok, f"P=0: {'equal' if t0 == e0 else 'differs'}; P=xi*eta/2: {'equal' if t1 == e1 else 'differs'}")
    assert ok


def test_c07_young_conjugate(criterion):
    s = np.linspace(0, 20, 401)
    g = gevrey(2.0)
    num = young_conjugate(g, s)
    closed = np.array([gevrey_conjugate_closed(v, 2.0) for v in s])
    err = float(np.max(np.abs(num - closed)))
    ts = np.linspace(0, 20, 81)
    gaps = {wf.id: biconjugate_gap(wf, ts) for wf in builtin_weights()}
    above = young_conjugate(classical(), np.array([1.0 + 1e-12, 1.001, 1.5, 3.0, 50.0]))
    inf_ok = bool(np.all(np.isposinf(above)))
    ok = err <= 1e-8 and max(gaps.values()) <= 1e-6 and inf_ok
    gtxt = ", ".join(f"{k} {v:.1e}" for k, v in gaps.items())
    criterion(7, ok, f"gevrey:2 closed-form error {err:.1e}; biconjugate gaps {gtxt}; "
                     f"classical +inf above 1: {inf_ok}")
    assert ok


@pytest.mark.slow
def test_c08_randomized_inequality_checks(criterion):
    parts = []
    ok = True
    for wf in builtin_weights():
        lt = check_lemma_lt(wf, trials=10_000, seed=2024)
        rho = check_rho_lemma_random(wf, trials=10_000, seed=2024)
        ok &= lt.violations == 0 and rho.violations == 0
        parts.append(f"{wf.id} lt {lt.violations}/rho {rho.violations}")
    criterion(8, ok, "violations beyond 1e-9 over 10^4 trials: " + "; ".join(parts))
    assert ok


@pytest.mark.slow
def test_c09_seminorm_verdict_agreement(criterion):
    funcs = {"gaussian": PolyGauss.gaussian(), "x*gaussian": PolyGauss.gaussian(Poly.var(0, 2)),
             "decoy": Rational.decoy()}
    disagree = []
    verdicts = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for wf in (classical(), gevrey(2.0)):
            for name, u in funcs.items():
                for lam in (0.5, 1.0, 2.0):
                    v3 = seminorm(u, wf, 3, lam).verdict
                    v6 = seminorm(u, wf, 6, lam, K=20).verdict
                    verdicts[(wf.id, name, lam)] = v3
                    if v3 != v6:
                        disagree.append(f"{wf.id}/{name}/{lam}")
    grows = sum(v == "grow" for v in verdicts.values())
    ok = not disagree
    criterion(9, ok, f"18 combinations, {len(disagree)} disagreements, {grows} 'grow' verdicts"
                     + (f" ({', '.join(disagree)})" if disagree else ""))
    assert ok


@pytest.mark.slow
def test_c10_twisted_laplacian(criterion):
    v = hypo_check(TWISTED)
    f64 = Grid2.sample(lambda x, y: np.exp(-(x * x + y * y) / 2), 64, 8.0)
    r64 = twisted_residual(f64)
    t0 = time.perf_counter()
    f128 = Grid2.sample(lambda x, y: np.exp(-(x * x + y * y) / 2), 128, 8.0)
    r128 = twisted_residual(f128, twisted_solve(f128))
    dt = time.perf_counter() - t0
    ok = v.violated and r64 <= 1e-2 and r128 < r64 and dt < 180
    criterion(10, ok, f"witness |a| = {v.witness['abs_a'] if v.witness else 'none'}; residual N=64 {r64:.2e}, "
                      f"N=128 {r128:.2e}; N=128 solve {dt:.1f}s")
    assert ok


def test_c11_green_function_bound(criterion):
    gb = green_bound(c=0.1, s=2.0, r_min=0.05, r_max=6.0)
    ok = gb.violations == 0 and math.isfinite(gb.C)
    criterion(11, ok, f"fitted C = {gb.C:.6g}, {gb.violations} violations over {gb.checked} radii in [0.05, 6]")
    assert ok


@pytest.mark.slow
def test_c12_cli_determinism(criterion, tmp_path):
    cmd = [sys.executable, "-m", "wigcohen.cli", "verify", "--suite", "all", "--seed", "7", "--no-timestamp"]
    a = subprocess.run(cmd, capture_output=True, timeout=900)
    b = subprocess.run(cmd, capture_output=True, timeout=900)
    same = a.stdout == b.stdout and len(a.stdout) > 0
    doc = json.loads(a.stdout) if a.stdout else {}
    ok = same and a.returncode == 0 and b.returncode == 0 and doc.get("config", {}).get("seed") == 7
    criterion(12, ok, f"two runs: {len(a.stdout)} bytes, identical={same}, exit codes {a.returncode}/{b.returncode}")
    assert ok
