import math

import numpy as np
import pytest

from wigcohen.algebra import D1, D2, M1, M2, KernelSpec, symbol_of, tilde_transform
from wigcohen.dsl import op
from wigcohen.gallery import (TWISTED, HypoParams, build, catalog, green_bound, hypo_check, twisted_green,
                              twisted_green_k0, twisted_green_u, twisted_residual, twisted_solve)
from wigcohen.grid import Grid2
from wigcohen.poly import ETA, XI, Poly

V = [Poly.var(i, 4) for i in range(4)]


def gauss(N, L, cx=0.0):
    return Grid2.sample(lambda x, y: np.exp(-((x - cx) ** 2 + y * y) / 2), N, L)


# hypoellipticity


@pytest.mark.parametrize("seed", range(5))
def test_twisted_symbol_has_witness(seed):
    v = hypo_check(TWISTED, HypoParams(m_prime=2.0, seed=seed, density=300))
    assert v.violated
    p = v.witness["point"]
    pt = np.array([p["x"], p["y"], p["xi"], p["eta"]])
    assert v.witness["abs_a"] < 1e-9 * (1 + pt @ pt) ** 1.0
    assert p["xi"] == pytest.approx(p["y"] / 2, abs=1e-9)
    assert p["eta"] == pytest.approx(-p["x"] / 2, abs=1e-9)


def test_harmonic_symbol_bound():
    a = V[0] ** 2 + V[1] ** 2 + V[2] ** 2 + V[3] ** 2
    v = hypo_check(a, HypoParams(m_prime=2.0, B=math.sqrt(2), radii=(1.5, 2.0, 4.0, 8.0)))
    assert not v.violated
    assert all(s["c"] >= 0.5 for s in v.c_per_shell)
    assert "not a proof" in v.text


def test_shifted_twisted_symbol():
    v = hypo_check(symbol_of(TWISTED) + 1, HypoParams(m_prime=0.0))
    assert not v.violated
    assert all(s["c"] >= 1 - 1e-9 for s in v.c_per_shell)


def test_derivative_ratio_reported():
    a = V[0] ** 2 + V[1] ** 2 + V[2] ** 2 + V[3] ** 2 + 1
    v = hypo_check(a, HypoParams(m_prime=2.0, deriv_order=2, radii=(1.0, 4.0, 16.0)))
    Cs = [d["C"] for d in v.deriv_C_per_shell]
    assert len(Cs) == 3 and max(Cs) < 10


def test_hypo_params_validation():
    with pytest.raises(ValueError):
        HypoParams(rho=0.0)
    with pytest.raises(ValueError):
        HypoParams(radii=(2.0, 1.0))
    with pytest.raises(ValueError):
        HypoParams(B=4.0, radii=(2.0, 8.0))


# Green function


def test_green_matches_bessel_and_substitution():
    rs = np.linspace(0.1, 5.0, 50)
    for r in rs:
        g = twisted_green(r)
        assert abs(g - twisted_green_u(r)) < 1e-10
        assert abs(g - float(twisted_green_k0(r))) < 1e-10


def test_green_monotone():
    vals = [twisted_green(r) for r in np.arange(0.1, 5.01, 0.1)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_green_rejects_origin():
    with pytest.raises(ValueError):
        twisted_green(0.0)


def test_green_bound_default_rate():
    gb = green_bound(c=0.1, s=2.0)
    assert gb.violations == 0
    # a rate above 1/4 cannot hold with any constant on a long enough range
    assert green_bound(c=0.3, s=2.0, r_max=30.0, n_fit=50, n_check=200).C > 1e3


# solver


def test_solver_residual_small():
    f = gauss(64, 8.0)
    assert twisted_residual(f) <= 1e-2


def test_solver_linear():
    f1, f2 = gauss(32, 8.0), gauss(32, 8.0, cx=1.0)
    lhs = twisted_solve(f1 + f2)
    rhs = twisted_solve(f1) + twisted_solve(f2)
    assert np.max(np.abs(lhs.values - rhs.values)) < 1e-12


def test_solver_guard_and_meta():
    with pytest.raises(ValueError):
        twisted_solve(gauss(256, 8.0))
    u = twisted_solve(gauss(16, 8.0))
    assert u.meta["centre_weight"] > 0


def test_solution_decay_is_stable():
    sups = []
    # sup of e^{omega_0(z)/2} |u| for the classical weight, at roughly equal spacing
    for N, L in ((64, 8.0), (128, 12.0)):
        f = gauss(N, L)
        u = twisted_solve(f)
        X, Y = u.mesh()
        sups.append(float(np.max(np.sqrt(1 + np.hypot(X, Y)) * np.abs(u.values))))
    assert sups[1] == pytest.approx(sups[0], rel=0.05)


# catalog


def test_catalog_entries_reproduce_transforms():
    for ex in catalog():
        assert ex.check(), ex.name
        assert ex.roundtrip(), ex.name


def test_ho3_zero_is_transform_of_oscillator():
    ex = build("HO3", Q="0", R="0")
    assert ex.form == (M1 - D2) ** 2 + M2**2
    assert ex.form == tilde_transform(M1 * M1 + D1 * D1, KernelSpec(0.5 * XI * ETA))


def test_ho1_zero():
    assert build("HO1", P="0").form == tilde_transform(op("x^2 + Dx^2"), KernelSpec())


def test_ho3_with_q_and_r():
    ex = build("HO3", Q="Dx^3", R="Dy^2")
    assert ex.form == (M1 - D2 + D1**3) ** 2 + (M2 + D2**2) ** 2
    assert ex.check()


@pytest.mark.parametrize("name, params", [
    ("HO1", {"P": "xi^3 - eta^2 + xi*eta"}),
    ("HO2", {"Q": "2*Dx^2 - Dx", "R": "Dy^3"}),
    ("ex1", {"b": "x^2 + 1", "P": "Dx^2 - 3*Dy"}),
    ("airy", {"alpha": 2 - 1j, "m": 3, "P": "xi*eta/2 + xi^2"}),
])
def test_parametrized_entries(name, params):
    assert build(name, **params).check()


def test_airy_condition():
    ex = build("airy", alpha=1j, m=1)
    assert ex.condition["satisfied"] and ex.condition["value"] == 1.0
    assert not build("airy", alpha=-1j, m=1).condition["satisfied"]
    with pytest.raises(ValueError):
        build("airy", m=0)


def test_builder_validation():
    with pytest.raises(ValueError):
        build("ex1", b="x + y")
    with pytest.raises(ValueError):
        build("HO2", Q="Dy")
    with pytest.raises(ValueError):
        build("HO2", Q="i*Dx")
    with pytest.raises(KeyError):
        build("nope")
