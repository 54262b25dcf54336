import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wigcohen.poly import Poly
from wigcohen.polygauss import PolyGauss
from wigcohen.seminorms import Rational, log_abs_poly, seminorm
from wigcohen.weights import classical, gevrey

X, Y = Poly.var(0, 2), Poly.var(1, 2)
G = PolyGauss.gaussian()


@pytest.fixture(autouse=True)
def _quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        yield


@given(st.floats(-50, 50), st.floats(-50, 50))
def test_log_abs_poly(x, y):
    p = X**3 - 2 * X * Y + 5
    v = abs(p(x, y))
    if v > 1e-8:
        assert log_abs_poly(p, x, y) == pytest.approx(math.log(v), abs=1e-9)


def test_log_abs_poly_no_overflow():
    assert np.isfinite(log_abs_poly(X**40, 1e200, 0.0))


def test_rational_derivative():
    r = Rational.decoy()
    h = 1e-6
    for i, (x, y) in enumerate([(0.3, 0.2), (1.5, -0.7)]):
        for axis in (0, 1):
            e = np.eye(2)[axis] * h
            fd = (r(x + e[0], y + e[1]) - r(x - e[0], y - e[1])) / (2 * h)
            assert abs(r.D(axis)(x, y) - (-1j) * fd) < 1e-8


def test_gaussian_values():
    rep = seminorm(G, classical(), 3, lam=1.0)
    # sup (1 + |x|) e^{-|x|^2/2} is attained at |x| = (sqrt 5 - 1)/2
    r = (math.sqrt(5) - 1) / 2
    assert rep.entries[0]["value"] == pytest.approx((1 + r) * math.exp(-r * r / 2), rel=2e-3)
    assert rep.verdict == "stabilized"


@pytest.mark.parametrize("system", [1, 2, 3, 4, 5, 6])
def test_every_system_stabilizes_gaussian(system):
    rep = seminorm(G, gevrey(2.0), system, lam=1.0, K=10)
    assert rep.verdict == "stabilized", rep.notes


@pytest.mark.parametrize("system", [1, 3, 6])
def test_decoy_grows_for_gevrey(system):
    assert seminorm(Rational.decoy(), gevrey(2.0), system, lam=1.0, K=12).verdict == "grow"


def test_decoy_classical_large_lambda_grows():
    assert seminorm(Rational.decoy(), classical(), 3, lam=5.0).verdict == "grow"
    assert seminorm(Rational.decoy(), classical(), 6, lam=5.0, K=20).verdict == "grow"


def test_grid_input():
    g = PolyGauss.gaussian(X).on_grid(128, 12.0)
    rep = seminorm(g, classical(), 1, lam=1.0, K=4)
    assert rep.verdict == "stabilized"
    with pytest.raises(ValueError):
        seminorm(g, classical(), 1, K=9)


def test_argument_checks():
    with pytest.raises(ValueError):
        seminorm(G, classical(), 7)
    with pytest.raises(ValueError):
        seminorm(G, classical(), 6, K=41)


def test_report_csv(tmp_path):
    rep = seminorm(G, classical(), 6, lam=1.0, K=3)
    p = tmp_path / "s.csv"
    rep.to_csv(p)
    lines = p.read_text().splitlines()
    assert lines[0] == "alpha,beta,value"
    assert len(lines) == 1 + len(rep.entries)
    assert rep.to_json()["system"] == 6
