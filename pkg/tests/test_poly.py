import numpy as np
import pytest
from hypothesis import given, strategies as st

from wigcohen.poly import ETA, XI, Poly

polys = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)),
                        st.integers(-3, 3), max_size=5).map(lambda d: Poly(2, d))


@given(polys, polys, st.floats(-2, 2), st.floats(-2, 2))
def test_ring_ops_agree_with_evaluation(p, q, x, y):
    assert np.isclose((p * q)(x, y), p(x, y) * q(x, y))
    assert np.isclose((p + q)(x, y), p(x, y) + q(x, y))
    assert np.isclose((p - q)(x, y), p(x, y) - q(x, y))


@given(polys)
def test_integrate_then_diff(p):
    for i in (0, 1):
        assert p.integrate(i).diff(i) == p


def test_diff_example():
    p = XI**3 * ETA + 2 * ETA
    assert p.diff(0) == 3 * XI**2 * ETA
    assert p.diff(1) == XI**3 + 2


def test_degree_and_zero():
    assert Poly(2).is_zero and Poly(2).degree == 0
    assert (XI**2 * ETA).degree == 3
    assert (XI - XI).is_zero


def test_compose_numbers():
    p = XI**2 + 3 * ETA
    assert p.compose([2.0, 1.0]) == 7.0


def test_json_roundtrip():
    p = 0.5 * XI * ETA - 1j * ETA**2
    assert Poly.from_json(p.to_json()) == p


def test_call_arity():
    with pytest.raises(TypeError):
        XI(1.0)


def test_real_flag():
    assert (XI + 2).is_real
    assert not (1j * XI).is_real
