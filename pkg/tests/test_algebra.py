import pytest
from hypothesis import given, strategies as st

from oracles import rewrite_product
from wigcohen.algebra import (D1, D2, ID, M1, M2, KernelError, KernelSpec, WeylOp, a_of_q, bar_transform,
                              check_nonvanishing, normal_mul, symbol_of, tilde_transform, wig_pushforward)
from wigcohen.dsl import op
from wigcohen.poly import ETA, XI, Poly

GENS = (M1, M2, D1, D2)

coef = st.sampled_from([1, -1, 2, 0.5, 1j, -2j, 1 + 1j])
keys = st.tuples(*(st.integers(0, 2) for _ in range(4)))
weylops = st.dictionaries(keys, coef, max_size=3).map(WeylOp)
small_polys = st.dictionaries(st.tuples(st.integers(0, 2), st.integers(0, 2)),
                              st.sampled_from([1.0, -1.0, 0.5, 2.0]), max_size=3).map(lambda d: Poly(2, d))


def comm(a, b):
    return a * b - b * a


def test_canonical_commutators():
    assert comm(D1, M1) == WeylOp.identity(-1j)
    assert comm(D2, M2) == WeylOp.identity(-1j)
    for a, b in [(M1, M2), (D1, D2), (M1, D2), (M2, D1)]:
        assert comm(a, b).is_zero


def test_reordering_example():
    # D1^2 M1 = M1 D1^2 - 2i D1
    assert D1 * D1 * M1 == M1 * D1 * D1 - 2j * D1


@given(weylops, weylops)
def test_normal_mul_matches_rewriting(a, b):
    assert normal_mul(a, b) == rewrite_product(a, b)


@given(weylops, weylops, weylops)
def test_associative(a, b, c):
    assert ((a * b) * c).close_to(a * (b * c), 1e-9)


@given(weylops, weylops)
def test_distributive(a, b):
    assert (a + b) * M1 == a * M1 + b * M1


def test_constructor_validation():
    with pytest.raises(ValueError):
        WeylOp({(1, 0, 0): 1})
    with pytest.raises(ValueError):
        WeylOp({(-1, 0, 0, 0): 1})
    assert WeylOp({(1, 0, 0, 0): 0}).is_zero


def test_json_roundtrip():
    B = op("x^2*Dy - i*y*Dx + 3")
    assert WeylOp.from_json(B.to_json()) == B


def test_pushforward_of_generators():
    assert wig_pushforward(D2) == M2 - M1
    assert wig_pushforward(M1) == 0.5 * (M1 + M2)
    assert wig_pushforward(M2) == 0.5 * (D1 - D2)
    assert wig_pushforward(D1) == D1 + D2


def test_tilde_examples():
    assert tilde_transform(M1, KernelSpec(0.5 * XI * ETA)) == M1 - D2
    assert tilde_transform(M1, KernelSpec()) == M1 - 0.5 * D2


def test_tilde_inverts_pushforward_at_zero_phase():
    B = op("x^2*Dy + y*Dx^2 - 3*x")
    assert tilde_transform(wig_pushforward(B), KernelSpec()) == B


@given(weylops, weylops, small_polys)
def test_transforms_are_homomorphisms(a, b, P):
    ker = KernelSpec(P)
    for T in (lambda B: tilde_transform(B, ker), lambda B: bar_transform(B, ker), wig_pushforward):
        assert T(a * b).close_to(T(a) * T(b), 1e-8)


@given(small_polys)
def test_images_keep_commutation_relations(P):
    ker = KernelSpec(P)
    x1, x2, y1, y2 = (tilde_transform(g, ker) for g in GENS)
    assert comm(y1, x1).close_to(WeylOp.identity(-1j))
    assert comm(y2, x2).close_to(WeylOp.identity(-1j))
    assert comm(x1, x2).is_zero and comm(y1, y2).is_zero


def test_a_of_q():
    assert a_of_q(Poly.const(1.0, 2)) == ID
    assert a_of_q(XI) == D1 + D2
    assert a_of_q(ETA) == M2 - M1


def test_kernel_validation():
    with pytest.raises(ValueError):
        KernelSpec(Poly(2, {(1, 0): 1j}))
    with pytest.raises(ValueError):
        KernelSpec(q=Poly(2))
    with pytest.raises(KernelError):
        KernelSpec(q=XI**2 - 1).validate()
    with pytest.raises(KernelError):
        check_nonvanishing(XI * ETA + 1)
    assert check_nonvanishing(XI**2 + ETA**2 + 1) >= 1 - 1e-9


def test_symbol_of():
    s = symbol_of(op("x*Dy + 2"))
    assert s.nvars == 4 and s.terms == {(1, 0, 0, 1): 1, (0, 0, 0, 0): 2}
