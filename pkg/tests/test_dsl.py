import pytest
from hypothesis import given, strategies as st

from wigcohen.algebra import D1, D2, M1, M2, WeylOp
from wigcohen.dsl import (DSLError, ExponentError, ModeError, ParseError, UnknownIdentifier, format_op,
                          format_poly, op, parse_poly2)
from wigcohen.poly import ETA, XI, Poly


@pytest.mark.parametrize("text, expected", [
    ("x", M1),
    ("Dx*x", M1 * D1 - 1j),
    ("(Dx - y/2)^2", D1 * D1 - M2 * D1 + 0.25 * M2 * M2),
    ("-2*i*Dy", -2j * D2),
    ("x^2^2", M1**4),
    ("3 - x + 0.5*Dy", WeylOp.identity(3) - M1 + 0.5 * D2),
])
def test_parse_examples(text, expected):
    assert op(text) == expected


@pytest.mark.parametrize("text, err, offset", [
    ("x +", ParseError, 3),
    ("x ** y", ParseError, 3),
    ("z*x", UnknownIdentifier, 0),
    ("x^-1", ExponentError, 2),
    ("xi + x", ModeError, 0),
    ("(x", ParseError, 2),
])
def test_parse_errors_carry_location(text, err, offset):
    with pytest.raises(err) as ei:
        op(text)
    assert ei.value.offset == offset


def test_poly_mode():
    assert parse_poly2("xi*eta/2") == 0.5 * XI * ETA
    assert parse_poly2("(xi - eta)^2") == XI**2 - 2 * XI * ETA + ETA**2
    with pytest.raises(ModeError):
        parse_poly2("Dx + xi")


def test_errors_share_base_class():
    for e in (ParseError, UnknownIdentifier, ExponentError, ModeError):
        assert issubclass(e, DSLError)


coef = st.sampled_from([1, -1, 2, 0.5, -0.25, 1j, -3j, 1 + 2j, 0.1])
keys = st.tuples(*(st.integers(0, 3) for _ in range(4)))


@given(st.dictionaries(keys, coef, max_size=6).map(WeylOp))
def test_format_roundtrip(B):
    assert op(format_op(B)) == B


@given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), coef, max_size=5))
def test_poly_format_roundtrip(d):
    p = Poly(2, d)
    assert parse_poly2(format_poly(p)) == p


def test_zero_formats():
    assert format_op(WeylOp.zero()) == "0"
    assert op("0").is_zero
