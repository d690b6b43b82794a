from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from condexp.exactnum import (
    GR,
    Dyadic,
    dyadic_sqrt,
    format_rational,
    parse_gaussian,
    rational,
    sqrt_bounds,
    truncated_sub,
)
from oracles import sqrt_floor_bisect

fractions = st.fractions(min_value=0, max_value=50, max_denominator=1000)


def test_rational_coercions():
    assert rational("3/4") == mpq(3, 4)
    assert rational(Fraction(-2, 6)) == mpq(-1, 3)
    assert rational(5) == 5
    with pytest.raises(TypeError):
        rational(0.5)
    with pytest.raises(ValueError):
        rational("0.5")
    with pytest.raises(ZeroDivisionError):
        rational("1/0")


def test_format_rational():
    assert format_rational(mpq(6, 3)) == "2"
    assert format_rational(mpq(-1, 4)) == "-1/4"


def test_sqrt_two_frozen():
    # frozen from bisection over Fractions at 2^-11
    assert dyadic_sqrt(2, 10) == mpq(181, 128)
    assert sqrt_floor_bisect(Fraction(2), 11) == Fraction(181, 128)


def test_sqrt_exact_cases():
    assert dyadic_sqrt(mpq(9, 16), 3) == mpq(3, 4)
    assert dyadic_sqrt(0, 0) == 0
    assert sqrt_bounds(mpq(1, 4), 5) == (Dyadic(1, -1), Dyadic(1, -1))


def test_sqrt_rejects_negative():
    with pytest.raises(ValueError):
        dyadic_sqrt(-1, 3)
    with pytest.raises(ValueError):
        sqrt_bounds(mpq(-1, 2), 3)


@given(fractions, st.integers(min_value=0, max_value=40))
def test_dyadic_sqrt_contract(q, k):
    d = dyadic_sqrt(q, k).to_rational()
    assert d >= 0
    assert d * d <= mpq(q)
    assert (d + mpq(1, 1 << k)) ** 2 > mpq(q)
    assert d == mpq(sqrt_floor_bisect(q, k + 1))


@given(fractions, st.integers(min_value=0, max_value=40))
def test_sqrt_bounds_bracket(q, k):
    lo, hi = sqrt_bounds(q, k)
    assert lo.to_rational() ** 2 <= mpq(q) <= hi.to_rational() ** 2
    assert hi.to_rational() - lo.to_rational() <= mpq(1, 1 << k)


@given(st.fractions(max_denominator=10**6), st.integers(min_value=-5, max_value=30))
def test_floor_ceil(q, k):
    lo = Dyadic.floor(q, k).to_rational()
    hi = Dyadic.ceil(q, k).to_rational()
    step = mpq(2) ** -k
    assert lo <= mpq(q) <= hi
    assert hi - lo <= step


@given(st.integers(-1000, 1000), st.integers(-20, 20), st.integers(-1000, 1000), st.integers(-20, 20))
def test_dyadic_ring(a, e, b, f):
    x, y = Dyadic(a, e), Dyadic(b, f)
    assert (x + y).to_rational() == x.to_rational() + y.to_rational()
    assert (x - y).to_rational() == x.to_rational() - y.to_rational()
    assert (x * y).to_rational() == x.to_rational() * y.to_rational()
    assert x.shift(3).to_rational() == 8 * x.to_rational()
    assert (x < y) == (x.to_rational() < y.to_rational())


def test_dyadic_canonical_and_immutable():
    assert Dyadic(4, 0) == Dyadic(1, 2)
    assert hash(Dyadic(4, 0)) == hash(Dyadic(1, 2))
    assert Dyadic(0, 7).exponent == 0
    with pytest.raises(AttributeError):
        Dyadic(1).mantissa = 3
    assert str(Dyadic(3, -2)) == "3/4"


@given(fractions, fractions)
def test_truncated_sub(r, s):
    v = truncated_sub(r, s)
    assert v == max(mpq(r) - mpq(s), 0)


def test_truncated_sub_examples():
    assert truncated_sub(mpq(1, 2), 1) == 0
    assert truncated_sub(2, mpq(1, 2)) == mpq(3, 2)


def test_gaussian_arithmetic():
    i = GR(0, 1)
    assert i * i == GR(-1)
    z = GR(mpq(3, 5), mpq(4, 5))
    assert z * z.conj() == 1
    assert z.abs2() == 1
    assert (GR(1) / z) == z.conj()
    assert complex(GR(mpq(1, 2), -1)) == complex(0.5, -1)


@pytest.mark.parametrize(
    "text,value",
    [("1/2", GR(mpq(1, 2))), ("i", GR(0, 1)), ("-1/2*i", GR(0, mpq(-1, 2))), ("1/2-i", GR(mpq(1, 2), -1)), ("3+4/5*i", GR(3, mpq(4, 5)))],
)
def test_parse_gaussian(text, value):
    assert parse_gaussian(text) == value
    assert parse_gaussian(str(value)) == value


def test_parse_gaussian_rejects_floats():
    with pytest.raises(ValueError):
        parse_gaussian("0.5")
