"""Canonical rational strings and lazy power-of-two magnitudes."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nikodym.rat import parse_rational, format_rational, BigMag, INT_BIT_LIMIT
from nikodym.errors import ParseError, MagnitudeOverflow


def test_parse_basic():
    assert parse_rational("2/1") == Fraction(2)
    assert parse_rational("-3/7") == Fraction(-3, 7)
    assert parse_rational("0/1") == Fraction(0)


@pytest.mark.parametrize("bad", [
    "2", "1/2/3", "3/-2", "1/0", "2/4", "0/5", "-0/1x", "a/b", "", "1 / 2",
])
def test_parse_rejects(bad):
    with pytest.raises(ParseError):
        parse_rational(bad)


def test_format_always_writes_denominator():
    assert format_rational(Fraction(2)) == "2/1"
    assert format_rational(Fraction(-1, 3)) == "-1/3"
    assert format_rational(0) == "0/1"


@given(st.fractions(min_value=-10**9, max_value=10**9,
                    max_denominator=10**9))
def test_round_trip(x):
    assert parse_rational(format_rational(x)) == x


@given(st.integers(min_value=1, max_value=10**6),
       st.integers(min_value=1, max_value=10**6))
def test_bigmag_cmp_matches_int_cmp(a, b):
    ma, mb = BigMag.from_int(a), BigMag.from_int(b)
    assert ma.cmp(mb) == (a > b) - (a < b)


@given(st.integers(min_value=1, max_value=10**4),
       st.integers(min_value=0, max_value=200),
       st.integers(min_value=1, max_value=10**4),
       st.integers(min_value=0, max_value=200))
def test_bigmag_shifted_cmp(m1, e1, m2, e2):
    a, b = m1 << e1, m2 << e2
    assert BigMag(m1, e1).cmp(BigMag(m2, e2)) == (a > b) - (a < b)


def test_bigmag_astronomical_cmp():
    # exponents far beyond anything materializable
    huge = BigMag(1, 10**50)
    huger = BigMag(3, 10**50)
    assert huge.cmp(huger) == -1
    assert huger.cmp(huge) == 1
    assert BigMag(1, 10**50 + 2).cmp(huger) == 1


def test_bigmag_mul_pow():
    x = BigMag(3, 5)
    y = x.mul(BigMag(5, 7))
    assert y.m == 15 and y.e == 12
    z = x.pow(3)
    assert z.m == 27 and z.e == 15
    assert x.mul(y).to_int() == (3 << 5) * (15 << 12) >> 0


def test_bigmag_materialization_guard():
    with pytest.raises(MagnitudeOverflow):
        BigMag(1, INT_BIT_LIMIT + 1).to_int()
    assert BigMag(1, 10).to_int() == 1024


def test_bigmag_normalizes_even_mantissa():
    x = BigMag(12, 1)  # 12 * 2 = 3 * 2^3
    assert x.m == 3 and x.e == 3
