import pytest
from fractions import Fraction
from hypothesis import given, strategies as st

from surecount.rational import (
    RationalParseError,
    ResourceLimitExceeded,
    check_bit_budget,
    rat_add,
    rat_compare,
    rat_from_decimal,
    rat_from_text,
    rat_mul,
    render_decimal,
)

rationals = st.fractions(
    min_value=Fraction(-10**6), max_value=Fraction(10**6), max_denominator=10**6
)


def canonical(v: Fraction) -> bool:
    from math import gcd

    return v.denominator > 0 and gcd(abs(v.numerator), v.denominator) == 1


def test_add_examples():
    assert rat_add(Fraction(1, 3), Fraction(1, 6)) == Fraction(1, 2)
    assert rat_add(Fraction(1, 10**27), Fraction(10**27)) == Fraction(10**54 + 1, 10**27)
    a = Fraction(-7, 11)
    assert rat_add(Fraction(0), a) == a


def test_mul_examples():
    assert rat_mul(Fraction(2, 3), Fraction(3, 4)) == Fraction(1, 2)
    assert rat_mul(Fraction(10**9), Fraction(1, 10**9)) == 1
    assert rat_mul(Fraction(123, 7), Fraction(0)) == Fraction(0, 1)


def test_from_decimal_examples():
    assert rat_from_decimal("0.25") == Fraction(1, 4)
    assert rat_from_decimal("1.000000453") == Fraction(1000000453, 10**9)
    assert rat_from_decimal("-1e-9") == Fraction(-1, 10**9)
    assert rat_from_decimal("1e9") == Fraction(10**9)


@pytest.mark.parametrize("bad", ["", "abc", "1.2.3", "--5", "1e", "0x12", "1/0"])
def test_from_decimal_rejects_and_names_token(bad):
    with pytest.raises(RationalParseError) as err:
        rat_from_decimal(bad)
    assert repr(bad.strip()) in str(err.value) or "denominator" in str(err.value)


def test_from_text_fraction_form():
    assert rat_from_text("3/4") == Fraction(3, 4)
    assert rat_from_text("-3/4") == Fraction(-3, 4)
    with pytest.raises(RationalParseError):
        rat_from_text("3/0")


def test_compare():
    assert rat_compare(Fraction(1, 3), Fraction(2, 6)) == 0
    assert rat_compare(Fraction(-1, 2), Fraction(0)) == -1
    assert rat_compare(Fraction(1, 10**27), Fraction(0)) == 1


@given(rationals, rationals, rationals)
def test_field_laws(a, b, c):
    assert rat_add(a, b) == rat_add(b, a)
    assert rat_mul(a, rat_add(b, c)) == rat_add(rat_mul(a, b), rat_mul(a, c))
    assert rat_add(rat_add(a, b), -b) == a


@given(rationals, rationals)
def test_results_stay_canonical(a, b):
    for r in (rat_add(a, b), rat_mul(a, b)):
        assert canonical(r)


@given(st.integers(-10**9, 10**9), st.integers(0, 12))
def test_render_round_trip_terminating(num, places):
    v = Fraction(num, 10**places)
    text = render_decimal(v, 24)
    assert rat_from_decimal(text) == v


def test_render_decimal_examples():
    assert render_decimal(Fraction(1, 8), 3) == "1.25e-1"
    assert render_decimal(Fraction(0), 3) == "0.00e+0"
    assert render_decimal(Fraction(-1, 10**27), 3) == "-1.00e-27"
    # final digit rounds half to even
    assert render_decimal(Fraction(125, 1000), 2) == "1.2e-1"
    assert render_decimal(Fraction(135, 1000), 2) == "1.4e-1"
    # carry into a new decade
    assert render_decimal(Fraction(999, 1000), 2) == "1.0e+0"


def test_bit_budget():
    big = Fraction(10**50, 3)
    assert check_bit_budget(big, None) == big
    assert check_bit_budget(big, 10_000) == big
    with pytest.raises(ResourceLimitExceeded):
        check_bit_budget(big, 64)
