from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from blasiuscert.numerics.interval import (
    Interval,
    decimal_bounds,
    get_precision,
    round_down,
    round_up,
    set_precision,
    to_fraction,
    working_precision,
)
from blasiuscert.numerics.elementary import exp, sqrt

MANY = settings(max_examples=1000, deadline=None)

small = st.fractions(min_value=-50, max_value=50, max_denominator=10**6)
unit = st.fractions(min_value=0, max_value=1, max_denominator=1000)


@st.composite
def intervals(draw, lo_min=-50, nonneg=False):
    a = draw(st.fractions(min_value=0 if nonneg else lo_min, max_value=50, max_denominator=10**6))
    w = draw(st.fractions(min_value=0, max_value=10, max_denominator=10**4))
    return Interval(a, a + w)


def point_in(iv: Interval, s: Fraction) -> Fraction:
    return iv.lo + s * (iv.hi - iv.lo)


def widen(iv: Interval, s: Fraction) -> Interval:
    return Interval(iv.lo - s, iv.hi + s)


# -- basic behaviour ---------------------------------------------------------


def test_point_and_order():
    assert Interval(3).lo == Interval(3).hi == 3
    with pytest.raises(ValueError):
        Interval(2, 1)


def test_immutable():
    iv = Interval(1, 2)
    with pytest.raises(AttributeError):
        iv.lo = Fraction(0)


def test_exact_arithmetic_small_values():
    a, b = Interval(1, 2), Interval(-3, 4)
    assert a + b == Interval(-2, 6)
    assert a - b == Interval(-3, 5)
    assert a * b == Interval(-6, 8)
    assert Interval(2, 4) / Interval(1, 2) == Interval(1, 4)


def test_division_by_interval_containing_zero():
    with pytest.raises(ZeroDivisionError):
        Interval(1) / Interval(-1, 1)


def test_even_power_of_straddling_interval():
    assert Interval(-2, 1) ** 2 == Interval(0, 4)
    assert Interval(-2, 1).sqr() == Interval(0, 4)
    assert Interval(-2, 1) ** 3 == Interval(-8, 1)


def test_mag_mig_width():
    iv = Interval(-3, 2)
    assert iv.mag == 3 and iv.mig == 0 and iv.width == 5
    assert Interval(2, 5).mig == 2


def test_hull_and_intersect():
    assert Interval.hull(Interval(0, 1), Interval(3, 4), 2) == Interval(0, 4)
    assert Interval(0, 2).intersect(Interval(1, 3)) == Interval(1, 2)
    with pytest.raises(ValueError):
        Interval(0, 1).intersect(Interval(2, 3))


def test_to_fraction_accepts_strings_and_floats():
    assert to_fraction("1.5e-3") == Fraction(3, 2000)
    assert to_fraction(0.5) == Fraction(1, 2)


def test_outward_rounding_brackets_value():
    q = Fraction(1, 3)
    assert round_down(q, 20) <= q <= round_up(q, 20)
    assert round_up(q, 20) - round_down(q, 20) <= Fraction(1, 2**20)


def test_working_precision_restores():
    before = get_precision()
    with working_precision(100):
        assert get_precision() == 100
    assert get_precision() == before
    with pytest.raises(ValueError):
        set_precision(8)


def test_precision_env_var_read_at_import(monkeypatch):
    import blasiuscert.numerics.interval as mod

    monkeypatch.setenv(mod.PRECISION_ENV, "300")
    assert mod._initial_precision() == 300
    monkeypatch.setenv(mod.PRECISION_ENV, "junk")
    assert mod._initial_precision() == 256


def test_decimal_bounds_are_outward():
    iv = Interval(Fraction(1, 3), Fraction(2, 3))
    lo, hi = decimal_bounds(iv, 6)
    assert Fraction(lo) <= Fraction(1, 3) and Fraction(hi) >= Fraction(2, 3)
    assert decimal_bounds(Interval(0), 5) == ("0", "0")
    lo, hi = decimal_bounds(Interval(Fraction(-7, 3)), 4)
    assert Fraction(lo) <= Fraction(-7, 3) <= Fraction(hi)


def test_rounding_keeps_denominators_bounded():
    acc = Interval(1)
    for _ in range(60):
        acc = acc * Interval(Fraction(1, 3), Fraction(1, 3)) + Fraction(1, 7)
    assert acc.hi.denominator <= 2 ** (get_precision() + 1)


# -- inclusion properties (1000 random cases per operation) -------------------


@MANY
@given(intervals(), intervals(), unit, unit)
def test_add_contains_pointwise(a, b, s, u):
    assert (a + b).contains(point_in(a, s) + point_in(b, u))


@MANY
@given(intervals(), intervals(), unit, unit)
def test_sub_contains_pointwise(a, b, s, u):
    assert (a - b).contains(point_in(a, s) - point_in(b, u))


@MANY
@given(intervals(), intervals(), unit, unit)
def test_mul_contains_pointwise(a, b, s, u):
    assert (a * b).contains(point_in(a, s) * point_in(b, u))


@MANY
@given(intervals(), intervals(lo_min=1, nonneg=True), unit, unit)
def test_div_contains_pointwise(a, b, s, u):
    b = b + 1
    assert (a / b).contains(point_in(a, s) / point_in(b, u))


@MANY
@given(intervals(), st.integers(min_value=0, max_value=7), unit)
def test_pow_contains_pointwise(a, n, s):
    assert (a**n).contains(point_in(a, s) ** n)


@MANY
@given(intervals(nonneg=True), unit)
def test_sqrt_contains_pointwise(a, s):
    x = point_in(a, s)
    r = sqrt(a)
    # r^2 bracket must contain x; r itself non-negative
    assert r.lo >= 0
    assert r.lo * r.lo <= x <= r.hi * r.hi


@MANY
@given(st.fractions(min_value=-20, max_value=20, max_denominator=1000), unit)
def test_exp_contains_pointwise(x0, s):
    import mpmath

    a = Interval(x0, x0 + Fraction(1, 10))
    x = point_in(a, s)
    e = exp(a)
    with mpmath.workdps(150):
        ref = Fraction(str(mpmath.exp(mpmath.mpf(x.numerator) / x.denominator)))
    slack = Fraction(1, 10**140)
    assert e.lo <= ref + slack and ref - slack <= e.hi


@MANY
@given(intervals(), intervals(), st.fractions(min_value=0, max_value=3, max_denominator=100))
def test_inclusion_monotone_binary(a, b, w):
    A, B = widen(a, w), widen(b, w)
    assert (a + b).subset_of(A + B)
    assert (a - b).subset_of(A - B)
    assert (a * b).subset_of(A * B)
    if B.lo > 0:
        assert (a / b).subset_of(A / B)


@MANY
@given(intervals(nonneg=True), st.fractions(min_value=0, max_value=3, max_denominator=100))
def test_inclusion_monotone_unary(a, w):
    A = Interval(a.lo, a.hi + w)
    assert sqrt(a).subset_of(sqrt(A))
    assert (a**3).subset_of(A**3)
    small_a, small_A = Interval(a.lo / 10, a.hi / 10), Interval(A.lo / 10, A.hi / 10)
    assert exp(small_a).subset_of(exp(small_A))
