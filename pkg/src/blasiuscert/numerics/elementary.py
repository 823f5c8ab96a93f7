"""Rigorous enclosures of sqrt, exp and pi."""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import isqrt

from .interval import Interval, Number, as_interval, get_precision, to_fraction, working_precision


def _sqrt_point(q: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    if q < 0:
        raise ValueError("sqrt of a negative number")
    if q == 0:
        return Fraction(0), Fraction(0)
    scale = 1 << (2 * bits)
    m_lo = (q.numerator * scale) // q.denominator
    m_hi = -((-q.numerator * scale) // q.denominator)
    lo = Fraction(isqrt(m_lo), 1 << bits)
    hi = Fraction(isqrt(m_hi - 1) + 1, 1 << bits)
    # exact squares stay exact
    num, den = q.numerator, q.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn == num and rd * rd == den:
        exact = Fraction(rn, rd)
        return exact, exact
    return lo, hi


def sqrt(x: Interval | Number) -> Interval:
    """Enclosure of the square root (monotone, so endpoints suffice)."""
    iv = as_interval(x)
    if iv.lo < 0:
        raise ValueError("sqrt of an interval with negative part")
    bits = get_precision()
    lo, _ = _sqrt_point(iv.lo, bits)
    _, hi = _sqrt_point(iv.hi, bits)
    return Interval(lo, hi)


def _exp_point(x: Fraction) -> Interval:
    if x == 0:
        return Interval(1)
    # halve the argument until |y| <= 1/256, sum the series, then square back
    k = 0
    y = x
    while abs(y) > Fraction(1, 256):
        y /= 2
        k += 1
    bits = get_precision() + k + 24
    with working_precision(bits):
        ay = abs(y)
        term = Interval(1)
        total = Interval(1)
        n = 0
        bound = Fraction(1, 1 << bits)
        while True:
            n += 1
            term = term * y / n
            total = total + term
            if term.mag * 2 * ay < bound:
                break
        # remaining terms: sum_{m>n} |y|^m/m! <= 2|y|^{n+1}/(n+1)!
        tail = 2 * term.mag * ay / (n + 1)
        total = total + Interval(-tail, tail)
        for _ in range(k):
            total = total * total
    return Interval._rounded(total.lo, total.hi)


def exp(x: Interval | Number) -> Interval:
    """Enclosure of exp over an interval (monotone increasing)."""
    iv = as_interval(x)
    lo = _exp_point(iv.lo)
    if iv.is_point():
        return lo
    hi = _exp_point(iv.hi)
    return Interval(lo.lo, hi.hi)


def _arctan_inv(m: int, bits: int) -> tuple[Fraction, Fraction]:
    """Bracket arctan(1/m) by consecutive partial sums of the alternating series."""
    target = Fraction(1, 1 << (bits + 8))
    total = Fraction(0)
    n = 0
    prev = total
    while True:
        term = Fraction(1, (2 * n + 1) * m ** (2 * n + 1))
        prev = total
        total = total + term if n % 2 == 0 else total - term
        if term < target:
            break
        n += 1
    return (min(prev, total), max(prev, total))


@lru_cache(maxsize=8)
def _pi_at(bits: int) -> Interval:
    a_lo, a_hi = _arctan_inv(5, bits)
    b_lo, b_hi = _arctan_inv(239, bits)
    lo = 16 * a_lo - 4 * b_hi
    hi = 16 * a_hi - 4 * b_lo
    with working_precision(bits):
        return Interval._rounded(lo, hi)


def pi() -> Interval:
    return _pi_at(get_precision())


@lru_cache(maxsize=8)
def _sqrt2_at(bits: int) -> Interval:
    with working_precision(bits):
        return sqrt(2)


def sqrt2() -> Interval:
    return _sqrt2_at(get_precision())


@lru_cache(maxsize=8)
def _sqrt_pi_at(bits: int) -> Interval:
    with working_precision(bits):
        return sqrt(_pi_at(bits))


def sqrt_pi() -> Interval:
    return _sqrt_pi_at(get_precision())


def rational(x: Number | str | float) -> Fraction:
    """Exact rational from an int, Fraction or decimal string."""
    return to_fraction(x)
