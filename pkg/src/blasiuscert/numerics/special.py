"""Enclosures of erfc and of the Laplace-type functions I0, J0.

``I0(t) = 1 - sqrt(pi t) e^t erfc(sqrt t)`` and ``J0(t) = I0(2t)``.  Both are
Laplace transforms of positive functions, hence positive and decreasing,
with ``I0(t) < 1/(2t)``.
"""
from __future__ import annotations

from fractions import Fraction
from math import ceil

from .elementary import exp, sqrt, sqrt_pi
from .interval import Interval, Number, as_interval, get_precision, working_precision

ERFC_MIN_ARG = Fraction(1)


def _erf_series(x: Fraction, bits: int) -> Interval:
    """sum_{n>=0} 2^n x^(2n+1)/(2n+1)!!, enclosed with a geometric tail."""
    x2 = x * x
    term = Interval(x)
    total = Interval(x)
    n = 0
    eps = Fraction(1, 1 << bits)
    while True:
        n += 1
        term = term * (2 * x2) / (2 * n + 1)
        total = total + term
        ratio = 2 * x2 / (2 * n + 3)
        if ratio < Fraction(1, 2) and term.hi * ratio < eps * total.lo:
            break
    tail = term.hi * ratio / (1 - ratio)
    return Interval(total.lo, total.hi + tail)


def _erfc_point(x: Fraction) -> Interval:
    # erfc = 1 - (2/sqrt(pi)) e^{-x^2} S(x); cancellation costs about x^2 log2(e) bits
    extra = ceil(float(x * x) * 1.4427) + 40
    bits = get_precision() + extra
    with working_precision(bits):
        s = _erf_series(x, bits)
        erf = 2 * exp(-x * x) * s / sqrt_pi()
        val = 1 - erf
    lo = max(val.lo, Fraction(0))
    return Interval._rounded(lo, val.hi)


def erfc_enclosure(x: Interval | Number) -> Interval:
    """Enclosure of erfc over ``x`` (argument, not its square); requires x >= 1."""
    iv = as_interval(x)
    if iv.lo < ERFC_MIN_ARG:
        raise ValueError(f"erfc enclosure supports arguments >= {ERFC_MIN_ARG}, got {float(iv.lo)}")
    hi = _erfc_point(iv.lo)
    if iv.is_point():
        return hi
    lo = _erfc_point(iv.hi)
    return Interval(lo.lo, hi.hi)


def _scaled_erfc_at(t: Fraction) -> Interval:
    """sqrt(pi t) e^t erfc(sqrt t) for a rational point t >= 1."""
    root = sqrt(t)
    return sqrt_pi() * root * exp(t) * erfc_enclosure(root)


def _i0_point(t: Fraction) -> Interval:
    extra = ceil(float(t) * 1.4427) + 40
    with working_precision(get_precision() + extra):
        val = 1 - _scaled_erfc_at(t)
    bound = Interval(Fraction(0), 1 / (2 * t))
    val = Interval._rounded(val.lo, val.hi)
    return Interval(max(val.lo, bound.lo), min(val.hi, bound.hi))


def I0_enclosure(t: Interval | Number) -> Interval:
    """Enclosure of I0 over ``t`` (decreasing, so hull of endpoint values)."""
    iv = as_interval(t)
    if iv.lo < 1:
        raise ValueError("I0 enclosure requires t >= 1")
    left = _i0_point(iv.lo)
    if iv.is_point():
        return left
    right = _i0_point(iv.hi)
    return Interval(right.lo, left.hi)


def I0_J0_enclosure(t: Interval | Number) -> tuple[Interval, Interval]:
    iv = as_interval(t)
    return I0_enclosure(iv), I0_enclosure(2 * iv)
