"""Outward-rounded interval arithmetic over exact rationals.

Endpoints are :class:`fractions.Fraction`.  Results whose denominators grow
past ``2**precision`` are rounded outward to a dyadic grid, so every
operation stays inclusion-monotone while rational blowup is kept bounded.
"""
from __future__ import annotations

import os
from contextlib import contextmanager
from fractions import Fraction
from typing import Iterator, Union

PRECISION_ENV = "BLASIUSCERT_PREC"
_DEFAULT_BITS = 256


def _initial_precision() -> int:
    raw = os.environ.get(PRECISION_ENV)
    if raw is None:
        return _DEFAULT_BITS
    try:
        bits = int(raw)
    except ValueError:
        return _DEFAULT_BITS
    return max(bits, 64)


_precision = _initial_precision()


def get_precision() -> int:
    """Bits of the dyadic grid used for outward rounding."""
    return _precision


def set_precision(bits: int) -> None:
    global _precision
    if bits < 32:
        raise ValueError("precision must be at least 32 bits")
    _precision = int(bits)


@contextmanager
def working_precision(bits: int) -> Iterator[None]:
    """Temporarily raise (or lower) the rounding precision."""
    old = _precision
    set_precision(bits)
    try:
        yield
    finally:
        set_precision(old)


Number = Union[int, Fraction]


def round_down(q: Fraction, bits: int | None = None) -> Fraction:
    bits = _precision if bits is None else bits
    scale = 1 << bits
    if q.denominator <= scale:
        return q
    return Fraction((q.numerator * scale) // q.denominator, scale)


def round_up(q: Fraction, bits: int | None = None) -> Fraction:
    bits = _precision if bits is None else bits
    scale = 1 << bits
    if q.denominator <= scale:
        return q
    return Fraction(-((-q.numerator * scale) // q.denominator), scale)


def to_fraction(x: Number | str) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, float):
        # floats are exact dyadics; accept them explicitly
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


class Interval:
    """Closed interval [lo, hi] with rational endpoints."""

    __slots__ = ("lo", "hi")

    lo: Fraction
    hi: Fraction

    def __init__(self, lo: Number | str, hi: Number | str | None = None) -> None:
        lo_q = to_fraction(lo)
        hi_q = lo_q if hi is None else to_fraction(hi)
        if lo_q > hi_q:
            raise ValueError(f"empty interval [{lo_q}, {hi_q}]")
        object.__setattr__(self, "lo", lo_q)
        object.__setattr__(self, "hi", hi_q)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Interval is immutable")

    @classmethod
    def _rounded(cls, lo: Fraction, hi: Fraction) -> "Interval":
        return cls(round_down(lo), round_up(hi))

    @classmethod
    def hull(cls, *values: "Interval | Number") -> "Interval":
        ivs = [as_interval(v) for v in values]
        return cls(min(v.lo for v in ivs), max(v.hi for v in ivs))

    # -- basic properties -------------------------------------------------
    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def mag(self) -> Fraction:
        """Largest absolute value in the interval."""
        return max(abs(self.lo), abs(self.hi))

    @property
    def mig(self) -> Fraction:
        """Smallest absolute value in the interval."""
        if self.lo <= 0 <= self.hi:
            return Fraction(0)
        return min(abs(self.lo), abs(self.hi))

    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x: "Interval | Number | float") -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= to_fraction(x) <= self.hi

    __contains__ = contains

    def subset_of(self, other: "Interval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def intersect(self, other: "Interval") -> "Interval":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            raise ValueError("intervals do not intersect")
        return Interval(lo, hi)

    def certainly_positive(self) -> bool:
        return self.lo > 0

    def certainly_negative(self) -> bool:
        return self.hi < 0

    def certainly_lt(self, other: "Interval | Number") -> bool:
        return self.hi < as_interval(other).lo

    def certainly_le(self, other: "Interval | Number") -> bool:
        return self.hi <= as_interval(other).lo

    # -- arithmetic -------------------------------------------------------
    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __pos__(self) -> "Interval":
        return self

    def __abs__(self) -> "Interval":
        return Interval(self.mig, self.mag)

    def __add__(self, other: "Interval | Number") -> "Interval":
        o = as_interval(other)
        return Interval._rounded(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __sub__(self, other: "Interval | Number") -> "Interval":
        o = as_interval(other)
        return Interval._rounded(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, other: "Interval | Number") -> "Interval":
        return as_interval(other) - self

    def __mul__(self, other: "Interval | Number") -> "Interval":
        o = as_interval(other)
        if self.lo >= 0 and o.lo >= 0:
            return Interval._rounded(self.lo * o.lo, self.hi * o.hi)
        products = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval._rounded(min(products), max(products))

    __rmul__ = __mul__

    def reciprocal(self) -> "Interval":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("interval contains zero")
        return Interval._rounded(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other: "Interval | Number") -> "Interval":
        o = as_interval(other)
        if o.is_point() and o.lo != 0:
            q = o.lo
            a, b = self.lo / q, self.hi / q
            return Interval._rounded(min(a, b), max(a, b))
        return self * o.reciprocal()

    def __rtruediv__(self, other: "Interval | Number") -> "Interval":
        return as_interval(other) / self

    def __pow__(self, n: int) -> "Interval":
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers are supported")
        if n == 0:
            return Interval(1)
        if n % 2 == 1 or self.lo >= 0:
            return Interval._rounded(self.lo**n, self.hi**n)
        if self.hi <= 0:
            return Interval._rounded(self.hi**n, self.lo**n)
        return Interval._rounded(Fraction(0), self.mag**n)

    def sqr(self) -> "Interval":
        return self**2

    def max_with(self, other: "Interval | Number") -> "Interval":
        o = as_interval(other)
        return Interval(max(self.lo, o.lo), max(self.hi, o.hi))

    def min_with(self, other: "Interval | Number") -> "Interval":
        o = as_interval(other)
        return Interval(min(self.lo, o.lo), min(self.hi, o.hi))

    # -- comparisons and display ------------------------------------------
    def __eq__(self, other: object) -> bool:
        if isinstance(other, Interval):
            return self.lo == other.lo and self.hi == other.hi
        if isinstance(other, (int, Fraction)):
            return self.lo == self.hi == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.lo, self.hi))

    def __repr__(self) -> str:
        return f"Interval({float(self.lo)!r}, {float(self.hi)!r})"

    def to_floats(self) -> tuple[float, float]:
        return float(self.lo), float(self.hi)


def as_interval(x: "Interval | Number | str") -> Interval:
    if isinstance(x, Interval):
        return x
    return Interval(to_fraction(x))


def decimal_bounds(iv: Interval, digits: int = 12) -> tuple[str, str]:
    """Outward decimal rendering with ``digits`` significant digits."""
    return _decimal_outward(iv.lo, digits, up=False), _decimal_outward(iv.hi, digits, up=True)


def _decimal_outward(q: Fraction, digits: int, up: bool) -> str:
    if q == 0:
        return "0"
    negative = q < 0
    a = abs(q)
    e = len(str(a.numerator)) - len(str(a.denominator))
    while Fraction(10) ** e > a:
        e -= 1
    while Fraction(10) ** (e + 1) <= a:
        e += 1
    shift = digits - 1 - e
    scaled = a * Fraction(10) ** shift
    away = up != negative
    n = -((-scaled.numerator) // scaled.denominator) if away else scaled.numerator // scaled.denominator
    exp10 = -shift
    while exp10 < 0 and n % 10 == 0:
        n //= 10
        exp10 += 1
    text = str(n)
    if exp10 >= 0:
        text += "0" * exp10
    else:
        k = -exp10
        text = text.rjust(k + 1, "0")
        text = text[:-k] + "." + text[-k:]
    return ("-" if negative else "") + text
