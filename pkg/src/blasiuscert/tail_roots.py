"""Sign structure of the Laplace densities behind Q2 and R3.

After the substitution ``s = -1 + (y-1)^2/(4y)`` (which maps
``(3 + 2 sqrt2, inf)`` onto ``(0, inf)``) the densities factor as a positive
rational function times a cubic ``P3`` or quintic ``P5`` with coefficients in
Q(sqrt2).  Each polynomial has exactly one root beyond ``3 + 2 sqrt2``.  Past
that root the density is negative but bounded below by an explicit,
decreasing function, which yields the tail constants used in the far field.

Coefficients in Q(sqrt2) are carried as tight intervals.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .numerics.elementary import sqrt, sqrt2
from .numerics.interval import Interval, Number, as_interval

IPoly = list  # list[Interval], index = power


def ipoly(coeffs: Sequence[Interval | Number]) -> IPoly:
    return [as_interval(c) for c in coeffs]


def ip_eval(p: IPoly, y: Interval | Number) -> Interval:
    yi = as_interval(y)
    acc = Interval(0)
    for c in reversed(p):
        acc = acc * yi + c
    return acc


def ip_mul(p: IPoly, q: IPoly) -> IPoly:
    out = [Interval(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return out


def ip_add(p: IPoly, q: IPoly) -> IPoly:
    n = max(len(p), len(q))
    z = Interval(0)
    return [(p[k] if k < len(p) else z) + (q[k] if k < len(q) else z) for k in range(n)]


def ip_scale(p: IPoly, c: Interval | Number) -> IPoly:
    return [a * c for a in p]


def ip_taylor_shift(p: IPoly, c: Interval | Number) -> IPoly:
    """Coefficients of p(c + u) in powers of u (repeated synthetic division)."""
    coeffs = list(p)
    n = len(coeffs)
    ci = as_interval(c)
    for i in range(n):
        for k in range(n - 2, i - 1, -1):
            coeffs[k] = coeffs[k] + ci * coeffs[k + 1]
    return coeffs


def ip_deflate(p: IPoly, root: Interval) -> IPoly:
    """Quotient of p by (y - root); the remainder (an enclosure of 0) is dropped."""
    n = len(p) - 1
    q = [Interval(0)] * n
    acc = p[n]
    for k in range(n - 1, -1, -1):
        q[k] = acc
        acc = p[k] + acc * root
    return q


def all_negative(coeffs: Sequence[Interval]) -> bool:
    return all(c.hi < 0 for c in coeffs)


def all_nonnegative(coeffs: Sequence[Interval]) -> bool:
    return all(c.lo >= 0 for c in coeffs)


def s_of_y(y: Interval | Number) -> Interval:
    """s = -1 + (y-1)^2/(4y), increasing for y > 1."""
    yi = as_interval(y)
    lo = _s_point(yi.lo)
    hi = _s_point(yi.hi)
    return Interval(lo.lo, hi.hi)


def _s_point(y: Fraction) -> Interval:
    return Interval(-1 + (y - 1) ** 2 / (4 * y))


def bisect_root(p: IPoly, lo: Fraction, hi: Fraction, width: Fraction = Fraction(1, 10**15)) -> Interval:
    """Shrink a certified sign-change bracket [lo, hi] of p by bisection."""
    f_lo, f_hi = ip_eval(p, lo), ip_eval(p, hi)
    if not ((f_lo.lo > 0 and f_hi.hi < 0) or (f_lo.hi < 0 and f_hi.lo > 0)):
        raise ValueError("bracket does not certify a sign change")
    lo_positive = f_lo.lo > 0
    while hi - lo > width:
        mid = (lo + hi) / 2
        f_mid = ip_eval(p, mid)
        if f_mid.lo > 0:
            pos = True
        elif f_mid.hi < 0:
            pos = False
        else:
            break  # sign no longer decidable at this precision
        if pos == lo_positive:
            lo = mid
        else:
            hi = mid
    return Interval(lo, hi)


def K_lower() -> Interval:
    """3 + 2 sqrt2 as an interval."""
    return 3 + 2 * sqrt2()


def P3() -> IPoly:
    s2 = sqrt2()
    return ipoly([3 + 2 * s2, -(11 + 4 * s2), 17 + 10 * s2, -1])


def P5() -> IPoly:
    s2 = sqrt2()
    return ipoly([1, -(21 - 10 * s2), 42 - 2 * s2, -(42 + 2 * s2), 21 + 10 * s2, -1])


def lin(a: Interval | Number, b: Interval | Number = 1) -> IPoly:
    """The polynomial a + b*y."""
    return ipoly([a, b])


@dataclass(frozen=True)
class RootCertificate:
    name: str
    y0: Interval
    s0: Interval
    deflated_shifted: tuple[Interval, ...]  # coefficients in powers of (y-5), leading -1 dropped
    unique: bool
    dominated: bool  # P(y) + y^deg >= 0 on [y0, inf)
    magnitude_decreasing: bool
    tail_min: Interval  # lower bound of the density beyond the root


def _isolate(p: IPoly, lo: Fraction, hi: Fraction) -> Interval:
    return bisect_root(p, lo, hi)


def _log_derivative_numerator_U() -> IPoly:
    """Numerator of d/dy log[y^{9/2}(y-K)/((y-1)^3 (y+1)^4)] times 2y(y-K)(y-1)(y+1)."""
    K = K_lower()
    yk = lin(-K)
    ym1 = lin(-1)
    yp1 = lin(1)
    y = ipoly([0, 1])
    t1 = ip_scale(ip_mul(ip_mul(yk, ym1), yp1), 9)
    t2 = ip_scale(ip_mul(ip_mul(y, ym1), yp1), 2)
    t3 = ip_scale(ip_mul(ip_mul(y, yk), yp1), -6)
    t4 = ip_scale(ip_mul(ip_mul(y, yk), ym1), -8)
    return ip_add(ip_add(t1, t2), ip_add(t3, t4))


def _log_derivative_numerator_R3() -> IPoly:
    """Numerator of d/dy log[y^{13/2}/((y+1)^6 (y-1)^2)] times 2y(y+1)(y-1)."""
    ym1 = lin(-1)
    yp1 = lin(1)
    y = ipoly([0, 1])
    t1 = ip_scale(ip_mul(yp1, ym1), 13)
    t2 = ip_scale(ip_mul(y, ym1), -12)
    t3 = ip_scale(ip_mul(y, yp1), -4)
    return ip_add(ip_add(t1, t2), t3)


def U_magnitude(y: Interval) -> Interval:
    """4 y^{9/2} (3 - 2 sqrt2)(y - K) / ((y-1)^3 (y+1)^4)."""
    s2 = sqrt2()
    K = K_lower()
    y92 = y**4 * sqrt(y)
    return 4 * y92 * (3 - 2 * s2) * (y - K) / ((y - 1) ** 3 * (y + 1) ** 4)


def R3_magnitude(y: Interval) -> Interval:
    """4 y^{13/2} (2 - sqrt2) / ((y+1)^6 (y-1)^2)."""
    s2 = sqrt2()
    y132 = y**6 * sqrt(y)
    return 4 * y132 * (2 - s2) / ((y + 1) ** 6 * (y - 1) ** 2)


def U_density_y(y: Interval) -> Interval:
    """U(s(y)) through its factored form."""
    s2 = sqrt2()
    K = K_lower()
    pref = 4 * y * sqrt(y) * (3 - 2 * s2) * (y - K) / ((y - 1) ** 3 * (y + 1) ** 4)
    return pref * ip_eval(P3(), y)


def R3_density_y(y: Interval) -> Interval:
    s2 = sqrt2()
    K = K_lower()
    pref = 4 * y * sqrt(y) * (2 - s2) * (y - K) / ((y + 1) ** 6 * (y - 1) ** 3)
    return pref * ip_eval(P5(), y)


def U_density(s: Interval | Number) -> Interval:
    """U(s) = 1/(2(1+s/2)^{3/2}) - 1/(2(1+s)^{3/2}) - s/((2+s)^2 sqrt(1+s))."""
    si = as_interval(s)
    a = 1 + si / 2
    b = 1 + si
    return 1 / (2 * a * sqrt(a)) - 1 / (2 * b * sqrt(b)) - si / ((2 + si) ** 2 * sqrt(b))


def R3_density(s: Interval | Number) -> Interval:
    si = as_interval(s)
    a = 1 + si / 2
    b = 1 + si
    return (
        1 / (4 * a * sqrt(a))
        - si / ((si + 2) ** 2 * sqrt(b))
        + (3 * si * si - 4) / (2 * (si + 2) ** 3 * b * sqrt(b))
    )


def _certify(
    name: str,
    p: IPoly,
    bracket: tuple[Fraction, Fraction],
    log_numerator: IPoly,
    magnitude,
) -> RootCertificate:
    y0 = _isolate(p, *bracket)
    s0 = s_of_y(y0)
    deg = len(p) - 1
    # one root beyond 5: the deflated factor has negative coefficients in powers of y-5
    quotient = ip_deflate(p, y0)
    shifted = ip_taylor_shift(quotient, 5)
    lower = tuple(shifted[:-1])
    lead_ok = shifted[-1].hi < 0
    unique = all_negative(lower) and lead_ok
    # P(y) >= -y^deg beyond y0.lo
    plus = list(p)
    plus[deg] = plus[deg] + 1
    dominated = all_nonnegative(ip_taylor_shift(plus[:deg], y0.lo))
    # magnitude function decreasing beyond y0.lo
    num_shift = ip_taylor_shift(log_numerator, y0.lo)
    decreasing = all(c.hi <= 0 for c in num_shift) and num_shift[-1].hi < 0
    mag = magnitude(y0)
    tail_min = Interval(-mag.hi, -mag.lo)
    return RootCertificate(name, y0, s0, lower, unique, dominated, decreasing, tail_min)


@dataclass(frozen=True)
class TailRoots:
    P3: RootCertificate
    P5: RootCertificate

    @property
    def U_min(self) -> Interval:
        return self.P3.tail_min

    @property
    def R3_tail_min(self) -> Interval:
        return self.P5.tail_min

    @property
    def ok(self) -> bool:
        return all(
            c.unique and c.dominated and c.magnitude_decreasing and c.tail_min.hi < 0
            for c in (self.P3, self.P5)
        )


P3_BRACKET = (Fraction(30), Fraction(31))
P5_BRACKET = (Fraction(33), Fraction(34))


@lru_cache(maxsize=2)
def _isolate_tail_roots() -> TailRoots:
    c3 = _certify("P3", P3(), P3_BRACKET, _log_derivative_numerator_U(), U_magnitude)
    c5 = _certify("P5", P5(), P5_BRACKET, _log_derivative_numerator_R3(), R3_magnitude)
    return TailRoots(c3, c5)


def isolate_tail_roots() -> TailRoots:
    return _isolate_tail_roots()


def closed_form_A_coefficients(y0: Interval) -> tuple[Interval, Interval, Interval, Interval]:
    """The closed-form A0..A3 of the P5 factorisation, for cross-checking."""
    s2 = sqrt2()
    A0 = -(y0**4) + (10 * s2 + 16) * y0**3 + (48 * s2 + 38) * y0**2 + (238 * s2 + 232) * y0 + 1139 + 1200 * s2
    A1 = -(y0**3) + (11 + 10 * s2) * y0**2 + (98 * s2 + 93) * y0 + 728 * s2 + 697
    A2 = -(y0**2) + (10 * s2 + 6) * y0 + 148 * s2 + 123
    A3 = 1 + 10 * s2 - y0
    return A0, A1, A2, A3
