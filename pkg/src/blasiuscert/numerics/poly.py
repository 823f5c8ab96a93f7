"""Dense polynomials with exact rational coefficients, plus range bounding.

``range_bound`` follows a simple scheme: map the interval onto [-1, 1], keep
the cubic head exactly (its extrema come from calculus) and bound the tail
``sum_{k>=4} a_k tau^k`` by the l1 norm of its coefficients.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .elementary import sqrt
from .interval import Interval, Number, as_interval, to_fraction


class RationalPoly:
    """Polynomial sum_k coeffs[k] x^k with Fraction coefficients."""

    __slots__ = ("coeffs",)

    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Iterable[Number | str]) -> None:
        cs = [to_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("RationalPoly is immutable")

    @classmethod
    def x(cls) -> "RationalPoly":
        return cls([0, 1])

    @classmethod
    def const(cls, c: Number) -> "RationalPoly":
        return cls([c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # zero polynomial has degree -1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other: "RationalPoly | Number") -> "RationalPoly":
        o = _as_poly(other)
        n = max(len(self.coeffs), len(o.coeffs))
        return RationalPoly(self.coeff(k) + o.coeff(k) for k in range(n))

    __radd__ = __add__

    def __neg__(self) -> "RationalPoly":
        return RationalPoly(-c for c in self.coeffs)

    def __sub__(self, other: "RationalPoly | Number") -> "RationalPoly":
        return self + (-_as_poly(other))

    def __rsub__(self, other: "RationalPoly | Number") -> "RationalPoly":
        return _as_poly(other) - self

    def __mul__(self, other: "RationalPoly | Number") -> "RationalPoly":
        o = _as_poly(other)
        if self.is_zero() or o.is_zero():
            return RationalPoly([])
        out = [Fraction(0)] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(o.coeffs):
                out[i + j] += a * b
        return RationalPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "RationalPoly":
        result = RationalPoly([1])
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, RationalPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == _as_poly(other).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"RationalPoly(degree={self.degree})"

    # -- calculus -------------------------------------------------------------
    def derivative(self, order: int = 1) -> "RationalPoly":
        p = self
        for _ in range(order):
            p = RationalPoly(k * c for k, c in enumerate(p.coeffs) if k > 0)
        return p

    def antiderivative(self) -> "RationalPoly":
        return RationalPoly([0] + [c / (k + 1) for k, c in enumerate(self.coeffs)])

    def integrate(self, x_l: Number, x_r: Number) -> Fraction:
        anti = self.antiderivative()
        return anti(to_fraction(x_r)) - anti(to_fraction(x_l))

    # -- evaluation -------------------------------------------------------------
    def __call__(self, x: Number | str) -> Fraction:
        xq = to_fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * xq + c
        return acc

    def eval_interval(self, x: Interval | Number) -> Interval:
        """Horner evaluation in interval arithmetic (a crude enclosure)."""
        xi = as_interval(x)
        acc = Interval(0)
        for c in reversed(self.coeffs):
            acc = acc * xi + c
        return acc

    def eval_float(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def compose_affine(self, shift: Number, scale: Number) -> "RationalPoly":
        """Return p(shift + scale*tau) as a polynomial in tau."""
        s, h = to_fraction(shift), to_fraction(scale)
        lin = RationalPoly([s, h])
        acc = RationalPoly([])
        for c in reversed(self.coeffs):
            acc = acc * lin + c
        return acc

    def float_coeffs(self) -> list[float]:
        return [float(c) for c in self.coeffs]


def _as_poly(p: "RationalPoly | Number") -> RationalPoly:
    return p if isinstance(p, RationalPoly) else RationalPoly([p])


def poly_arith(p: RationalPoly, q: RationalPoly, op: str) -> RationalPoly:
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown op {op!r}")


def poly_affine_recenter(p: RationalPoly, x_l: Number, x_r: Number) -> RationalPoly:
    """p composed with tau -> (x_l+x_r)/2 + (x_r-x_l) tau/2."""
    lo, hi = to_fraction(x_l), to_fraction(x_r)
    if lo == hi:
        raise ValueError("degenerate interval")
    if lo > hi:
        raise ValueError("x_l must be below x_r")
    return p.compose_affine((lo + hi) / 2, (hi - lo) / 2)


def poly_antiderivative(p: RationalPoly) -> RationalPoly:
    return p.antiderivative()


def definite_integral(p: RationalPoly, x_l: Number, x_r: Number) -> Fraction:
    return p.integrate(x_l, x_r)


def _min_max_of(values: Sequence[Interval]) -> tuple[Interval, Interval]:
    lo = Interval(min(v.lo for v in values), min(v.hi for v in values))
    hi = Interval(max(v.lo for v in values), max(v.hi for v in values))
    return lo, hi


def cubic_minmax(p3: RationalPoly) -> tuple[Interval, Interval]:
    """Enclosures of min and max of a polynomial of degree <= 3 on [-1, 1]."""
    if p3.degree > 3:
        raise ValueError("cubic_minmax needs degree <= 3")
    a1, a2, a3 = p3.coeff(1), p3.coeff(2), p3.coeff(3)
    candidates = [Interval(p3(-1)), Interval(p3(1))]
    unit = Interval(-1, 1)
    if a3 == 0:
        if a2 != 0:
            tau = -a1 / (2 * a2)
            if -1 <= tau <= 1:
                candidates.append(Interval(p3(tau)))
    else:
        # p3' = 3 a3 tau^2 + 2 a2 tau + a1
        disc = 4 * a2 * a2 - 12 * a3 * a1
        if disc >= 0:
            root = sqrt(disc)
            for sign in (1, -1):
                tau = (-2 * a2 + sign * root) / (6 * a3)
                if tau.hi < -1 or tau.lo > 1:
                    continue
                # clipping keeps every candidate an attained value on [-1, 1]
                tau = tau.intersect(unit)
                candidates.append(p3.eval_interval(tau))
    return _min_max_of(candidates)


def tail_l1(q: RationalPoly, start: int = 4) -> Fraction:
    return sum((abs(c) for c in q.coeffs[start:]), Fraction(0))


def range_bound(p: RationalPoly, x_l: Number, x_r: Number) -> Interval:
    """Rigorous enclosure of {p(x) : x in [x_l, x_r]}."""
    q = poly_affine_recenter(p, x_l, x_r)
    head = RationalPoly(q.coeffs[:4])
    tail = tail_l1(q)
    mn, mx = cubic_minmax(head)
    return Interval(mn.lo - tail, mx.hi + tail)


def range_bound_pieces(p: RationalPoly, breakpoints: Sequence[Number]) -> Interval:
    """Hull of range_bound over consecutive pieces of a partition."""
    pieces = [range_bound(p, a, b) for a, b in zip(breakpoints[:-1], breakpoints[1:])]
    return Interval.hull(*pieces)
