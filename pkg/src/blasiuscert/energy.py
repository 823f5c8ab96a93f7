"""Gronwall-type energy bounds for the linearised inner operator.

For ``L phi = phi''' + F0 phi'' + F0'' phi`` on ``[x_l, x_r]`` we bound

* ``M1, M2, M3``: sup of ``|phi''|`` for the fundamental solutions started
  with unit ``phi``, ``phi'`` and ``phi''`` at ``x_l``;
* ``M``: the operator norm of the solution map ``r -> phi''`` with zero data.

Each bound is a square root of a polynomial integral times
``exp(1/2 * int weight)``.  A weight has a "positive" branch used where a
switching expression ``g`` is non-negative and a "negative" branch elsewhere;
the two differ by exactly ``g``, so ``weight = negative + max(g, 0)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .inner import (
    InnerApproximant,
    SignChangeBracket,
    X_SPLIT,
    bracket_for,
    build_inner,
    localize_sign_changes,
)
from .numerics.elementary import exp, sqrt
from .numerics.interval import Interval
from .numerics.poly import RationalPoly

WEIGHT_EXPRESSION = {
    "Q1": "twoF0pp_minus_2F0",
    "Q2": "F0pp_minus_2F0",
    "Q": "F0pp_minus_2F0_plus_1",
}


@dataclass(frozen=True)
class EnergyWeights:
    kind: str
    x_l: Fraction
    x_r: Fraction
    branch_pos: RationalPoly
    branch_neg: RationalPoly
    switch: SignChangeBracket
    regime: str  # "positive", "negative" or "switch"

    @property
    def difference(self) -> RationalPoly:
        return self.branch_pos - self.branch_neg


def _quartic(x_l: Fraction) -> RationalPoly:
    shifted = RationalPoly([-x_l, 1])
    return shifted**4 * Fraction(1, 4)


def build_weights(
    kind: str,
    x_l: Fraction,
    x_r: Fraction,
    approx: InnerApproximant | None = None,
    brackets: Sequence[SignChangeBracket] | None = None,
) -> EnergyWeights:
    if kind not in WEIGHT_EXPRESSION:
        raise ValueError(f"unknown weight kind {kind!r}")
    x_l, x_r = Fraction(x_l), Fraction(x_r)
    if not (0 <= x_l < x_r <= Fraction(5, 2)):
        raise ValueError("interval must lie inside [0, 5/2]")
    approx = approx or build_inner()
    brackets = brackets if brackets is not None else default_brackets()
    quart = _quartic(x_l)
    F0, F0pp = approx.F0, approx.F0pp
    neg = quart * F0pp
    if kind == "Q1":
        pos = F0pp * (quart + 2) - 2 * F0
    elif kind == "Q2":
        pos = F0pp * (quart + 1) - 2 * F0
    else:
        pos = F0pp - 2 * F0 + 1 + quart * F0pp
    br = bracket_for(brackets, WEIGHT_EXPRESSION[kind])
    if x_r <= br.lo:
        regime = "positive"
    elif x_l >= br.hi:
        regime = "negative"
    else:
        regime = "switch"
    return EnergyWeights(kind, x_l, x_r, pos, neg, br, regime)


_BRACKETS: list[SignChangeBracket] = []


def default_brackets() -> list[SignChangeBracket]:
    if not _BRACKETS:
        _BRACKETS.extend(localize_sign_changes())
    return _BRACKETS


def weight_integral_upper(w: EnergyWeights) -> Fraction:
    """Upper bound for the integral of the weight over [x_l, x_r].

    ``g`` is positive left of its unique zero and decreasing on [1/8, 5/2],
    so inside the bracket ``g <= g(max(x_l, bracket.lo))``.
    """
    total = w.branch_neg.integrate(w.x_l, w.x_r)
    g = w.difference
    if w.regime == "positive":
        return total + g.integrate(w.x_l, w.x_r)
    if w.regime == "negative":
        return total
    br = w.switch
    left_end = min(w.x_r, br.lo)
    if left_end > w.x_l:
        total += g.integrate(w.x_l, left_end)
    start = max(w.x_l, br.lo)
    stop = min(w.x_r, br.hi)
    if stop > start:
        assert start >= X_SPLIT
        total += (stop - start) * max(g(start), Fraction(0))
    return total


@dataclass(frozen=True)
class EnergyBoundSet:
    x_l: Fraction
    x_r: Fraction
    M1: Interval
    M2: Interval
    M3: Interval
    M: Interval
    integrals: dict[str, Fraction]
    refinement_depth: int = 0

    def as_dict(self) -> dict[str, Interval]:
        return {"M1": self.M1, "M2": self.M2, "M3": self.M3, "M": self.M}


def _upper(value: Interval) -> Interval:
    return Interval(0, value.hi)


class EnergyCalculator:
    """Caches weight integrals for one interval and one approximant."""

    def __init__(
        self,
        x_l: Fraction,
        x_r: Fraction,
        approx: InnerApproximant | None = None,
        brackets: Sequence[SignChangeBracket] | None = None,
    ) -> None:
        self.x_l, self.x_r = Fraction(x_l), Fraction(x_r)
        self.approx = approx or build_inner()
        self.brackets = brackets if brackets is not None else default_brackets()
        self._integrals: dict[str, Fraction] = {}

    def integral(self, kind: str) -> Fraction:
        if kind not in self._integrals:
            w = build_weights(kind, self.x_l, self.x_r, self.approx, self.brackets)
            self._integrals[kind] = weight_integral_upper(w)
        return self._integrals[kind]

    def growth(self, kind: str) -> Interval:
        return exp(self.integral(kind) / 2)

    def M1(self) -> Interval:
        rise = self.approx.F0p(self.x_r) - self.approx.F0p(self.x_l)
        return _upper(sqrt(rise) * self.growth("Q1"))

    def M2(self) -> Interval:
        moment = (RationalPoly([-self.x_l, 1]) ** 2 * self.approx.F0pp).integrate(self.x_l, self.x_r)
        return _upper(sqrt(moment) * self.growth("Q1"))

    def M3(self) -> Interval:
        return _upper(self.growth("Q2"))

    def M(self) -> Interval:
        return _upper(sqrt(self.x_r - self.x_l) * self.growth("Q"))

    def bounds(self) -> EnergyBoundSet:
        m1, m2, m3, m = self.M1(), self.M2(), self.M3(), self.M()
        return EnergyBoundSet(self.x_l, self.x_r, m1, m2, m3, m, dict(self._integrals))


def bound_M1(x_l: Fraction, x_r: Fraction, **kw) -> Interval:
    return EnergyCalculator(x_l, x_r, **kw).M1()


def bound_M2(x_l: Fraction, x_r: Fraction, **kw) -> Interval:
    return EnergyCalculator(x_l, x_r, **kw).M2()


def bound_M3(x_l: Fraction, x_r: Fraction, **kw) -> Interval:
    return EnergyCalculator(x_l, x_r, **kw).M3()


def bound_M(x_l: Fraction, x_r: Fraction, **kw) -> Interval:
    return EnergyCalculator(x_l, x_r, **kw).M()


def energy_bounds(x_l: Fraction, x_r: Fraction, **kw) -> EnergyBoundSet:
    return EnergyCalculator(x_l, x_r, **kw).bounds()
