"""Inner-region contraction checks and propagation of the error bounds.

On each interval the error ``E = F - F0`` satisfies a fixed-point equation
for ``E''``.  Given bounds on ``E, E', E''`` at the left end, the energy
constants and ``sup|R|``, two inequalities make the map a contraction on a
ball of radius ``B0 (1 + eps)``; integrating then bounds ``E'`` and ``E``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .energy import EnergyBoundSet, default_brackets, energy_bounds
from .inner import (
    InnerApproximant,
    PieceBound,
    X_C,
    X_END,
    Partition,
    bound_remainder,
    build_inner,
    poly_pieces,
    union_over,
)
from .numerics.interval import Interval

DEFAULT_INTERVALS: tuple[tuple[Fraction, Fraction], ...] = (
    (Fraction(0), X_C),
    (X_C, Fraction(2)),
    (Fraction(2), X_END),
)
DEFAULT_EPSILONS: tuple[Fraction, ...] = (Fraction("3e-6"), Fraction("2e-6"), Fraction("3e-6"))

# global targets for (E'', E', E)
GLOBAL_LIMITS = (Fraction("3.5e-6"), Fraction("4.5e-6"), Fraction("4e-6"))


@dataclass(frozen=True)
class IntervalErrorState:
    E_abs: Interval
    Ep_abs: Interval
    Epp_abs: Interval
    at_point: bool = True

    @classmethod
    def zero(cls) -> "IntervalErrorState":
        return cls(Interval(0), Interval(0), Interval(0), True)

    def as_tuple(self) -> tuple[Interval, Interval, Interval]:
        return self.E_abs, self.Ep_abs, self.Epp_abs


@dataclass(frozen=True)
class InnerContractionCert:
    interval_id: int
    x_l: Fraction
    x_r: Fraction
    B0: Interval
    epsilon: Fraction
    cond1_lhs: Interval
    cond2_lhs: Interval
    Epp_bound: Interval
    Ep_bound: Interval
    E_bound: Interval
    Eppp_bound: Interval
    R_sup: Interval
    energy: EnergyBoundSet
    verdict: bool
    failure: str = ""


def compute_B0(state_in: IntervalErrorState, bounds: EnergyBoundSet, R_sup: Interval) -> Interval:
    # M_j multiplies the (j-1)-th derivative of E at x_l
    return (
        bounds.M * R_sup
        + bounds.M1 * state_in.E_abs
        + bounds.M2 * state_in.Ep_abs
        + bounds.M3 * state_in.Epp_abs
    )


def verify_inner_contraction(
    interval: tuple[Fraction, Fraction],
    state_in: IntervalErrorState,
    bounds: EnergyBoundSet,
    R_sup: Interval,
    epsilon: Fraction,
    F0_sup: Fraction = Fraction(0),
    F0pp_sup: Fraction = Fraction(0),
    interval_id: int = 0,
) -> InnerContractionCert:
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    x_l, x_r = interval
    w = x_r - x_l
    one_eps = 1 + Interval(epsilon)
    B0 = compute_B0(state_in, bounds, R_sup)
    M = bounds.M
    start = state_in.E_abs + w * state_in.Ep_abs
    cond1 = M * start * one_eps + Fraction(1, 2) * w * w * M * B0 * one_eps * one_eps
    cond2 = M * start + w * w * M * B0 * one_eps
    ok1 = cond1.hi < epsilon
    ok2 = cond2.hi < 1
    failure = ""
    if not ok1:
        failure = "first contraction inequality (ball maps into itself)"
    elif not ok2:
        failure = "second contraction inequality (Lipschitz constant below one)"
    Epp = B0 * one_eps
    Ep = state_in.Ep_abs + w * Epp
    E = state_in.E_abs + w * state_in.Ep_abs + Fraction(1, 2) * w * w * Epp
    half_w2 = Fraction(1, 2) * w * w
    Eppp = (
        F0_sup * one_eps * B0
        + F0pp_sup * start
        + half_w2 * F0pp_sup * B0 * one_eps
        + half_w2 * B0 * B0 * one_eps * one_eps
        + R_sup
    )
    return InnerContractionCert(
        interval_id=interval_id,
        x_l=x_l,
        x_r=x_r,
        B0=B0,
        epsilon=Fraction(epsilon),
        cond1_lhs=cond1,
        cond2_lhs=cond2,
        Epp_bound=Epp,
        Ep_bound=Ep,
        E_bound=E,
        Eppp_bound=Eppp,
        R_sup=R_sup,
        energy=bounds,
        verdict=ok1 and ok2,
        failure=failure,
    )


def integrate_error_state(
    cert: InnerContractionCert, state_in: IntervalErrorState, x_l: Fraction, x_r: Fraction
) -> IntervalErrorState:
    """Sup bounds over [x_l, x_r]; these are also the bounds at x_r."""
    if not cert.verdict:
        raise ValueError(f"interval {cert.interval_id} did not pass: {cert.failure}")
    w = x_r - x_l
    Epp = cert.Epp_bound
    Ep = state_in.Ep_abs + w * Epp
    E = state_in.E_abs + w * state_in.Ep_abs + Fraction(1, 2) * w * w * Epp
    return IntervalErrorState(Interval(0, E.hi), Interval(0, Ep.hi), Interval(0, Epp.hi), False)


@dataclass
class InnerPipelineResult:
    final_state: IntervalErrorState
    certs: list[InnerContractionCert]
    global_bounds: tuple[Interval, Interval, Interval]  # (E'', E', E)
    verdict: bool
    failure: str = ""
    remainder: list[PieceBound] = field(default_factory=list)


def run_inner_pipeline(
    intervals: Sequence[tuple[Fraction, Fraction]] = DEFAULT_INTERVALS,
    epsilons: Sequence[Fraction] = DEFAULT_EPSILONS,
    approx: InnerApproximant | None = None,
    partition: Partition | None = None,
) -> InnerPipelineResult:
    approx = approx or build_inner()
    partition = partition or Partition.default()
    if len(intervals) != len(epsilons):
        raise ValueError("need one epsilon per interval")
    if intervals[0][0] != 0 or intervals[-1][1] != X_END:
        raise ValueError("intervals must cover [0, 5/2]")
    remainder = bound_remainder(partition, approx)
    F0_pieces = poly_pieces(approx.F0, partition)
    F0pp_pieces = poly_pieces(approx.F0pp, partition)
    brackets = default_brackets()
    state = IntervalErrorState.zero()
    certs: list[InnerContractionCert] = []
    failure = ""
    for idx, ((x_l, x_r), eps) in enumerate(zip(intervals, epsilons), start=1):
        R_sup = Interval(0, union_over(remainder, x_l, x_r).mag)
        bounds = energy_bounds(x_l, x_r, approx=approx, brackets=brackets)
        cert = verify_inner_contraction(
            (x_l, x_r),
            state,
            bounds,
            R_sup,
            Fraction(eps),
            F0_sup=union_over(F0_pieces, x_l, x_r).mag,
            F0pp_sup=union_over(F0pp_pieces, x_l, x_r).mag,
            interval_id=idx,
        )
        certs.append(cert)
        if not cert.verdict:
            failure = f"interval {idx}: {cert.failure}"
            break
        state = integrate_error_state(cert, state, x_l, x_r)
    if failure:
        glob = (Interval(0), Interval(0), Interval(0))
        return InnerPipelineResult(state, certs, glob, False, failure, remainder)
    glob = (
        Interval(0, max(c.Epp_bound.hi for c in certs)),
        Interval(0, max(c.Ep_bound.hi for c in certs)),
        Interval(0, max(c.E_bound.hi for c in certs)),
    )
    within = all(g.hi <= lim for g, lim in zip(glob, GLOBAL_LIMITS))
    if not within:
        failure = "global error bounds exceed their targets"
    return InnerPipelineResult(state, certs, glob, within, failure, remainder)
