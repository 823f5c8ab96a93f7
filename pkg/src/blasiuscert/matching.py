"""Matching the inner polynomial and the far-field representation at x = 5/2.

Equating F, F' and F'' of both representations gives a fixed-point problem
``A = N(A)`` for ``A = (a, b/2, c/2)``.  It is certified on the weighted ball
``||A - A0||_2 <= rho0`` by bounding the residual ``||A0 - N(A0)||_2`` and the
norm of the Jacobian ``alpha`` over the ball, and checking
``residual <= (1 - alpha) rho0`` with ``alpha < 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from .contraction import IntervalErrorState, run_inner_pipeline
from .farfield import (
    FarFieldConstants,
    FarFieldParams,
    LaplaceValues,
    B_eval,
    compute_constants,
    q0_eval,
    q0_shifted_derivative,
    V_eval,
)
from .inner import InnerApproximant, build_inner
from .numerics.elementary import exp, sqrt, sqrt2
from .numerics.interval import Interval, Number, as_interval

X_MATCH = Fraction(5, 2)
CENTER: tuple[Fraction, Fraction, Fraction] = (
    Fraction(3221, 1946),
    Fraction(-2763, 1765),
    Fraction(377, 1613),
)
RHO0 = Fraction(5, 100000)

RESIDUAL_BANDS = (Fraction("4.81e-6"), Fraction("1.64e-5"), Fraction("1.33e-5"))
RESIDUAL_NORM_BAND = Fraction("1.16e-5")
JACOBIAN_BANDS = (
    (Fraction("0.081"), Fraction("0.059"), Fraction("0.163")),
    (Fraction("0.232"), Fraction("0.168"), Fraction("0.468")),
    (Fraction("0.44"), Fraction("0.384"), Fraction("0.0029")),
)
ALPHA_BAND = Fraction("0.764")
# rows weight N = (N1, N2/2, N3/2), columns undo A = (a, b/2, c/2)
JACOBIAN_WEIGHTS = (
    (Fraction(1), Fraction(2), Fraction(2)),
    (Fraction(1, 2), Fraction(1), Fraction(1)),
    (Fraction(1, 2), Fraction(1), Fraction(1)),
)

FPP0_BAND = (Fraction("0.469578"), Fraction("0.469622"))
FPP0_BLASIUS_BAND = (Fraction("0.3320414"), Fraction("0.3320734"))


@dataclass(frozen=True)
class TripleEnclosure:
    a: Interval
    b: Interval
    c: Interval
    rho0: Fraction
    center: tuple[Fraction, Fraction, Fraction] = CENTER

    @classmethod
    def around(
        cls, center: Sequence[Number] = CENTER, rho0: Number = RHO0
    ) -> "TripleEnclosure":
        rho = Fraction(rho0)
        if rho <= 0:
            raise ValueError("rho0 must be positive")
        a0, b0, c0 = (Fraction(v) for v in center)
        if a0 - rho <= 0:
            raise ValueError("a must stay positive on the ball")
        return cls(
            Interval(a0 - rho, a0 + rho),
            Interval(b0 - 2 * rho, b0 + 2 * rho),
            Interval(c0 - 2 * rho, c0 + 2 * rho),
            rho,
            (a0, b0, c0),
        )

    def weighted_distance(self, a: float, b: float, c: float) -> float:
        a0, b0, c0 = (float(v) for v in self.center)
        return ((a - a0) ** 2 + (b - b0) ** 2 / 4 + (c - c0) ** 2 / 4) ** 0.5

    def contains(self, a: float, b: float, c: float) -> bool:
        return self.weighted_distance(a, b, c) <= float(self.rho0)


def t_m_exact(a: Number, b: Number) -> Fraction:
    """t at x = 5/2: (a/2)(5/2 + b/a)^2 = (5a/2 + b)^2 / (2a)."""
    a, b = Fraction(a), Fraction(b)
    return (X_MATCH * a + b) ** 2 / (2 * a)


def t_m_bounds(a_range: Interval, b_range: Interval) -> Interval:
    """Exact range of t_m over the box; t_m increases in a and in b there."""
    if a_range.lo <= 0:
        raise ValueError("a must be positive")
    if X_MATCH * a_range.lo + b_range.lo <= 0:
        raise ValueError("x = 5/2 must lie to the right of -b/a on the whole box")
    # d t_m/da = (25/4 - b^2/a^2)/2 > 0 requires |b|/a < 5/2
    if (b_range.mag / a_range.lo) >= X_MATCH:
        raise ValueError("t_m is not monotone in a on this box")
    return Interval(t_m_exact(a_range.lo, b_range.lo), t_m_exact(a_range.hi, b_range.hi))


def matching_constants(
    triple: TripleEnclosure, epsilon: Fraction | None = None
) -> FarFieldConstants:
    """Far-field constants valid for t >= t_{m,l} and |c| <= c_r."""
    tm = t_m_bounds(triple.a, triple.b)
    kw = {} if epsilon is None else {"epsilon": Fraction(epsilon)}
    return compute_constants(FarFieldParams(T=tm.lo, c_max=triple.c.hi, **kw))


@dataclass(frozen=True)
class InnerValuesAtMatch:
    F: Fraction
    Fp: Fraction
    Fpp: Fraction
    state: IntervalErrorState


def inner_values(state: IntervalErrorState, approx: InnerApproximant | None = None) -> InnerValuesAtMatch:
    approx = approx or build_inner()
    return InnerValuesAtMatch(approx.F0(X_MATCH), approx.F0p(X_MATCH), approx.F0pp(X_MATCH), state)


def _up(x: Interval) -> Interval:
    return Interval(0, x.mag)


@dataclass(frozen=True)
class ResidualBound:
    components: tuple[Interval, Interval, Interval]
    norm: Interval
    t_m0: Fraction
    within_bands: bool


def _check_constants(constants: FarFieldConstants, triple: TripleEnclosure) -> None:
    tm = t_m_bounds(triple.a, triple.b)
    if constants.T > tm.lo or constants.c < triple.c.hi:
        raise ValueError("far-field constants do not cover the matching box")
    if not constants.contraction.verdict:
        raise ValueError("far-field contraction failed: " + constants.contraction.failure)


def _weighted_norm(r1: Interval, r2: Interval, r3: Interval) -> Interval:
    sq = r1.sqr() + r2.sqr() / 4 + r3.sqr() / 4
    return _up(sqrt(sq))


def residual_bound(
    inner_state: IntervalErrorState,
    constants: FarFieldConstants,
    triple: TripleEnclosure | None = None,
    approx: InnerApproximant | None = None,
) -> ResidualBound:
    triple = triple or TripleEnclosure.around()
    _check_constants(constants, triple)
    iv = inner_values(inner_state, approx)
    a0, b0, c0 = triple.center
    tm0 = t_m_exact(a0, b0)
    t = Interval(tm0)
    lv = LaplaceValues.at(t)
    h = constants.h_norm
    E, Ep, Epp = inner_state.E_abs.mag, inner_state.Ep_abs.mag, inner_state.Epp_abs.mag
    e3 = exp(-3 * t)
    q0 = q0_eval(t, c0, lv)
    D = q0_shifted_derivative(t, c0, lv)
    V = V_eval(t, c0, lv)
    r1 = abs(a0 - iv.Fp + a0 * D) + Ep + a0 / 3 / (t * sqrt(t)) * e3 * h
    r2 = (
        abs(b0 - iv.F + X_MATCH * a0 + sqrt(a0 / (2 * t)) * q0)
        + X_MATCH * r1
        + E
        + sqrt(Interval(a0) / 2) / 9 / (t * t) * e3 * h
    )
    scale = exp(t) / (sqrt2() * a0 * sqrt(Interval(a0)))
    h_at = exp(-2 * t) / (c0 * t) * h
    W_low = V - h_at
    if W_low.lo <= 0:
        raise ValueError("V(t_m0) - |h|/c0 is not positive")
    r3 = (
        abs(c0 - scale * iv.Fpp / V)
        + iv.Fpp / (sqrt2() * c0 * a0 * sqrt(Interval(a0))) / t * exp(-t) * h / W_low / V
        + scale * Epp / W_low
    )
    comps = (_up(r1), _up(r2), _up(r3))
    norm = _weighted_norm(*comps)
    ok = all(cmp.hi <= band for cmp, band in zip(comps, RESIDUAL_BANDS)) and norm.hi <= RESIDUAL_NORM_BAND
    return ResidualBound(comps, norm, tm0, ok)


@dataclass(frozen=True)
class JacobianBound:
    entries: tuple[tuple[Interval, ...], ...]  # bounds on |d N_i / d (a, b, c)_j|
    J_norm2: Interval
    t_m_range: Interval
    within_bands: bool

    def weighted_entries(self) -> list[list[Interval]]:
        return [[e * w for e, w in zip(row, wrow)] for row, wrow in zip(self.entries, JACOBIAN_WEIGHTS)]


def jacobian_norm(entries: Sequence[Sequence[Interval]]) -> Interval:
    total = Interval(0)
    for row, wrow in zip(entries, JACOBIAN_WEIGHTS):
        for e, w in zip(row, wrow):
            total = total + (w * w) * e.sqr()
    return _up(sqrt(total))


def jacobian_bound(
    constants: FarFieldConstants,
    inner_state: IntervalErrorState,
    triple: TripleEnclosure | None = None,
    approx: InnerApproximant | None = None,
) -> JacobianBound:
    """Bounds on the nine partial derivatives of (N1, N2, N3) over the box.

    The q0/B parts of the a-derivatives are enclosed directly over the whole
    box (t, a, b, c all intervals); every h-term uses the sup bounds
    h_m, h_dm, h_cm of the far field.
    """
    triple = triple or TripleEnclosure.around()
    _check_constants(constants, triple)
    iv = inner_values(inner_state, approx)
    a, b, c = triple.a, triple.b, triple.c
    tm = t_m_bounds(a, b)
    t_l, t_r = Interval(tm.lo), Interval(tm.hi)
    a_l, a_r = Interval(a.lo), Interval(a.hi)
    c_l = Interval(c.lo)
    k = constants
    hm, hdm, hcm = k.h_m, k.h_dm, k.h_cm

    X = Fraction(25, 4) - b.sqr() / a.sqr()
    lv = LaplaceValues.at(tm)
    D_box = q0_shifted_derivative(tm, c, lv)
    B_box = B_eval(tm, c, lv)
    q0_box = q0_eval(tm, c, lv)
    e_l = exp(-t_l)
    sq_l = sqrt(t_l)

    # N1
    dN1a = abs(-D_box + a * X * sqrt(tm) * B_box).mag + (e_l / sq_l * hm * (1 + a_r / 2 * X.hi)).hi
    dN1b = (sqrt(2 * a_r) * (2 * t_r * k.Bm + e_l * hm)).hi
    dN1c = (a_r * k.q0dcm + a_r * e_l / sq_l * hcm).hi

    # N2
    half_inv = 1 / (2 * sqrt(2 * a * tm))
    dN2a = (
        X_MATCH * dN1a
        + (half_inv * abs(q0_box + a * X * D_box)).mag
        + (e_l / (2 * sqrt2() * sqrt(a_l) * t_l) * (1 + a_r * X.hi) * hm).hi
    )
    dN2b = X_MATCH * dN1b + (k.q0dm + e_l / sq_l * hm).hi
    dN2c = X_MATCH * dN1c + (sqrt(a_r / (2 * t_l)) * k.q0cm + sqrt(a_r / 2) / t_l * hcm * e_l).hi

    # N3 = e^{t} F''(5/2) / (sqrt2 a^{3/2} W),  W = V + h/c
    Fpp = iv.Fpp + inner_state.Epp_abs.mag
    W_low = k.Vmin.lo - hm / c_l
    if W_low.lo <= 0:
        raise ValueError("Vmin - h_m/c_l is not positive")
    W = Interval(W_low.lo, (k.Vm + hm / c_l).hi)
    Wp = Interval((-k.Vdm - hdm / c_l).lo, (hdm / c_l).hi)
    e_r = exp(t_r)
    N3_mag = e_r * Fpp / (sqrt2() * a_l * sqrt(a_l) * W_low)
    brace = -3 / a + X * (1 - Wp / W)
    dN3a = (N3_mag / 2 * brace.mag).hi
    dN3b = (sqrt(t_r) / (a_l * a_l) * e_r * Fpp / W_low.sqr() * (k.Vm + hm / c_l + k.Vdm + hdm / c_l)).hi
    dN3c = (e_r / (sqrt2() * a_l * sqrt(a_l)) * Fpp / W_low.sqr() * (k.Vcm + hcm / c_l + hm / (c_l * c_l))).hi

    raw = ((dN1a, dN1b, dN1c), (dN2a, dN2b, dN2c), (dN3a, dN3b, dN3c))
    entries = tuple(tuple(Interval(0, v) for v in row) for row in raw)
    norm = jacobian_norm(entries)
    ok = all(
        e.hi <= band for row, brow in zip(entries, JACOBIAN_BANDS) for e, band in zip(row, brow)
    ) and norm.hi <= ALPHA_BAND
    return JacobianBound(entries, norm, tm, ok)


@dataclass(frozen=True)
class MatchCert:
    residual_components: tuple[Interval, Interval, Interval]
    residual_norm: Interval
    jacobian_entries: tuple[tuple[Interval, ...], ...]
    J_norm2: Interval
    alpha: Interval
    rho0: Fraction
    verdict: bool
    t_m_range: Interval
    failure: str = ""
    bands_ok: bool = True


def certify_matching(
    residual: ResidualBound | Interval,
    jacobian: JacobianBound | Interval,
    rho0: Number = RHO0,
) -> MatchCert:
    """Contraction on the weighted ball: residual <= (1 - alpha) rho0, alpha < 1."""
    rho = Fraction(rho0)
    res_norm = residual.norm if isinstance(residual, ResidualBound) else as_interval(residual)
    alpha = jacobian.J_norm2 if isinstance(jacobian, JacobianBound) else as_interval(jacobian)
    failure = ""
    if alpha.hi >= 1:
        failure = "Jacobian norm is not below one"
    elif res_norm.hi > (1 - alpha.hi) * rho:
        failure = "residual exceeds (1 - alpha) rho0"
    comps = residual.components if isinstance(residual, ResidualBound) else (res_norm,) * 3
    entries = jacobian.entries if isinstance(jacobian, JacobianBound) else ((alpha,) * 3,) * 3
    tm = jacobian.t_m_range if isinstance(jacobian, JacobianBound) else Interval(0)
    bands = getattr(residual, "within_bands", True) and getattr(jacobian, "within_bands", True)
    return MatchCert(comps, res_norm, entries, alpha, alpha, rho, not failure, tm, failure, bands)


@dataclass
class MatchingResult:
    triple: TripleEnclosure
    constants: FarFieldConstants
    residual: ResidualBound
    jacobian: JacobianBound
    cert: MatchCert
    extra: dict = field(default_factory=dict)


def run_matching(
    inner_state: IntervalErrorState | None = None,
    rho0: Number = RHO0,
    center: Sequence[Number] = CENTER,
    approx: InnerApproximant | None = None,
    epsilon: Fraction | None = None,
) -> MatchingResult:
    if inner_state is None:
        inner_state = run_inner_pipeline().final_state
    triple = TripleEnclosure.around(center, rho0)
    constants = matching_constants(triple, epsilon)
    res = residual_bound(inner_state, constants, triple, approx)
    jac = jacobian_bound(constants, inner_state, triple, approx)
    return MatchingResult(triple, constants, res, jac, certify_matching(res, jac, triple.rho0))


# nonrigorous inner error sizes observed against a numerical solution
OBSERVED_INNER_ERRORS = (Fraction("2e-7"), Fraction("2e-7"), Fraction("5e-7"))
SMALL_RHO0 = Fraction("1.4e-5")


def observed_error_state() -> IntervalErrorState:
    E, Ep, Epp = OBSERVED_INNER_ERRORS
    return IntervalErrorState(Interval(0, E), Interval(0, Ep), Interval(0, Epp), False)


def secondary_certificate(rho0: Number = SMALL_RHO0) -> MatchingResult:
    """Matching on the smaller ball, with observed (not proven) inner errors."""
    return run_matching(observed_error_state(), rho0)


@dataclass(frozen=True)
class WallStress:
    fpp0: Interval
    fpp0_blasius: Interval

    @property
    def within_bands(self) -> bool:
        return (
            FPP0_BAND[0] <= self.fpp0.lo
            and self.fpp0.hi <= FPP0_BAND[1]
            and FPP0_BLASIUS_BAND[0] <= self.fpp0_blasius.lo
            and self.fpp0_blasius.hi <= FPP0_BLASIUS_BAND[1]
        )


def wall_stress(triple: TripleEnclosure | Interval) -> WallStress:
    """f''(0) = a^{-3/2}; the classical normalisation divides by sqrt2."""
    a = triple.a if isinstance(triple, TripleEnclosure) else as_interval(triple)
    if a.lo <= 0:
        raise ValueError("a must be positive")
    fpp0 = 1 / (a * sqrt(a))
    return WallStress(fpp0, fpp0 / sqrt2())


# ---------------------------------------------------------------------------
# floating-point fixed point with h = E = 0


def _mp_maps(Fv: Fraction, Fpv: Fraction, Fppv: Fraction):
    F, Fp, Fpp = (mpmath.mpf(v.numerator) / v.denominator for v in (Fv, Fpv, Fppv))

    def I0(t):
        return 1 - mpmath.sqrt(mpmath.pi * t) * mpmath.exp(t) * mpmath.erfc(mpmath.sqrt(t))

    def pieces(t, c):
        i0, j0 = I0(t), I0(2 * t)
        e = mpmath.exp(-t)
        I1 = 2 * t * i0
        I2 = 2 * t / 3 * (1 - I1)
        q0 = 2 * c * mpmath.sqrt(t) * e * i0 + c * c * e * e * (2 * j0 - i0 - i0 * i0)
        D = -c * e / mpmath.sqrt(t) * (1 - i0) - c * c * e * e / (4 * t * t) * (3 * I2 - 2 * I1 + I1 * I1 / (2 * t))
        V = 1 + c * e / (4 * t * mpmath.sqrt(t)) * (3 * I2 - I1)
        return q0, D, V

    def N(a, b, c):
        t = a / 2 * (mpmath.mpf(5) / 2 + b / a) ** 2
        q0, D, V = pieces(t, c)
        n1 = Fp - a * D
        n2 = F - mpmath.mpf(5) / 2 * n1 - mpmath.sqrt(a / (2 * t)) * q0
        n3 = mpmath.exp(t) * Fpp / (mpmath.sqrt(2) * a * mpmath.sqrt(a) * V)
        return n1, n2, n3

    return N


def c2_triple_mp(
    max_iter: int = 50, tol: float = 1e-30, approx: InnerApproximant | None = None, dps: int = 40
) -> tuple:
    """Fixed point of N with h = 0 and E = 0, as mpmath numbers."""
    approx = approx or build_inner()
    with mpmath.workdps(dps):
        N = _mp_maps(approx.F0(X_MATCH), approx.F0p(X_MATCH), approx.F0pp(X_MATCH))
        start = [mpmath.mpf(v.numerator) / v.denominator for v in CENTER]
        try:
            sol = mpmath.findroot(
                lambda a, b, c: [x - n for x, n in zip((a, b, c), N(a, b, c))],
                start,
                tol=tol,
                maxsteps=max_iter,
            )
        except ValueError as exc:
            raise RuntimeError("fixed-point iteration did not converge") from exc
        return tuple(+sol[i] for i in range(3))


def c2_triple(max_iter: int = 50, tol: float = 1e-30) -> tuple[float, float, float]:
    a, b, c = c2_triple_mp(max_iter, tol)
    return float(a), float(b), float(c)
