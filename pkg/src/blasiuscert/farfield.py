"""Far-field representation for x > 5/2.

With ``t = (a/2)(x + b/a)^2`` the solution is written as
``F = a x + b + sqrt(a/(2t)) (q0(t) + Err(t))`` where

    q0(t) = 2 c sqrt(t) e^{-t} I0 + c^2 e^{-2t} (2 J0 - I0 - I0^2)

and ``Err`` is driven by an auxiliary function ``h`` that solves a
contractive integral equation in the weighted norm
``||h|| = sup_{t >= T} t e^{2t} |h(t)|``.  This module encloses q0 and
the closed forms derived from it, computes every constant of the
contraction argument and checks the contraction.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import Iterable

from .tail_roots import TailRoots, isolate_tail_roots
from .numerics.elementary import exp, sqrt, sqrt2
from .numerics.interval import Interval, Number, as_interval
from .numerics.special import I0_J0_enclosure

DEFAULT_T = Fraction(199, 100)
DEFAULT_C_MAX = Fraction(1, 4)
DEFAULT_EPSILON = Fraction(3, 100)


@dataclass(frozen=True)
class LaplaceValues:
    """I0, J0 and the derived I1 = 2t I0, I2 = (2t/3)(1 - I1) at t."""

    t: Interval
    I0: Interval
    J0: Interval

    @classmethod
    def at(cls, t: Interval | Number) -> "LaplaceValues":
        ti = as_interval(t)
        if ti.lo < DEFAULT_T - Fraction(1, 100):
            raise ValueError("far-field evaluation requires t >= 1.98")
        I0, J0 = I0_J0_enclosure(ti)
        return cls(ti, I0, J0)

    @property
    def I1(self) -> Interval:
        v = 2 * self.t * self.I0
        return v.intersect(Interval(0, 1)) if v.lo < 1 else v

    @property
    def I2(self) -> Interval:
        return 2 * self.t / 3 * (1 - self.I1)


def _ci(c: Interval | Number) -> Interval:
    return as_interval(c)


def q0_eval(t: Interval | Number, c: Interval | Number, lv: LaplaceValues | None = None) -> Interval:
    lv = lv or LaplaceValues.at(t)
    ci = _ci(c)
    e = exp(-lv.t)
    return 2 * ci * sqrt(lv.t) * e * lv.I0 + ci * ci * e * e * (2 * lv.J0 - lv.I0 - lv.I0 * lv.I0)


def q0_dc(t: Interval | Number, c: Interval | Number, lv: LaplaceValues | None = None) -> Interval:
    """Partial derivative of q0 with respect to c."""
    lv = lv or LaplaceValues.at(t)
    ci = _ci(c)
    e = exp(-lv.t)
    return 2 * sqrt(lv.t) * e * lv.I0 + 2 * ci * e * e * (2 * lv.J0 - lv.I0 - lv.I0 * lv.I0)


def q0_shifted_derivative(t: Interval | Number, c: Interval | Number, lv: LaplaceValues | None = None) -> Interval:
    """q0' - q0/(2t) in closed form."""
    lv = lv or LaplaceValues.at(t)
    ci = _ci(c)
    tt = lv.t
    e = exp(-tt)
    I1, I2 = lv.I1, lv.I2
    return -ci * e / sqrt(tt) * (1 - lv.I0) - ci * ci * e * e / (4 * tt * tt) * (3 * I2 - 2 * I1 + I1 * I1 / (2 * tt))


def B_eval(t: Interval | Number, c: Interval | Number, lv: LaplaceValues | None = None) -> Interval:
    lv = lv or LaplaceValues.at(t)
    ci = _ci(c)
    tt = lv.t
    e = exp(-tt)
    t52 = tt * tt * sqrt(tt)
    return -ci * e / (2 * tt) - ci * ci * e * e / (8 * t52) * (3 * lv.I2 - lv.I1)


def V_eval(t: Interval | Number, c: Interval | Number, lv: LaplaceValues | None = None) -> Interval:
    """V = -(2/c) t e^t B = 1 + c e^{-t}/(4 t^{3/2}) (3 I2 - I1)."""
    lv = lv or LaplaceValues.at(t)
    tt = lv.t
    return 1 + _ci(c) * exp(-tt) / (4 * tt * sqrt(tt)) * (3 * lv.I2 - lv.I1)


def V_dt(t: Interval | Number, c: Interval | Number, lv: LaplaceValues | None = None) -> Interval:
    lv = lv or LaplaceValues.at(t)
    tt = lv.t
    return -_ci(c) * exp(-tt) / (2 * tt * sqrt(tt)) * lv.I1


def V_dc(t: Interval | Number, lv: LaplaceValues | None = None) -> Interval:
    lv = lv or LaplaceValues.at(t)
    tt = lv.t
    return exp(-tt) / (4 * tt * sqrt(tt)) * (3 * lv.I2 - lv.I1)


def Q2_eval(t: Interval | Number, lv: LaplaceValues | None = None) -> Interval:
    lv = lv or LaplaceValues.at(t)
    tt = lv.t
    return -tt * lv.I0 - tt * lv.I0 * lv.I0 + 2 * tt * lv.J0


def R3_eval(t: Interval | Number, lv: LaplaceValues | None = None) -> Interval:
    lv = lv or LaplaceValues.at(t)
    return lv.J0 - lv.t * lv.I0 * lv.I0 - lv.I0 * lv.I0


def R4_eval(t: Interval | Number, lv: LaplaceValues | None = None) -> Interval:
    lv = lv or LaplaceValues.at(t)
    I0, J0, tt = lv.I0, lv.J0, lv.t
    return (
        tt / 2 * (I0 * I0 + I0**3 - 2 * I0 * J0)
        + J0 / 2
        - I0 / 4
        - I0 * J0 / 2
        + I0**3 / 4
    )


@dataclass(frozen=True)
class RemainderConstants:
    R3m: Interval
    R4m: Interval
    R3_at_T: Interval
    R3_tail: Interval
    R4_upper: Interval  # J0/2 - I0/4 + I0^3/4 at T
    R4_lower_mag: Interval  # J0/(4T) - I0^2/4 at T


def R3_R4_bounds(T: Number, roots: TailRoots | None = None) -> RemainderConstants:
    """Bounds on |R3(t)| and |R4(t)| valid for all t >= T."""
    roots = roots or isolate_tail_roots()
    lv = LaplaceValues.at(T)
    T_i = lv.t
    r3T = R3_eval(T_i, lv)
    tail = Interval(0, roots.R3_tail_min.mag) * exp(-roots.P5.s0.lo * T_i) / T_i
    R3m = Interval(0, (r3T + tail).hi)
    up = lv.J0 / 2 - lv.I0 / 4 + lv.I0**3 / 4
    low = lv.J0 / (4 * T_i) - lv.I0 * lv.I0 / 4
    R4m = Interval(0, max(up.hi, low.hi))
    return RemainderConstants(R3m, R4m, r3T, tail, up, low)


@dataclass(frozen=True)
class FarFieldParams:
    T: Fraction = DEFAULT_T
    c_max: Fraction = DEFAULT_C_MAX
    epsilon: Fraction = DEFAULT_EPSILON
    a_range: Interval | None = None
    b_range: Interval | None = None
    c_range: Interval | None = None

    def __post_init__(self) -> None:
        if self.T < DEFAULT_T:
            raise ValueError("T must be at least 1.99")
        if self.c_max < 0:
            raise ValueError("c_max must be non-negative")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")


@dataclass(frozen=True)
class ContractionCheck:
    lhs1: Interval
    rhs1: Interval
    lipschitz: Interval
    self_map_ok: bool
    lipschitz_ok: bool

    @property
    def verdict(self) -> bool:
        return self.self_map_ok and self.lipschitz_ok

    @property
    def failure(self) -> str:
        if not self.self_map_ok:
            return "ball is not mapped into itself"
        if not self.lipschitz_ok:
            return "Lipschitz constant is not below one"
        return ""


@dataclass(frozen=True)
class FarFieldConstants:
    T: Fraction
    c: Fraction
    epsilon: Fraction
    I0T: Interval
    J0T: Interval
    Q2T: Interval
    d0: Interval
    dq: Interval
    dqc: Interval
    d1: Interval
    dB: Interval
    dBc: Interval
    q0m: Interval
    q0cm: Interval
    q0dm: Interval
    q0dcm: Interval
    Bm: Interval
    Bmc: Interval
    Bm2t: Interval
    Bm2c: Interval
    Vm: Interval
    Vmin: Interval
    Vdm: Interval
    Vcm: Interval
    R3m: Interval
    R4m: Interval
    h0_norm: Interval
    h0c_norm: Interval
    h_radius: Interval
    h_norm: Interval
    h_m: Interval
    h_dm: Interval
    h_cm: Interval
    contraction: ContractionCheck

    def named_values(self) -> dict[str, Interval]:
        return {
            f.name: getattr(self, f.name)
            for f in fields(self)
            if isinstance(getattr(self, f.name), Interval)
        }


def _upper(x: Interval) -> Interval:
    return Interval(0, x.hi) if x.hi >= 0 else x


def check_contraction(h0: Interval, dq: Interval, dB: Interval, T: Interval, epsilon: Fraction) -> ContractionCheck:
    # the ball radius is (1+eps) H with H the certified upper bound of ||h0||
    H = Interval(h0.hi)
    one_eps = 1 + Interval(epsilon)
    e3 = exp(-3 * T)
    t52 = T * T * sqrt(T)
    lhs1 = H + (dq + dB) * one_eps * H + e3 / (90 * t52) * one_eps * one_eps * H * H
    rhs1 = one_eps * H
    lip = dq + dB + e3 / (45 * t52) * one_eps * H
    self_ok = lhs1.hi <= rhs1.lo
    return ContractionCheck(lhs1, rhs1, lip, self_ok, lip.hi < 1)


def compute_constants(params: FarFieldParams | None = None, roots: TailRoots | None = None) -> FarFieldConstants:
    """All far-field constants at (T, |c| <= c_max), each an upper bound."""
    params = params or FarFieldParams()
    roots = roots or isolate_tail_roots()
    T = Interval(params.T)
    c = Interval(params.c_max)
    lv = LaplaceValues.at(T)
    e = exp(-T)
    sT = sqrt(T)
    T32 = T * sT
    Q2T = Q2_eval(T, lv)
    if Q2T.lo < 0:
        raise ValueError("Q2(T) is not certified positive")
    U_tail = Interval(0, roots.U_min.mag) * exp(-roots.P3.s0.lo * T)
    d0 = e / sT * (Q2T + U_tail)
    dq = c / (4 * T32) * (1 + c * d0)
    dqc = 1 / (4 * T32) * (1 + 2 * c * d0)
    d1 = 3 * e / (4 * T32)
    dB = c * e / (54 * T32) * (1 + c * d1)
    dBc = e / (54 * T32) * (1 + 2 * c * d1)
    q0m = c * e / sT * (1 + d0 * c)
    q0cm = e / sT * (1 + 2 * d0 * c)
    q0dm = c * e / sT * (1 + 3 * c * e / (4 * T32))
    q0dcm = e / sT * (1 + 3 * c * e / (2 * T32))
    Bm = c * e / (2 * T) * (1 + 3 * c * e / (4 * T32))
    Bmc = e / (2 * T) * (1 + 3 * c * e / (2 * T32))
    Bm2t = e * (1 + c * e / T32)
    Bm2c = 3 * e * e / (4 * T32)
    Vm = 1 + 3 * c * e / (4 * T32)
    Vmin = 1 - c * e / (4 * T32)
    Vdm = c * e / (2 * T32)
    Vcm = e / (4 * T32)
    rc = R3_R4_bounds(params.T, roots)
    R3m, R4m = rc.R3m, rc.R4m
    h0 = c**3 * (R3m / 2 + c * e / (3 * sT) * R4m)
    h0c = c * c * (3 * R3m / 2 + 4 * c * e / (3 * sT) * R4m)
    check = check_contraction(h0, dq, dB, T, params.epsilon)
    h_radius = check.rhs1
    # the fixed point satisfies h = N[h], so ||h|| <= sup over the ball of ||N[h]||
    h_norm = Interval(0, min(check.lhs1.hi, h_radius.hi))
    decay = e * e / T
    h_m = h_norm * decay
    t52 = T * T * sT
    e3 = exp(-3 * T)
    h_dm = decay * (
        2 * dq * h_norm
        + Bm / 9 * h_norm
        + e3 / (18 * t52) * h_norm * h_norm
        + c**3 * (R3m + c * e / sT * R4m)
    )
    denom = 1 - dq - dB - e3 / (45 * t52) * h_norm
    if denom.lo <= 0:
        raise ValueError("derivative bound denominator is not positive")
    h_cm = decay / denom * (h0c + (dqc + dBc) * h_norm)
    up = _upper
    return FarFieldConstants(
        T=params.T,
        c=params.c_max,
        epsilon=params.epsilon,
        I0T=lv.I0,
        J0T=lv.J0,
        Q2T=Q2T,
        d0=up(d0),
        dq=up(dq),
        dqc=up(dqc),
        d1=up(d1),
        dB=up(dB),
        dBc=up(dBc),
        q0m=up(q0m),
        q0cm=up(q0cm),
        q0dm=up(q0dm),
        q0dcm=up(q0dcm),
        Bm=up(Bm),
        Bmc=up(Bmc),
        Bm2t=up(Bm2t),
        Bm2c=up(Bm2c),
        Vm=up(Vm),
        Vmin=Interval(Vmin.lo, Vmin.lo),  # lower bound only
        Vdm=up(Vdm),
        Vcm=up(Vcm),
        R3m=R3m,
        R4m=R4m,
        h0_norm=up(h0),
        h0c_norm=up(h0c),
        h_radius=up(h_radius),
        h_norm=up(h_norm),
        h_m=up(h_m),
        h_dm=up(h_dm),
        h_cm=up(h_cm),
        contraction=check,
    )


def verify_farfield_contraction(
    params: FarFieldParams | None = None, epsilon: Fraction | None = None
) -> tuple[bool, Interval]:
    params = params or FarFieldParams()
    if epsilon is not None:
        params = FarFieldParams(params.T, params.c_max, Fraction(epsilon), params.a_range, params.b_range, params.c_range)
    k = compute_constants(params)
    return k.contraction.verdict, k.h_norm


def h_derived_bounds(constants: FarFieldConstants) -> tuple[Interval, Interval]:
    if not constants.contraction.verdict:
        raise ValueError("far-field contraction has not been verified")
    return constants.h_dm, constants.h_cm


@dataclass(frozen=True)
class FarFieldErrorCoefficients:
    """|E| <= value * t^-2 e^-3t, |dE/dx| <= .. t^-3/2 e^-3t, |d2E/dx2| <= .. t^-1 e^-3t."""

    value: Interval
    slope: Interval
    curvature: Interval

    def as_tuple(self) -> tuple[Interval, Interval, Interval]:
        return self.value, self.slope, self.curvature


def farfield_E_bounds(a_r: Number, h_norm: Interval) -> FarFieldErrorCoefficients:
    a = Interval(a_r)
    value = sqrt(a / 2) / 9 * h_norm
    slope = a / 3 * h_norm
    curvature = sqrt2() * a * sqrt(a) * h_norm
    return FarFieldErrorCoefficients(_upper(value), _upper(slope), _upper(curvature))


@dataclass(frozen=True)
class ExtensionScan:
    c: Fraction
    T: Fraction | None
    tried: tuple[tuple[Fraction, bool], ...]


def scan_extension(
    c: Number = 1,
    T_values: Iterable[Number] | None = None,
    epsilon: Fraction = DEFAULT_EPSILON,
) -> ExtensionScan:
    """Smallest T on a grid for which the contraction holds with |c| <= c."""
    c_q = Fraction(c)
    grid = list(T_values) if T_values is not None else [DEFAULT_T + Fraction(k, 4) for k in range(0, 25)]
    tried = []
    for T in grid:
        T_q = Fraction(T)
        try:
            k = compute_constants(FarFieldParams(T=T_q, c_max=c_q, epsilon=epsilon))
            ok = k.contraction.verdict
        except ValueError:
            ok = False
        tried.append((T_q, ok))
        if ok:
            return ExtensionScan(c_q, T_q, tuple(tried))
    return ExtensionScan(c_q, None, tuple(tried))


def farfield_solution(
    x: Number, a: Number, b: Number, c: Number, order: int = 0
) -> Interval:
    """a x + b + sqrt(a/(2t)) q0(t) and its x-derivatives (without the h correction)."""
    xq, aq, bq = Interval(x), Interval(a), Interval(b)
    t = aq / 2 * (xq + bq / aq) ** 2
    lv = LaplaceValues.at(t)
    if order == 0:
        return aq * xq + bq + sqrt(aq / (2 * t)) * q0_eval(t, c, lv)
    if order == 1:
        # d/dx sqrt(a/2t) q0 = a (q0' - q0/(2t))
        return aq + aq * q0_shifted_derivative(t, c, lv)
    if order == 2:
        # F'' = sqrt(2) a^{3/2} e^{-t} (c V + h); h is dropped here
        return sqrt2() * aq * sqrt(aq) * exp(-t) * _ci(c) * V_eval(t, c, lv)
    raise ValueError("order must be 0, 1 or 2")
