from fractions import Fraction

import mpmath
import pytest

from blasiuscert.farfield import (
    FarFieldParams,
    LaplaceValues,
    Q2_eval,
    R3_R4_bounds,
    R3_eval,
    R4_eval,
    V_eval,
    compute_constants,
    farfield_E_bounds,
    farfield_solution,
    h_derived_bounds,
    q0_eval,
    q0_shifted_derivative,
    scan_extension,
    verify_farfield_contraction,
)
from blasiuscert.matching import CENTER, RHO0
from blasiuscert.numerics.interval import Interval
from blasiuscert.oracle import _I0, q0_mp

T0 = Fraction(199, 100)
T_GRID = (T0, Fraction("2.2"), Fraction("2.5"), Fraction(3))


def mp(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


@pytest.fixture(scope="module")
def remainder_constants():
    return R3_R4_bounds(T0)


@pytest.fixture(scope="module")
def constants_grid():
    return [compute_constants(FarFieldParams(T=T)) for T in T_GRID]


def test_Q2_near_target_value(far_constants):
    assert far_constants.Q2T.subset_of(Interval(Fraction("0.0142"), Fraction("0.0152")))
    assert Q2_eval(T0) == far_constants.Q2T


def test_remainder_maxima(remainder_constants):
    rc = remainder_constants
    assert rc.R3m.hi <= Fraction("0.02057")
    assert rc.R4m.hi <= Fraction("0.009042")
    assert rc.R4_lower_mag.hi <= Fraction("0.00572")
    assert rc.R3_tail.hi < Fraction(1, 10**8)


def test_contraction_at_default_parameters(far_constants):
    k = far_constants
    assert k.contraction.verdict
    assert k.h_norm.hi <= Fraction("1.6667e-4")
    assert k.h_m.hi <= Fraction("1.5651e-6")
    assert k.h_norm.hi <= k.h_radius.hi
    assert k.Vmin.lo > 0


def test_h0_norm_formula(far_constants, remainder_constants):
    k = far_constants
    c = Fraction(1, 4)
    T = Interval(T0)
    from blasiuscert.numerics.elementary import exp, sqrt

    bound = c**3 * (remainder_constants.R3m / 2 + c * exp(-T) / (3 * sqrt(T)) * remainder_constants.R4m)
    assert k.h0_norm.hi <= bound.hi * (1 + Fraction(1, 10**12))


def test_V_min_formula(far_constants):
    from blasiuscert.numerics.elementary import exp, sqrt

    T = Interval(T0)
    expected = 1 - Fraction(1, 4) * exp(-T) / (4 * T * sqrt(T))
    assert far_constants.Vmin.lo <= expected.hi


def test_error_coefficients(far_constants):
    a_r = CENTER[0] + RHO0
    coeffs = farfield_E_bounds(a_r, far_constants.h_norm)
    for value, limit in zip(coeffs.as_tuple(), ("1.69e-5", "9.20e-5", "5.02e-4")):
        assert value.hi <= Fraction(limit)
    halved = farfield_E_bounds(a_r, far_constants.h_norm / 2)
    for full, half in zip(coeffs.as_tuple(), halved.as_tuple()):
        assert abs(half.hi * 2 - full.hi) <= Fraction(1, 10**60)


def test_zero_amplitude_is_trivial():
    k = compute_constants(FarFieldParams(c_max=Fraction(0)))
    assert k.h0_norm.hi == 0 and k.h_norm.hi == 0 and k.contraction.verdict
    assert q0_eval(Fraction(3), 0) == Interval(0)


def test_parameter_validation():
    with pytest.raises(ValueError):
        FarFieldParams(T=Fraction(1))
    with pytest.raises(ValueError):
        FarFieldParams(epsilon=Fraction(0))
    with pytest.raises(ValueError):
        LaplaceValues.at(Fraction(1))


def test_constants_monotone_in_T(constants_grid):
    names = [n for n in constants_grid[0].named_values() if n != "Vmin"]
    for small, big in zip(constants_grid, constants_grid[1:]):
        for name in names:
            assert big.named_values()[name].hi <= small.named_values()[name].hi, name
        assert big.Vmin.lo >= small.Vmin.lo
    assert all(k.contraction.verdict for k in constants_grid)


def test_derived_h_bounds_shrink_with_T(constants_grid):
    dm0, cm0 = h_derived_bounds(constants_grid[0])
    dm, cm = h_derived_bounds(constants_grid[2])
    assert 0 < dm.hi < dm0.hi and 0 < cm.hi < cm0.hi
    k = constants_grid[0]
    from blasiuscert.numerics.elementary import exp

    leading = Fraction(1, 4) ** 3 * k.R3m.lo * exp(-2 * Interval(T0)).lo / T0
    assert dm0.hi >= leading


def test_epsilon_override():
    ok, h = verify_farfield_contraction(epsilon=Fraction(1, 10))
    assert ok and h.hi > 0


def test_extension_scan_for_unit_amplitude():
    scan = scan_extension(1)
    assert scan.T is not None
    assert scan.tried[-1] == (scan.T, True)
    assert not any(ok for _, ok in scan.tried[:-1])
    assert scan.T > T0


@pytest.mark.parametrize("t", ["1.99", "2.5", "4", "7.25"])
@pytest.mark.parametrize("c", ["0.25", "-0.25", "0.2337"])
def test_q0_matches_reference(t, c):
    tq, cq = Fraction(t), Fraction(c)
    with mpmath.workdps(60):
        ref = Fraction(mpmath.nstr(q0_mp(mp(tq), mp(cq)), 55))
    iv = q0_eval(tq, cq)
    slack = Fraction(1, 10**50)
    assert iv.lo - slack <= ref <= iv.hi + slack


def test_q0_shifted_derivative_matches_reference():
    t, c = Fraction(5, 2), Fraction(1, 4)
    with mpmath.workdps(50):
        f = lambda s: q0_mp(s, mp(c))
        ref = mpmath.diff(f, mp(t)) - f(mp(t)) / (2 * mp(t))
        ref = Fraction(mpmath.nstr(ref, 40))
    iv = q0_shifted_derivative(t, c)
    assert iv.lo - Fraction(1, 10**35) <= ref <= iv.hi + Fraction(1, 10**35)


def _residual_mp(t, c):
    q = lambda s: q0_mp(s, c)
    d0, d1, d2, d3 = (mpmath.diff(q, t, k) for k in range(4))
    return (
        d3
        + (1 + d0 / (2 * t)) * d2
        + (-1 / (2 * t) + mpmath.mpf(3) / (4 * t * t) - d0 / (4 * t * t)) * d1
        + (1 / (2 * t * t) - mpmath.mpf(3) / (4 * t**3)) * d0
        + d0 * d0 / (4 * t**3)
    )


@pytest.mark.slow
def test_ansatz_residual_bounded_by_remainder_maxima(remainder_constants):
    R3m, R4m = mp(remainder_constants.R3m.hi), mp(remainder_constants.R4m.hi)
    with mpmath.workdps(40):
        for k in range(100):
            t = mpmath.mpf("1.99") + mpmath.mpf(k) / 8
            c = mpmath.mpf("0.25") * (1 if k % 2 else -1) * (1 - mpmath.mpf(k % 5) / 10)
            xi = c * mpmath.exp(-t) / mpmath.sqrt(t)
            assert abs(_residual_mp(t, c)) <= abs(xi) ** 3 * R3m + xi**4 * R4m


def test_ansatz_residual_series_identity():
    with mpmath.workdps(50):
        for t, c in (("1.99", "0.25"), ("3.7", "-0.2"), ("6", "0.1")):
            t, c = mpmath.mpf(t), mpmath.mpf(c)
            xi = c * mpmath.exp(-t) / mpmath.sqrt(t)
            i0, j0 = _I0(t), _I0(2 * t)
            R3 = j0 - t * i0**2 - i0**2
            R4 = t / 2 * (i0**2 + i0**3 - 2 * i0 * j0) + j0 / 2 - i0 / 4 - i0 * j0 / 2 + i0**3 / 4
            assert abs(_residual_mp(t, c) - (xi**3 * R3 + xi**4 * R4)) <= mpmath.mpf(10) ** -40


def test_R3_R4_enclosures_match_reference():
    t = Fraction(3)
    with mpmath.workdps(40):
        i0, j0 = _I0(mpmath.mpf(3)), _I0(mpmath.mpf(6))
        r3 = j0 - 3 * i0**2 - i0**2
        r4 = mpmath.mpf(3) / 2 * (i0**2 + i0**3 - 2 * i0 * j0) + j0 / 2 - i0 / 4 - i0 * j0 / 2 + i0**3 / 4
    for iv, ref in ((R3_eval(t), r3), (R4_eval(t), r4)):
        assert abs(float(iv.mid) - float(ref)) < 1e-15


def test_far_solution_consistent_with_V(far_constants):
    a, b, c = (Fraction(v) for v in CENTER)
    x = Fraction(3)
    Fpp = farfield_solution(x, a, b, c, 2)
    assert Fpp.lo > 0
    t = Interval(a) / 2 * (x + Interval(b) / a) ** 2
    assert V_eval(t, c).lo >= far_constants.Vmin.lo
    with pytest.raises(ValueError):
        farfield_solution(x, a, b, c, 3)


@pytest.mark.slow
def test_correction_decays_like_cubic_transseries_term(oracle_far, far_constants):
    """q - q0 ~ xi^3: slope of log(t^{3/2} |q - q0|) in t is close to -3."""
    a, b, c = oracle_far.abc_mp()
    pts = []
    with mpmath.workdps(oracle_far.dps):
        for x in (4.5, 5.0, 5.5, 6.0):
            t = a / 2 * (x + b / a) ** 2
            F, _, _ = oracle_far.eval_mp(x)
            q = mpmath.sqrt(2 * t / a) * (F - a * x - b)
            d = abs(q - q0_mp(t, c))
            # certified: |h| <= ||h|| / (t e^{2t})
            assert d * t * mpmath.exp(2 * t) <= mp(far_constants.h_norm.hi)
            pts.append((t, mpmath.log(d * t**1.5)))
    slopes = [(y2 - y1) / (t2 - t1) for (t1, y1), (t2, y2) in zip(pts, pts[1:])]
    assert all(-3.2 < float(s) < -2.9 for s in slopes)


@pytest.mark.slow
def test_oracle_far_errors_within_certified_coefficients(oracle_far, far_constants):
    from blasiuscert.oracle import compare_farfield

    coeffs = farfield_E_bounds(CENTER[0] + RHO0, far_constants.h_norm).as_tuple()
    cmp_ = compare_farfield(oracle_far, [2.5 + 0.25 * k for k in range(15)])
    for row in cmp_.weighted:
        for value, cap in zip(row, coeffs):
            assert value <= float(cap.hi)
