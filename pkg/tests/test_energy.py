from fractions import Fraction

import pytest

from blasiuscert.energy import EnergyCalculator, bound_M, build_weights, energy_bounds
from blasiuscert.inner import X_C, X_END

pytestmark = pytest.mark.filterwarnings("ignore::DeprecationWarning")

I1, I2, I3 = (Fraction(0), X_C), (X_C, Fraction(2)), (Fraction(2), X_END)

TARGETS = {
    I1: {"M": "3.03"},
    I2: {"M1": "0.572", "M2": "0.199", "M3": "1.01", "M": "0.825"},
    I3: {"M1": "0.3", "M2": "0.0744", "M3": "1.01", "M": "0.708"},
}


@pytest.fixture(scope="module")
def bounds():
    return {iv: energy_bounds(*iv) for iv in (I1, I2, I3)}


@pytest.mark.parametrize("iv", [I1, I2, I3], ids=["I1", "I2", "I3"])
def test_energy_bound_targets(bounds, iv):
    b = bounds[iv]
    for name, lim in TARGETS[iv].items():
        val = getattr(b, name)
        assert val.lo == 0 and val.hi <= Fraction(lim), (name, float(val.hi))
    assert b.refinement_depth == 0


def test_weight_regimes():
    assert build_weights("Q", *I3).regime == "negative"
    for kind in ("Q1", "Q2", "Q"):
        assert build_weights(kind, Fraction(0), Fraction(1, 8)).regime == "positive"
    assert build_weights("Q", *I1).regime == "positive"
    assert build_weights("Q", *I2).regime == "switch"


def test_Q1_positive_branch_at_left_end(approx):
    x_l = Fraction(1, 2)
    w = build_weights("Q1", x_l, Fraction(1))
    assert w.branch_pos(x_l) == 2 * approx.F0pp(x_l) - 2 * approx.F0(x_l)


def test_branches_differ_by_switch_expression(approx):
    w = build_weights("Q", *I2)
    g = approx.F0pp - 2 * approx.F0 + 1
    assert w.branch_pos - w.branch_neg == g


@pytest.mark.parametrize(
    "chain",
    [
        [(Fraction(2), Fraction(9, 4)), I3],
        [(X_C, Fraction(3, 2)), I2, (X_C, X_END)],
        [(Fraction(9, 4), X_END), I3, (Fraction(3, 2), X_END)],
        [(Fraction(0), Fraction(1, 2)), (Fraction(0), Fraction(1)), I1],
    ],
)
def test_bounds_monotone_on_nested_intervals(chain):
    sets = [energy_bounds(*iv) for iv in chain]
    for small, big in zip(sets, sets[1:]):
        for name in ("M1", "M2", "M3", "M"):
            assert getattr(small, name).hi <= getattr(big, name).hi, name


@pytest.mark.parametrize(
    "x_l,x_mid,x_r",
    [(Fraction(2), Fraction(9, 4), X_END), (X_C, Fraction(3, 2), Fraction(2)), (Fraction(0), Fraction(1, 16), Fraction(1, 8))],
)
def test_split_integrals_do_not_exceed_whole(x_l, x_mid, x_r):
    left, right, whole = EnergyCalculator(x_l, x_mid), EnergyCalculator(x_mid, x_r), EnergyCalculator(x_l, x_r)
    for kind in ("Q2", "Q"):
        assert left.integral(kind) + right.integral(kind) <= whole.integral(kind) + Fraction(1, 10**9)


@pytest.mark.slow
@pytest.mark.parametrize("iv", [I1, I2, I3], ids=["I1", "I2", "I3"])
def test_fundamental_system_below_certified_bounds(bounds, approx, iv):
    from blasiuscert.oracle import fundamental_sup, green_norm_estimate

    sup = fundamental_sup(float(iv[0]), float(iv[1]), approx)
    b = bounds[iv]
    for observed, cert in zip(sup, (b.M1, b.M2, b.M3)):
        assert observed <= float(cert.hi) * (1 + 1e-9)
    assert green_norm_estimate(float(iv[0]), float(iv[1]), approx) <= float(b.M.hi)


def test_bound_M_shortcut_matches_set(bounds):
    assert bound_M(*I3) == bounds[I3].M
