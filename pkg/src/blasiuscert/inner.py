"""Polynomial approximant on [0, 5/2]: construction, remainder and range bounds.

The approximant is ``F0(x) = x^2/2 + x^4 P(2x/5)`` with a degree-12 ``P``.
Its residual in the ODE ``F''' + F F'' = 0`` is the degree-30 polynomial
``R = F0''' + F0 F0''``.  Everything here is exact rational arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from .numerics.interval import Interval
from .numerics.poly import RationalPoly, range_bound

# coefficients p_0..p_12 of the inner polynomial
P_TABLE: tuple[Fraction, ...] = tuple(
    Fraction(n, d)
    for n, d in [
        (-510, 10445149),
        (-18523, 5934),
        (-42998, 441819),
        (113448, 81151),
        (-65173, 22093),
        (390101, 6016),
        (-2326169, 9858),
        (4134879, 7249),
        (-1928001, 1960),
        (20880183, 19117),
        (-1572554, 2161),
        (1546782, 5833),
        (-1315241, 32239),
    ]
)

X_END = Fraction(5, 2)
X_C = Fraction(1322040, 1000000)
X_SPLIT = Fraction(1, 8)

DEFAULT_BREAKPOINTS: tuple[Fraction, ...] = (
    Fraction(0),
    Fraction(1, 16),
    Fraction(1, 8),
    Fraction(1, 4),
    Fraction(3, 8),
    Fraction(1, 2),
    Fraction(3, 4),
    Fraction(1),
    X_C,
    Fraction(3, 2),
    Fraction(7, 4),
    Fraction(2),
    Fraction(9, 4),
    Fraction(12, 5),
    X_END,
)

# (region, lower band, upper band) for the remainder
REMAINDER_BANDS: tuple[tuple[tuple[Fraction, Fraction], Fraction, Fraction], ...] = (
    ((Fraction(0), X_C), Fraction("-3.22e-7"), Fraction("2.505e-7")),
    ((X_C, Fraction(2)), Fraction("4.6e-8"), Fraction("4.06e-7")),
    ((Fraction(2), X_END), Fraction("2.78e-7"), Fraction("6.73e-7")),
)
REMAINDER_GLOBAL = Fraction("6.73e-7")

# ranges of F0, F0', F0'' on [0, 1/8] and [1/8, 5/2]
FAMILY_BANDS: dict[tuple[str, str], tuple[Fraction, Fraction]] = {
    ("F0", "near"): (Fraction("-5e-10"), Fraction("0.008")),
    ("F0p", "near"): (Fraction("-8e-12"), Fraction("0.13")),
    ("F0pp", "near"): (Fraction("0.99"), 1 + Fraction("2e-9")),
    ("F0", "far"): (Fraction("0.03"), Fraction("2.59")),
    ("F0p", "far"): (Fraction("0.12"), Fraction("1.7")),
    ("F0pp", "far"): (Fraction("0.09"), Fraction(1)),
}
FAMILY_REGIONS: dict[str, tuple[Fraction, Fraction]] = {
    "near": (Fraction(0), X_SPLIT),
    "far": (X_SPLIT, X_END),
}


@dataclass(frozen=True)
class InnerApproximant:
    F0: RationalPoly
    F0p: RationalPoly
    F0pp: RationalPoly
    F0ppp: RationalPoly
    R: RationalPoly

    def derivative(self, order: int) -> RationalPoly:
        return (self.F0, self.F0p, self.F0pp, self.F0ppp)[order]


def inner_polynomial_P() -> RationalPoly:
    """P(y) = sum_j 2 p_j y^j / (5 (j+2)(j+3)(j+4))."""
    return RationalPoly(
        Fraction(2) * p / (5 * (j + 2) * (j + 3) * (j + 4)) for j, p in enumerate(P_TABLE)
    )


@lru_cache(maxsize=1)
def build_inner() -> InnerApproximant:
    P = inner_polynomial_P()
    scaled = RationalPoly(c * Fraction(2, 5) ** j for j, c in enumerate(P.coeffs))
    F0 = RationalPoly([0, 0, Fraction(1, 2)]) + RationalPoly([0, 0, 0, 0, 1]) * scaled
    F0p = F0.derivative()
    F0pp = F0p.derivative()
    F0ppp = F0pp.derivative()
    R = F0ppp + F0 * F0pp
    return InnerApproximant(F0, F0p, F0pp, F0ppp, R)


@dataclass(frozen=True)
class Partition:
    breakpoints: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        bp = self.breakpoints
        if len(bp) < 2 or bp[0] != 0 or bp[-1] != X_END:
            raise ValueError("partition must start at 0 and end at 5/2")
        if any(b <= a for a, b in zip(bp[:-1], bp[1:])):
            raise ValueError("partition breakpoints must be strictly increasing")

    @classmethod
    def default(cls) -> "Partition":
        return cls(DEFAULT_BREAKPOINTS)

    @classmethod
    def refined(cls, base: "Partition", pieces_per_cell: int) -> "Partition":
        pts: list[Fraction] = []
        for a, b in base.pieces():
            for k in range(pieces_per_cell):
                pts.append(a + (b - a) * k / pieces_per_cell)
        pts.append(base.breakpoints[-1])
        return cls(tuple(pts))

    def pieces(self) -> list[tuple[Fraction, Fraction]]:
        bp = self.breakpoints
        return list(zip(bp[:-1], bp[1:]))

    def pieces_within(self, x_l: Fraction, x_r: Fraction) -> list[tuple[Fraction, Fraction]]:
        """Pieces whose union covers [x_l, x_r]."""
        return [(a, b) for a, b in self.pieces() if b > x_l and a < x_r]


@dataclass(frozen=True)
class PieceBound:
    x_l: Fraction
    x_r: Fraction
    bound: Interval


def bound_remainder(part: Partition | None = None, approx: InnerApproximant | None = None) -> list[PieceBound]:
    part = part or Partition.default()
    approx = approx or build_inner()
    return [PieceBound(a, b, range_bound(approx.R, a, b)) for a, b in part.pieces()]


@dataclass(frozen=True)
class BandCheck:
    name: str
    computed: Interval
    band: Interval
    ok: bool
    offenders: tuple[tuple[Fraction, Fraction], ...] = ()


def union_over(pieces: Sequence[PieceBound], x_l: Fraction, x_r: Fraction) -> Interval:
    inside = [p for p in pieces if p.x_r > x_l and p.x_l < x_r]
    if not inside:
        raise ValueError("no pieces cover the requested interval")
    return Interval.hull(*(p.bound for p in inside))


def check_remainder_bands(pieces: Sequence[PieceBound]) -> list[BandCheck]:
    checks = []
    for (x_l, x_r), lo, hi in REMAINDER_BANDS:
        band = Interval(lo, hi)
        inside = [p for p in pieces if p.x_r > x_l and p.x_l < x_r]
        bad = tuple((p.x_l, p.x_r) for p in inside if not p.bound.subset_of(band))
        comp = Interval.hull(*(p.bound for p in inside))
        checks.append(BandCheck(f"R on [{float(x_l):g}, {float(x_r):g}]", comp, band, not bad, bad))
    total = Interval.hull(*(p.bound for p in pieces))
    glob = Interval(-REMAINDER_GLOBAL, REMAINDER_GLOBAL)
    checks.append(BandCheck("|R| on [0, 2.5]", total, glob, total.subset_of(glob)))
    return checks


def sup_abs(pieces: Sequence[PieceBound], x_l: Fraction, x_r: Fraction) -> Fraction:
    return union_over(pieces, x_l, x_r).mag


def poly_pieces(poly: RationalPoly, part: Partition) -> list[PieceBound]:
    return [PieceBound(a, b, range_bound(poly, a, b)) for a, b in part.pieces()]


def bound_F0_family(
    approx: InnerApproximant | None = None, pieces_per_cell: int = 8
) -> dict[tuple[str, str], BandCheck]:
    """Range enclosures of F0, F0', F0'' on [0, 1/8] and [1/8, 5/2].

    The default partition is subdivided ``pieces_per_cell`` times so the
    l1 tail stays well below the band slack near x = 0.
    """
    approx = approx or build_inner()
    part = Partition.refined(Partition.default(), pieces_per_cell)
    polys = {"F0": approx.F0, "F0p": approx.F0p, "F0pp": approx.F0pp}
    out: dict[tuple[str, str], BandCheck] = {}
    for name, poly in polys.items():
        pieces = poly_pieces(poly, part)
        for region, (x_l, x_r) in FAMILY_REGIONS.items():
            comp = union_over(pieces, x_l, x_r)
            lo, hi = FAMILY_BANDS[(name, region)]
            band = Interval(lo, hi)
            out[(name, region)] = BandCheck(
                f"{name} on [{float(x_l):g}, {float(x_r):g}]", comp, band, comp.subset_of(band)
            )
    return out


# -- sign changes of the energy switching expressions ------------------------

SIGN_EXPRESSIONS: dict[str, Callable[[InnerApproximant], RationalPoly]] = {
    "F0pp_minus_2F0_plus_1": lambda ap: ap.F0pp - 2 * ap.F0 + 1,
    "twoF0pp_minus_2F0": lambda ap: 2 * ap.F0pp - 2 * ap.F0,
    "F0pp_minus_2F0": lambda ap: ap.F0pp - 2 * ap.F0,
}

# derivative of each expression written as (F0''' part weight, polynomial without F0''')
# d/dx(k F0'' - 2F0) = k R - k F0 F0'' - 2F0'
_DERIV_WEIGHT = {"F0pp_minus_2F0_plus_1": 1, "twoF0pp_minus_2F0": 2, "F0pp_minus_2F0": 1}

REFERENCE_BRACKETS: dict[str, tuple[Fraction, Fraction]] = {
    "F0pp_minus_2F0_plus_1": (X_C, Fraction("1.322041")),
    "twoF0pp_minus_2F0": (Fraction("1.2314283"), Fraction("1.2314284")),
}
APPROX_ROOT_F0pp_minus_2F0 = Fraction("0.9399325")


@dataclass(frozen=True)
class SignChangeBracket:
    expr_id: str
    lo: Fraction
    hi: Fraction
    value_lo: Fraction
    value_hi: Fraction
    positive_near_zero: bool
    decreasing_certified: bool
    worst_derivative: Fraction

    @property
    def ok(self) -> bool:
        return (
            self.value_lo > 0 > self.value_hi and self.positive_near_zero and self.decreasing_certified
        )

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo


def decimal_bracket(poly: RationalPoly, lo: Fraction, hi: Fraction, digits: int) -> tuple[Fraction, Fraction]:
    """Bracket a sign change of ``poly`` between decimal grid points 10**-digits apart."""
    f_lo = poly(lo)
    if f_lo * poly(hi) >= 0:
        raise ValueError("no sign change in the starting bracket")
    step = Fraction(1, 10**digits)
    while hi - lo > step / 4:
        mid = (lo + hi) / 2
        f_mid = poly(mid)
        if f_mid == 0:
            lo = hi = mid
            break
        if (f_mid > 0) == (f_lo > 0):
            lo = mid
        else:
            hi = mid
    g_lo = Fraction(int(lo / step)) * step
    for g_hi in (g_lo + step, g_lo + 2 * step):
        if poly(g_lo) * poly(g_hi) < 0:
            return g_lo, g_hi
    raise ValueError("could not snap the bracket to the decimal grid")


def localize_sign_changes(
    approx: InnerApproximant | None = None,
    remainder: Sequence[PieceBound] | None = None,
    part: Partition | None = None,
) -> list[SignChangeBracket]:
    """Bracket the unique zero on [0, 5/2] of each switching expression.

    Uniqueness: the expression is positive on [0, 1/8] (from the F0 bands)
    and has a negative derivative on [1/8, 5/2], certified piecewise as
    ``sup(-k F0 F0'' - 2F0') + k sup R < 0``.
    """
    approx = approx or build_inner()
    part = part or Partition.default()
    remainder = remainder if remainder is not None else bound_remainder(part, approx)
    family = bound_F0_family(approx)
    F0_near = family[("F0", "near")].computed
    F0pp_near = family[("F0pp", "near")].computed
    out = []
    for expr_id, make in SIGN_EXPRESSIONS.items():
        poly = make(approx)
        k = _DERIV_WEIGHT[expr_id]
        const = 1 if expr_id.endswith("plus_1") else 0
        near = F0pp_near * k - F0_near * 2 + const
        deriv_wo_R = -k * approx.F0 * approx.F0pp - 2 * approx.F0p
        worst = None
        for a, b in part.pieces():
            if b <= X_SPLIT:
                continue
            a_eff = max(a, X_SPLIT)
            sup_d = range_bound(deriv_wo_R, a_eff, b).hi + k * union_over(remainder, a_eff, b).hi
            worst = sup_d if worst is None else max(worst, sup_d)
        assert worst is not None
        if expr_id in REFERENCE_BRACKETS:
            lo, hi = REFERENCE_BRACKETS[expr_id]
        else:
            step = Fraction(1, 10**7)
            lo, hi = decimal_bracket(poly, APPROX_ROOT_F0pp_minus_2F0 - 10 * step, APPROX_ROOT_F0pp_minus_2F0 + 10 * step, 7)
        out.append(
            SignChangeBracket(
                expr_id=expr_id,
                lo=lo,
                hi=hi,
                value_lo=poly(lo),
                value_hi=poly(hi),
                positive_near_zero=near.lo > 0,
                decreasing_certified=worst < 0,
                worst_derivative=worst,
            )
        )
    return out


def bracket_for(brackets: Sequence[SignChangeBracket], expr_id: str) -> SignChangeBracket:
    for br in brackets:
        if br.expr_id == expr_id:
            return br
    raise KeyError(expr_id)
