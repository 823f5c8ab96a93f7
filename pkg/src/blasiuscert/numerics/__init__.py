"""Exact rational and outward-rounded interval numerics."""
from .elementary import exp, pi, sqrt, sqrt2, sqrt_pi
from .interval import (
    Interval,
    decimal_bounds,
    get_precision,
    set_precision,
    working_precision,
)
from .poly import (
    RationalPoly,
    cubic_minmax,
    definite_integral,
    poly_affine_recenter,
    poly_antiderivative,
    poly_arith,
    range_bound,
)
from .special import I0_enclosure, I0_J0_enclosure, erfc_enclosure

__all__ = [
    "Interval",
    "RationalPoly",
    "cubic_minmax",
    "decimal_bounds",
    "definite_integral",
    "erfc_enclosure",
    "exp",
    "get_precision",
    "I0_enclosure",
    "I0_J0_enclosure",
    "pi",
    "poly_affine_recenter",
    "poly_antiderivative",
    "poly_arith",
    "range_bound",
    "set_precision",
    "sqrt",
    "sqrt2",
    "sqrt_pi",
    "working_precision",
]
