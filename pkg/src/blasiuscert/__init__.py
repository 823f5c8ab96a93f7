"""Validated-numerics reconstruction of the Blasius boundary-layer proof.

The package certifies a polynomial approximant on [0, 5/2], an erfc-based
far-field representation beyond it, and the matching that pins down the
asymptotic constants (a, b, c) and the wall stress f''(0).
"""

__version__ = "0.1.0"
