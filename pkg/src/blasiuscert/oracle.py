"""Non-rigorous high-precision reference solution.

``F''' + F F'' = 0`` with ``F(0) = F'(0) = 0, F''(0) = 1`` is integrated by
an adaptive Taylor-series method in mpmath.  The Taylor coefficients follow
from the Cauchy product of the equation, so each step is exact up to the
truncated tail; the step size keeps the last retained terms below ``tol``.
Running twice with different tolerances gives a global error estimate.

Nothing here is rigorous.  The module exists to cross-check the certified
enclosures produced elsewhere.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from .inner import InnerApproximant, build_inner

X_MATCH = 2.5


def _mpf(x) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def _taylor(F0, F1, F2, order: int) -> list:
    """Coefficients of F around a point from F, F', F'' there."""
    f = [F0, F1, F2 / 2]
    for k in range(order - 2):
        s = mpmath.mpf(0)
        for i in range(k + 1):
            j = k - i + 2
            s += f[i] * (j * (j - 1)) * f[j]
        f.append(-s / ((k + 1) * (k + 2) * (k + 3)))
    return f


def _poly_derivs(f: list, u) -> tuple:
    p0 = p1 = p2 = mpmath.mpf(0)
    n = len(f)
    for k in range(n - 1, -1, -1):
        p0 = p0 * u + f[k]
        if k >= 1:
            p1 = p1 * u + k * f[k]
        if k >= 2:
            p2 = p2 * u + k * (k - 1) * f[k]
    return p0, p1, p2


@dataclass
class OracleSolution:
    """Dense output: one Taylor polynomial per step."""

    starts: list
    coeffs: list
    x_max: float
    tol: float
    dps: int
    a_est: float = float("nan")
    b_est: float = float("nan")
    c_est: float = float("nan")
    precision_estimate: float = float("nan")
    abc: tuple | None = None

    def _locate(self, x) -> tuple[int, object]:
        xm = _mpf(x)
        if xm < 0 or xm > self.x_max + 1e-12:
            raise ValueError("x outside the integrated range")
        i = max(bisect.bisect_right(self.starts, xm) - 1, 0)
        return i, xm - self.starts[i]

    def eval_mp(self, x) -> tuple:
        """(F, F', F'') at x as mpmath numbers."""
        with mpmath.workdps(self.dps):
            i, u = self._locate(x)
            return _poly_derivs(self.coeffs[i], u)

    def __call__(self, x, order: int = 0) -> float:
        return float(self.eval_mp(x)[order])

    def abc_mp(self) -> tuple:
        if self.abc is None:
            self.abc = extract_abc(self)
        return self.abc


def _step_size(f: list, tol: float, order: int) -> float:
    """Largest h with the truncated F'' terms below tol * |F''|.

    Beyond the boundary layer every coefficient past the second is
    proportional to F'', so a relative test keeps the tail error relative
    too and F' stops drifting once F'' is negligible.
    """
    # three consecutive orders: at x = 0 only every third coefficient is non-zero
    budget = mpmath.mpf(tol) * abs(2 * f[2])
    est = []
    for k in (order - 2, order - 1, order):
        mag = abs(f[k]) * k * (k - 1)
        if mag > 0:
            est.append(float((budget / mag) ** (mpmath.mpf(1) / (k - 2))))
    h = min(est) if est else 1.0
    return min(0.9 * h, 1.0)


def _integrate(x_max: float, tol: float, order: int, dps: int) -> tuple[list, list]:
    with mpmath.workdps(dps):
        x = mpmath.mpf(0)
        y = (mpmath.mpf(0), mpmath.mpf(0), mpmath.mpf(1))
        starts, coeffs = [], []
        xm = mpmath.mpf(x_max)
        while x < xm:
            f = _taylor(*y, order)
            h = _step_size(f, tol, order)
            if h < 1e-8:
                raise RuntimeError("step size underflow")
            h = min(mpmath.mpf(h), xm - x)
            starts.append(x)
            coeffs.append(f)
            y = _poly_derivs(f, h)
            x = x + h
        return starts, coeffs


def _default_order(tol: float) -> int:
    digits = max(-math.log10(tol), 8)
    return int(0.8 * digits) + 12


def _default_dps(tol: float) -> int:
    return int(max(-math.log10(tol), 8)) + 15


def solve_ivp(
    x_max: float = 20.0, tol: float = 1e-25, dps: int | None = None, order: int | None = None
) -> OracleSolution:
    """Integrate on [0, x_max]; a second run at tol/1000 estimates the global error."""
    if not (1e-160 <= tol <= 1e-8):
        raise ValueError("tol must lie in [1e-160, 1e-8]")
    if x_max <= 0:
        raise ValueError("x_max must be positive")
    dps = dps or _default_dps(tol)
    order = order or _default_order(tol)
    starts, coeffs = _integrate(x_max, tol, order, dps)
    sol = OracleSolution(starts, coeffs, float(x_max), tol, dps)
    fine = OracleSolution(*_integrate(x_max, tol / 1000, order + 4, dps + 3), float(x_max), tol, dps + 3)
    a = sol.eval_mp(x_max)
    b = fine.eval_mp(x_max)
    sol.precision_estimate = float(max(abs(p - q) for p, q in zip(a, b)))
    if x_max >= 15:
        abc = extract_abc(sol)
        sol.a_est, sol.b_est, sol.c_est = (float(v) for v in abc)
        sol.abc = abc
    return sol


def _I0(t):
    return 1 - mpmath.sqrt(mpmath.pi * t) * mpmath.exp(t) * mpmath.erfc(mpmath.sqrt(t))


def q0_mp(t, c):
    i0, j0 = _I0(t), _I0(2 * t)
    e = mpmath.exp(-t)
    return 2 * c * mpmath.sqrt(t) * e * i0 + c * c * e * e * (2 * j0 - i0 - i0 * i0)


def V_mp(t, c):
    i0 = _I0(t)
    I1 = 2 * t * i0
    I2 = 2 * t / 3 * (1 - I1)
    return 1 + c * mpmath.exp(-t) / (4 * t * mpmath.sqrt(t)) * (3 * I2 - I1)


def extract_abc(sol: OracleSolution, sample_x: Sequence[float] | None = None) -> tuple:
    """(a, b, c) from the far-field behaviour of the numerical solution.

    a and b come from the asymptote at x_max.  c is recovered from
    ``F'' = sqrt2 a^{3/2} e^{-t} c V(t; c)`` (h dropped, relative size
    e^{-2t}/t) at several x and must agree across them.  The sample points
    sit where the dropped term has fallen to the integration tolerance.
    """
    if sol.x_max < 15:
        raise ValueError("extraction needs x_max >= 15")
    with mpmath.workdps(sol.dps):
        F, Fp, _ = sol.eval_mp(sol.x_max)
        a = Fp
        b = F - a * sol.x_max
        if sample_x is None:
            # F'' is integrated to relative accuracy, so only e^{-2t} matters
            t_star = -math.log(sol.tol) / 2
            xs = [float(-b / a + mpmath.sqrt(2 * s * t_star / a)) for s in (0.9, 1.0, 1.1)]
        else:
            xs = list(sample_x)
        cs = []
        for x in xs:
            _, _, Fpp = sol.eval_mp(x)
            t = a / 2 * (x + b / a) ** 2
            base = Fpp * mpmath.exp(t) / (mpmath.sqrt(2) * a * mpmath.sqrt(a))
            c = base
            for _ in range(30):
                c = base / V_mp(t, c)
            cs.append(c)
        spread = max(cs) - min(cs)
        if spread > 1e-6:
            raise ValueError(f"inconsistent c estimates (spread {float(spread):.3g})")
        return a, b, cs[-1]


@dataclass(frozen=True)
class InnerComparison:
    max_err: tuple[float, float, float]  # |F - F0|, |F' - F0'|, |F'' - F0''|
    argmax: tuple[float, float, float]
    n_samples: int


def compare_inner(
    sol: OracleSolution, approx: InnerApproximant | None = None, n_samples: int = 1000
) -> InnerComparison:
    approx = approx or build_inner()
    polys = [[float(c) for c in p.coeffs] for p in (approx.F0, approx.F0p, approx.F0pp)]
    worst = [0.0, 0.0, 0.0]
    where = [0.0, 0.0, 0.0]
    for k in range(n_samples):
        x = X_MATCH * k / (n_samples - 1)
        vals = sol.eval_mp(x)
        for j in range(3):
            approx_v = 0.0
            for coef in reversed(polys[j]):
                approx_v = approx_v * x + coef
            err = abs(float(vals[j]) - approx_v)
            if err > worst[j]:
                worst[j], where[j] = err, x
    return InnerComparison(tuple(worst), tuple(where), n_samples)


def inner_error_samples(sol: OracleSolution, xs: Sequence[Fraction], approx: InnerApproximant | None = None):
    """E, E', E'' at exact rational points (high precision)."""
    approx = approx or build_inner()
    out = []
    with mpmath.workdps(sol.dps):
        for x in xs:
            vals = sol.eval_mp(_mpf(Fraction(x)))
            ref = (approx.F0(Fraction(x)), approx.F0p(Fraction(x)), approx.F0pp(Fraction(x)))
            out.append(tuple(float(v - _mpf(r)) for v, r in zip(vals, ref)))
    return out


@dataclass(frozen=True)
class FarFieldComparison:
    xs: tuple[float, ...]
    weighted: tuple[tuple[float, float, float], ...]  # |E| t^2 e^{3t}, |E'| t^{3/2} e^{3t}, |E''| t e^{3t}


def compare_farfield(
    sol: OracleSolution, xs: Sequence[float], abc: tuple | None = None
) -> FarFieldComparison:
    """Weighted differences between the numerical F and a x + b + sqrt(a/2t) q0(t)."""
    with mpmath.workdps(sol.dps):
        a, b, c = abc or sol.abc_mp()
        rows = []
        for x in xs:
            t = a / 2 * (x + b / a) ** 2
            F, Fp, Fpp = sol.eval_mp(x)
            q0 = q0_mp(t, c)
            D = mpmath.diff(lambda s: q0_mp(s, c), t) - q0 / (2 * t)
            far0 = a * x + b + mpmath.sqrt(a / (2 * t)) * q0
            far1 = a + a * D
            far2 = mpmath.sqrt(2) * a * mpmath.sqrt(a) * mpmath.exp(-t) * c * V_mp(t, c)
            e3 = mpmath.exp(3 * t)
            rows.append(
                (
                    float(abs(F - far0) * t * t * e3),
                    float(abs(Fp - far1) * t * mpmath.sqrt(t) * e3),
                    float(abs(Fpp - far2) * t * e3),
                )
            )
        return FarFieldComparison(tuple(float(x) for x in xs), tuple(rows))


def farfield_precision_tol(x_far: float, a: float = 1.6551904, b: float = -1.5654398) -> float:
    """Tolerance fine enough to resolve e^{-3t} at x_far."""
    t = a / 2 * (x_far + b / a) ** 2
    return 10.0 ** (-(3 * t / math.log(10) + 20))


def blasius_wall_stress(sol: OracleSolution) -> float:
    """f''(0) = a^{-3/2} in the normalisation used throughout."""
    return float(_mpf(sol.a_est) ** (-1.5))


# ---------------------------------------------------------------------------
# soundness checks for the energy constants (floating point, scipy)


def fundamental_sup(
    x_l: float, x_r: float, approx: InnerApproximant | None = None, n_eval: int = 400
) -> tuple[float, float, float]:
    """sup |phi_j''| for phi''' + F0 phi'' + F0'' phi = 0 with unit data in slot j."""
    import numpy as np
    from scipy.integrate import solve_ivp as sp_solve

    approx = approx or build_inner()
    F0 = np.polynomial.Polynomial([float(c) for c in approx.F0.coeffs])
    F0pp = F0.deriv(2)

    def rhs(x, y):
        return [y[1], y[2], -F0(x) * y[2] - F0pp(x) * y[0]]

    grid = np.linspace(x_l, x_r, n_eval)
    out = []
    for j in range(3):
        y0 = [0.0, 0.0, 0.0]
        y0[j] = 1.0
        r = sp_solve(rhs, (x_l, x_r), y0, t_eval=grid, rtol=1e-11, atol=1e-13, method="DOP853")
        out.append(float(np.max(np.abs(r.y[2]))))
    return tuple(out)  # type: ignore[return-value]


def green_norm_estimate(
    x_l: float, x_r: float, approx: InnerApproximant | None = None, n_forcings: int = 24, seed: int = 0
) -> float:
    """Largest sup|phi''| / sup|r| over test forcings with zero initial data."""
    import numpy as np
    from scipy.integrate import solve_ivp as sp_solve

    approx = approx or build_inner()
    F0 = np.polynomial.Polynomial([float(c) for c in approx.F0.coeffs])
    F0pp = F0.deriv(2)
    rng = np.random.default_rng(seed)
    grid = np.linspace(x_l, x_r, 400)
    width = x_r - x_l
    forcings = [lambda x: 1.0, lambda x: -1.0]
    for _ in range(n_forcings - 2):
        k = rng.uniform(0.2, 6.0)
        ph = rng.uniform(0, 2 * np.pi)
        forcings.append(lambda x, k=k, ph=ph: np.sin(k * (x - x_l) / width * np.pi + ph))
    best = 0.0
    for r_fun in forcings:
        def rhs(x, y, r_fun=r_fun):
            return [y[1], y[2], -F0(x) * y[2] - F0pp(x) * y[0] + r_fun(x)]

        sol = sp_solve(rhs, (x_l, x_r), [0.0, 0.0, 0.0], t_eval=grid, rtol=1e-10, atol=1e-13, method="DOP853")
        r_sup = max(abs(float(r_fun(x))) for x in grid)
        best = max(best, float(np.max(np.abs(sol.y[2]))) / r_sup)
    return best
