"""End-to-end certificate: run every stage and collect a JSON-ready record.

Each section stores its verdict, the computed enclosures (outward decimal
strings and exact rationals), and the reference band where one exists.
Sections appear in dependency order; ``overall`` is the conjunction of the
section verdicts.  Only the ``timings`` block varies between runs.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from . import __version__
from .tail_roots import isolate_tail_roots
from .contraction import DEFAULT_EPSILONS, DEFAULT_INTERVALS, GLOBAL_LIMITS, run_inner_pipeline
from .energy import default_brackets
from .farfield import (
    DEFAULT_C_MAX,
    DEFAULT_EPSILON,
    DEFAULT_T,
    FarFieldParams,
    Q2_eval,
    R3_R4_bounds,
    compute_constants,
    farfield_E_bounds,
)
from .inner import (
    DEFAULT_BREAKPOINTS,
    Partition,
    bound_F0_family,
    bound_remainder,
    build_inner,
    check_remainder_bands,
)
from .matching import (
    ALPHA_BAND,
    CENTER,
    FPP0_BAND,
    FPP0_BLASIUS_BAND,
    JACOBIAN_BANDS,
    RESIDUAL_BANDS,
    RESIDUAL_NORM_BAND,
    RHO0,
    TripleEnclosure,
    certify_matching,
    jacobian_bound,
    matching_constants,
    residual_bound,
    wall_stress,
)
from .numerics.interval import Interval, decimal_bounds, working_precision, get_precision

# reference sizes shown next to the computed values
ENERGY_BANDS = (
    {"M": Fraction("3.03")},
    {"M1": Fraction("0.572"), "M2": Fraction("0.199"), "M3": Fraction("1.01"), "M": Fraction("0.825")},
    {"M1": Fraction("0.3"), "M2": Fraction("0.0744"), "M3": Fraction("1.01"), "M": Fraction("0.708")},
)
B0_BANDS = (Fraction("0.9757e-6"), Fraction("2.0653e-6"), Fraction("3.431e-6"))
EPP_BANDS = (Fraction("0.976e-6"), Fraction("2.07e-6"), Fraction("3.44e-6"))
FARFIELD_BANDS = {
    "R3m": Fraction("0.02057"),
    "R4m": Fraction("0.009042"),
    "h_norm": Fraction("1.6667e-4"),
    "h_m": Fraction("1.5651e-6"),
}
E_COEFF_BANDS = (Fraction("1.69e-5"), Fraction("9.20e-5"), Fraction("5.02e-4"))


@dataclass
class CertifyConfig:
    precision: int = 256
    eps_inner: tuple[Fraction, ...] = DEFAULT_EPSILONS
    T: Fraction = DEFAULT_T
    c_max: Fraction = DEFAULT_C_MAX
    eps_far: Fraction = DEFAULT_EPSILON
    rho0: Fraction = RHO0
    partition: tuple[Fraction, ...] = DEFAULT_BREAKPOINTS
    digits: int = 12
    out: str | None = None

    def echo(self) -> dict[str, Any]:
        return {
            "precision": self.precision,
            "eps_inner": [str(e) for e in self.eps_inner],
            "T": str(self.T),
            "c_max": str(self.c_max),
            "eps_far": str(self.eps_far),
            "rho0": str(self.rho0),
            "partition": [str(p) for p in self.partition],
            "digits": self.digits,
        }


def _parse_fraction(raw: str) -> Fraction:
    return Fraction(raw.strip())


def _parse_list(raw: str) -> tuple[Fraction, ...]:
    return tuple(_parse_fraction(p) for p in raw.split(",") if p.strip())


CONFIG_KEYS: dict[str, Callable[[str], Any]] = {
    "precision": int,
    "eps_inner": _parse_list,
    "T": _parse_fraction,
    "c_max": _parse_fraction,
    "eps_far": _parse_fraction,
    "rho0": _parse_fraction,
    "partition": _parse_list,
    "digits": int,
    "out": str.strip,
}


def parse_config_text(text: str, base: CertifyConfig | None = None) -> CertifyConfig:
    """``key = value`` lines; ``#`` starts a comment."""
    cfg = base or CertifyConfig()
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ValueError(f"line {n}: unknown key {key!r}")
        try:
            setattr(cfg, key, CONFIG_KEYS[key](value))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"line {n}: bad value for {key}: {value!r}") from exc
    return cfg


# -- serialisation ------------------------------------------------------------


def interval_record(iv: Interval, digits: int, band: Any = None) -> dict[str, Any]:
    lo, hi = decimal_bounds(iv, digits)
    rec: dict[str, Any] = {"enclosure": [lo, hi], "exact": [str(iv.lo), str(iv.hi)]}
    if band is not None:
        if isinstance(band, tuple):
            rec["band"] = [str(band[0]), str(band[1])]
            rec["within_band"] = band[0] <= iv.lo and iv.hi <= band[1]
        else:
            rec["band"] = ["<=", str(band)]
            rec["within_band"] = iv.hi <= band
    return rec


def _round_down_decimal(q: Fraction, digits: int) -> Fraction:
    return Fraction(decimal_bounds(Interval(q), digits)[0])


def fraction_record(q: Fraction) -> dict[str, str]:
    return {"decimal": f"{float(q):.12g}", "exact": str(q)}


@dataclass
class Section:
    name: str
    verdict: bool
    values: dict[str, Any] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    failure: str = ""

    def as_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"name": self.name, "verdict": "pass" if self.verdict else "fail"}
        if self.failure:
            out["failure"] = self.failure
        out["values"] = self.values
        if self.notes:
            out["notes"] = self.notes
        return out


@dataclass
class Certificate:
    config: CertifyConfig
    sections: list[Section]
    timings: dict[str, float]

    @property
    def overall(self) -> bool:
        return all(s.verdict for s in self.sections)

    def section(self, name: str) -> Section:
        for s in self.sections:
            if s.name == name:
                return s
        raise KeyError(name)

    def as_dict(self) -> dict[str, Any]:
        return {
            "version": __version__,
            "config": self.config.echo(),
            "sections": [s.as_dict() for s in self.sections],
            "overall": "pass" if self.overall else "fail",
            "timings": {k: round(v, 3) for k, v in self.timings.items()},
        }


# -- pipeline -----------------------------------------------------------------


def _validate(cfg: CertifyConfig) -> None:
    if len(cfg.eps_inner) != len(DEFAULT_INTERVALS):
        raise ValueError("eps_inner needs one value per inner interval")
    if any(e <= 0 for e in cfg.eps_inner):
        raise ValueError("eps_inner values must be positive")
    if cfg.rho0 <= 0:
        raise ValueError("rho0 must be positive")
    if cfg.T < DEFAULT_T:
        raise ValueError("T must be at least 1.99")
    if cfg.precision < 64:
        raise ValueError("precision must be at least 64 bits")
    Partition(cfg.partition)


def certify(cfg: CertifyConfig | None = None) -> Certificate:
    cfg = cfg or CertifyConfig()
    _validate(cfg)
    with working_precision(cfg.precision):
        return _certify(cfg)


def _certify(cfg: CertifyConfig) -> Certificate:
    d = cfg.digits
    rec = lambda iv, band=None: interval_record(iv, d, band)  # noqa: E731
    sections: list[Section] = []
    timings: dict[str, float] = {}
    clock = time.perf_counter

    approx = build_inner()
    part = Partition(cfg.partition)

    t0 = clock()
    remainder = bound_remainder(part, approx)
    checks = check_remainder_bands(remainder)
    sections.append(
        Section(
            "inner-remainder",
            all(c.ok for c in checks),
            {c.name: rec(c.computed, (c.band.lo, c.band.hi)) for c in checks},
            failure="; ".join(c.name for c in checks if not c.ok),
        )
    )
    timings["inner-remainder"] = clock() - t0

    t0 = clock()
    family = bound_F0_family(approx)
    misses = [c.name for c in family.values() if not c.ok]
    notes = []
    if misses:
        notes.append(
            "reference range missed by the computed enclosure (informational; later stages use the"
            " computed enclosures only): " + ", ".join(misses)
        )
    sections.append(
        Section(
            "F0-bands",
            True,
            {c.name: rec(c.computed, (c.band.lo, c.band.hi)) for c in family.values()},
            notes,
        )
    )
    timings["F0-bands"] = clock() - t0

    t0 = clock()
    brackets = default_brackets()
    sections.append(
        Section(
            "sign-changes",
            all(b.ok for b in brackets),
            {
                b.expr_id: {
                    "bracket": [str(b.lo), str(b.hi)],
                    "value_at_ends": [f"{float(b.value_lo):.6g}", f"{float(b.value_hi):.6g}"],
                    "positive_near_zero": b.positive_near_zero,
                    "sup_derivative_beyond_1_8": f"{float(b.worst_derivative):.6g}",
                }
                for b in brackets
            },
            failure="; ".join(b.expr_id for b in brackets if not b.ok),
        )
    )
    timings["sign-changes"] = clock() - t0

    t0 = clock()
    inner = run_inner_pipeline(DEFAULT_INTERVALS, cfg.eps_inner, approx, part)
    timings["inner-pipeline"] = clock() - t0
    for k, cert in enumerate(inner.certs):
        bands = ENERGY_BANDS[k]
        values = {name: rec(iv, bands.get(name)) for name, iv in cert.energy.as_dict().items()}
        values["refinement_depth"] = cert.energy.refinement_depth
        sections.append(Section(f"energy-I{k + 1}", True, values))
    for k, cert in enumerate(inner.certs):
        values = {
            "interval": [str(cert.x_l), str(cert.x_r)],
            "epsilon": str(cert.epsilon),
            "B0": rec(cert.B0, B0_BANDS[k]),
            "first_inequality_lhs": rec(cert.cond1_lhs, cert.epsilon),
            "second_inequality_lhs": rec(cert.cond2_lhs, Fraction(1)),
            "Epp_sup": rec(cert.Epp_bound, EPP_BANDS[k]),
            "Ep_sup": rec(cert.Ep_bound),
            "E_sup": rec(cert.E_bound),
            "Eppp_sup": rec(cert.Eppp_bound),
            "R_sup": rec(cert.R_sup),
        }
        sections.append(Section(f"contraction-I{k + 1}", cert.verdict, values, failure=cert.failure))
    if inner.verdict or len(inner.certs) == len(DEFAULT_INTERVALS):
        sections[-1].values["global_bounds"] = {
            name: rec(iv, lim)
            for name, iv, lim in zip(("Epp", "Ep", "E"), inner.global_bounds, GLOBAL_LIMITS)
        }
        if not inner.verdict:
            sections[-1].verdict = False
            sections[-1].failure = inner.failure
    missing = len(DEFAULT_INTERVALS) - len(inner.certs)
    for k in range(len(inner.certs), len(inner.certs) + missing):
        sections.append(Section(f"contraction-I{k + 1}", False, failure="not reached: " + inner.failure))

    t0 = clock()
    roots = isolate_tail_roots()
    sections.append(
        Section(
            "appendix-roots",
            roots.ok,
            {
                "P3_y0": rec(roots.P3.y0, (Fraction("30.60"), Fraction("30.61"))),
                "P3_s0": rec(roots.P3.s0, (Fraction("6.159"), Fraction("6.160"))),
                "P5_y0": rec(roots.P5.y0, (Fraction("33.851"), Fraction("33.852"))),
                "P5_s0": rec(roots.P5.s0, (Fraction("6.9701"), Fraction("6.9704"))),
                "U_min": rec(roots.U_min, (Fraction("-0.0944"), Fraction(0))),
                "R3_tail_min": rec(roots.R3_tail_min, (Fraction("-0.0107"), Fraction(0))),
            },
        )
    )
    timings["appendix-roots"] = clock() - t0

    t0 = clock()
    far_ok = True
    far_failure = ""
    try:
        params = FarFieldParams(T=cfg.T, c_max=cfg.c_max, epsilon=cfg.eps_far)
        k = compute_constants(params, roots)
        rc = R3_R4_bounds(cfg.T, roots)
        values = {name: rec(iv, FARFIELD_BANDS.get(name) if cfg.T == DEFAULT_T else None)
                  for name, iv in k.named_values().items()}
        values["Q2_T"] = rec(Q2_eval(Interval(cfg.T)))
        values["R4_lower_magnitude"] = rec(rc.R4_lower_mag)
        sections.append(Section("farfield-constants", k.Vmin.lo > 0, values))
        coeffs = farfield_E_bounds(CENTER[0] + cfg.rho0, k.h_norm)
        far_ok = k.contraction.verdict
        far_failure = k.contraction.failure
        sections.append(
            Section(
                "farfield-contraction",
                far_ok,
                {
                    "T": str(cfg.T),
                    "c_max": str(cfg.c_max),
                    "epsilon": str(cfg.eps_far),
                    "self_map_lhs": rec(k.contraction.lhs1),
                    "self_map_rhs": rec(k.contraction.rhs1),
                    "lipschitz": rec(k.contraction.lipschitz, Fraction(1)),
                    "h_norm": rec(k.h_norm),
                    "E_coefficient": rec(coeffs.value, E_COEFF_BANDS[0]),
                    "Ep_coefficient": rec(coeffs.slope, E_COEFF_BANDS[1]),
                    "Epp_coefficient": rec(coeffs.curvature, E_COEFF_BANDS[2]),
                },
                failure=far_failure,
            )
        )
    except ValueError as exc:
        far_ok = False
        sections.append(Section("farfield-constants", False, failure=str(exc)))
        sections.append(Section("farfield-contraction", False, failure="not reached"))
    timings["farfield"] = clock() - t0

    t0 = clock()
    triple = TripleEnclosure.around(CENTER, cfg.rho0)
    try:
        if not inner.verdict:
            raise ValueError("inner pipeline failed")
        mk = matching_constants(triple, cfg.eps_far)
        res = residual_bound(inner.final_state, mk, triple, approx)
        jac = jacobian_bound(mk, inner.final_state, triple, approx)
    except ValueError as exc:
        for name in ("residual", "jacobian", "match", "wall-stress"):
            sections.append(Section(name, False, failure=str(exc)))
        timings["matching"] = clock() - t0
        return Certificate(cfg, sections, timings)
    res_vals = {
        f"r{i + 1}": rec(c, band) for i, (c, band) in enumerate(zip(res.components, RESIDUAL_BANDS))
    }
    res_vals["norm"] = rec(res.norm, RESIDUAL_NORM_BAND)
    res_vals["t_m0"] = fraction_record(res.t_m0)
    res_vals["matching_constants"] = {
        "T": str(mk.T),
        "c": str(mk.c),
        "h_norm": rec(mk.h_norm),
        "h_m": rec(mk.h_m),
        "h_dm": rec(mk.h_dm),
        "h_cm": rec(mk.h_cm),
    }
    sections.append(Section("residual", res.within_bands, res_vals,
                            failure="" if res.within_bands else "a component exceeds its reference size"))
    labels = ("a", "b", "c")
    jac_vals: dict[str, Any] = {
        f"dN{i + 1}/d{labels[j]}": rec(jac.entries[i][j], JACOBIAN_BANDS[i][j])
        for i in range(3)
        for j in range(3)
    }
    jac_vals["J_norm2"] = rec(jac.J_norm2, ALPHA_BAND)
    jac_vals["t_m_range"] = rec(jac.t_m_range)
    sections.append(Section("jacobian", jac.within_bands, jac_vals,
                            failure="" if jac.within_bands else "an entry exceeds its reference size"))
    mc = certify_matching(res, jac, cfg.rho0)
    sections.append(
        Section(
            "match",
            mc.verdict,
            {
                "rho0": str(cfg.rho0),
                "alpha": rec(mc.alpha, Fraction(1)),
                # the allowance is rounded down so the printed band stays conservative
                "residual_norm": rec(mc.residual_norm, _round_down_decimal((1 - mc.alpha.hi) * cfg.rho0, d)),
                "a": rec(triple.a),
                "b": rec(triple.b),
                "c": rec(triple.c),
            },
            failure=mc.failure,
        )
    )
    ws = wall_stress(triple)
    sections.append(
        Section(
            "wall-stress",
            mc.verdict and ws.within_bands,
            {"fpp0": rec(ws.fpp0, FPP0_BAND), "fpp0_blasius": rec(ws.fpp0_blasius, FPP0_BLASIUS_BAND)},
            failure="" if mc.verdict else "matching not certified",
        )
    )
    timings["matching"] = clock() - t0
    return Certificate(cfg, sections, timings)


def render_report(data: dict[str, Any]) -> str:
    """Human-readable summary of a certificate dictionary."""
    lines = [f"certificate v{data.get('version', '?')}: overall {data.get('overall', '?').upper()}"]
    for sec in data.get("sections", []):
        head = f"[{sec['verdict'].upper():4}] {sec['name']}"
        if sec.get("failure"):
            head += f"  ({sec['failure']})"
        lines.append(head)
        for key, val in sec.get("values", {}).items():
            if isinstance(val, dict) and "enclosure" in val:
                lo, hi = val["enclosure"]
                extra = ""
                if "band" in val:
                    mark = "ok" if val.get("within_band") else "MISS"
                    extra = f"  band {' '.join(val['band'])} {mark}"
                lines.append(f"    {key:28} [{lo}, {hi}]{extra}")
        for note in sec.get("notes", []):
            lines.append(f"    note: {note}")
    return "\n".join(lines)


def precision_in_use() -> int:
    return get_precision()
