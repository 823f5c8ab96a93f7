"""Command-line front end.

    blasiuscert certify [--config PATH] [--out PATH] [--rho0 R] [--eps-inner E1,E2,E3] [--T T]
    blasiuscert eval --x X --which {F,F',F''} [--form {auto,inner,farfield}]
    blasiuscert compare [--samples N] [--format {text,csv,json}]
    blasiuscert report --cert PATH

Exit codes: 0 success / certificate pass, 1 certificate failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .certificate import CertifyConfig, certify, parse_config_text, render_report
from .contraction import GLOBAL_LIMITS
from .numerics.interval import get_precision

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
WHICH = {"F": 0, "F'": 1, "F''": 2, "Fp": 1, "Fpp": 2}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # report usage errors through exit code 2
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _fraction(raw: str) -> Fraction:
    try:
        return Fraction(raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {raw!r}") from exc


def _fraction_list(raw: str) -> tuple[Fraction, ...]:
    return tuple(_fraction(p) for p in raw.split(",") if p.strip())


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="blasiuscert", description="Certified enclosure of the Blasius wall stress.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("certify", help="run the full certificate pipeline")
    c.add_argument("--config", type=Path)
    c.add_argument("--out", type=Path)
    c.add_argument("--rho0", type=_fraction)
    c.add_argument("--eps-inner", type=_fraction_list)
    c.add_argument("--T", dest="T", type=_fraction)
    c.add_argument("--precision", type=int)
    c.add_argument("--quiet", action="store_true")

    e = sub.add_parser("eval", help="evaluate the closed-form approximation")
    e.add_argument("--x", required=True, type=_fraction)
    e.add_argument("--which", required=True, choices=sorted(WHICH))
    e.add_argument("--form", default="auto", choices=("auto", "inner", "farfield"))
    e.add_argument("--digits", type=int, default=15)

    m = sub.add_parser("compare", help="compare against the numerical reference solution")
    m.add_argument("--samples", type=int, default=200)
    m.add_argument("--format", default="text", choices=("text", "csv", "json"))
    m.add_argument("--x-max", type=float, default=10.0)

    r = sub.add_parser("report", help="render a saved certificate")
    r.add_argument("--cert", required=True, type=Path)
    return p


# -- certify --------------------------------------------------------------------


def _config_from_args(args: argparse.Namespace) -> CertifyConfig:
    cfg = CertifyConfig(precision=get_precision())
    if args.config is not None:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
        try:
            cfg = parse_config_text(text, cfg)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    if args.rho0 is not None:
        cfg.rho0 = args.rho0
    if args.eps_inner is not None:
        cfg.eps_inner = args.eps_inner
    if args.T is not None:
        cfg.T = args.T
    if args.precision is not None:
        cfg.precision = args.precision
    if args.out is not None:
        cfg.out = str(args.out)
    return cfg


def cmd_certify(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    try:
        cert = certify(cfg)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    data = cert.as_dict()
    text = json.dumps(data, indent=2)
    if cfg.out:
        Path(cfg.out).write_text(text + "\n")
    if not args.quiet:
        print(render_report(data) if cfg.out else text)
    return EXIT_OK if cert.overall else EXIT_FAIL


# -- eval -----------------------------------------------------------------------


def evaluate(x: Fraction, which: str, form: str = "auto") -> dict:
    """Value of the approximation at the C^2 triple, with the certified error bound."""
    from .farfield import farfield_E_bounds, farfield_solution
    from .inner import X_END, build_inner
    from .matching import CENTER, RHO0, c2_triple_mp, matching_constants, TripleEnclosure
    from .numerics.elementary import exp, sqrt
    from .numerics.interval import Interval

    if x < 0:
        raise UsageError("x must be non-negative")
    order = WHICH[which]
    if form == "auto":
        form = "inner" if x <= X_END else "farfield"
    if form == "inner" and x > X_END:
        raise UsageError("the inner form is only valid on [0, 5/2]")
    if form == "farfield" and x < X_END:
        raise UsageError("the far-field form is only valid for x >= 5/2")
    if form == "inner":
        approx = build_inner()
        poly = (approx.F0, approx.F0p, approx.F0pp)[order]
        value = Interval(poly(x))
        # GLOBAL_LIMITS is ordered (E'', E', E)
        bound = Interval(GLOBAL_LIMITS[2 - order])
    else:
        a, b, c = (Fraction(str(v)) for v in c2_triple_mp())
        value = farfield_solution(x, a, b, c, order)
        mk = matching_constants(TripleEnclosure.around(CENTER, RHO0))
        coeffs = farfield_E_bounds(CENTER[0] + RHO0, mk.h_norm)
        t = Interval(a) / 2 * (x + Interval(b) / a) ** 2
        # |E| ~ t^-2, |E'| ~ t^-3/2, |E''| ~ t^-1, all times e^{-3t}
        weight = (t * t, t * sqrt(t), t)[order]
        bound = coeffs.as_tuple()[order] / weight * exp(-3 * t)
    return {"x": str(x), "which": which, "form": form, "value": value, "error_bound": bound}


def cmd_eval(args: argparse.Namespace) -> int:
    from .numerics.interval import decimal_bounds

    res = evaluate(args.x, args.which, args.form)
    lo, hi = decimal_bounds(res["value"], args.digits)
    mid = float(res["value"].mid)
    err = float(res["error_bound"].hi)
    print(
        json.dumps(
            {
                "x": res["x"],
                "which": res["which"],
                "form": res["form"],
                "value": f"{mid:.{args.digits}g}",
                "value_enclosure": [lo, hi],
                "error_bound": f"{err:.6g}",
            },
            indent=2,
        )
    )
    return EXIT_OK


# -- compare --------------------------------------------------------------------


def compare_table(samples: int, x_max: float = 10.0) -> list[dict]:
    """Rows over [0, x_max]: plain errors inside, weighted far-field errors beyond 5/2."""
    import mpmath

    from .inner import build_inner
    from .oracle import compare_farfield, farfield_precision_tol, solve_ivp

    if samples < 2:
        raise UsageError("need at least two samples")
    if x_max < 2.5:
        raise UsageError("x-max must be at least 2.5")
    tol = max(farfield_precision_tol(x_max), 1e-160)
    sol = solve_ivp(20.0, tol)
    approx = build_inner()
    xs = [x_max * k / (samples - 1) for k in range(samples)]
    inner_x = [x for x in xs if x <= 2.5]
    far_x = [x for x in xs if x > 2.5]
    rows = []
    for x in inner_x:
        xq = Fraction(x)
        vals = sol.eval_mp(xq)
        ref = (approx.F0(xq), approx.F0p(xq), approx.F0pp(xq))
        errs = [abs(float(v - mpmath.mpf(r.numerator) / r.denominator)) for v, r in zip(vals, ref)]
        rows.append({"x": x, "region": "inner", "err0": errs[0], "err1": errs[1], "err2": errs[2]})
    if far_x:
        far = compare_farfield(sol, far_x)
        for x, w in zip(far.xs, far.weighted):
            rows.append({"x": x, "region": "farfield-weighted", "err0": w[0], "err1": w[1], "err2": w[2]})
    return rows


def _table_text(rows: list[dict]) -> str:
    out = [f"{'x':>10} {'region':>18} {'err0':>12} {'err1':>12} {'err2':>12}"]
    for r in rows:
        out.append(f"{r['x']:10.5f} {r['region']:>18} {r['err0']:12.4e} {r['err1']:12.4e} {r['err2']:12.4e}")
    for region in ("inner", "farfield-weighted"):
        sel = [r for r in rows if r["region"] == region]
        if sel:
            mx = [max(r[k] for r in sel) for k in ("err0", "err1", "err2")]
            out.append(f"max {region}: " + ", ".join(f"{v:.4e}" for v in mx))
    return "\n".join(out)


def cmd_compare(args: argparse.Namespace) -> int:
    rows = compare_table(args.samples, args.x_max)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["x", "region", "err0", "err1", "err2"], lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        sys.stdout.write(buf.getvalue())
    elif args.format == "json":
        print(json.dumps(rows, indent=2))
    else:
        print(_table_text(rows))
    return EXIT_OK


# -- report ---------------------------------------------------------------------


def cmd_report(args: argparse.Namespace) -> int:
    try:
        data = json.loads(args.cert.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read certificate: {exc}") from exc
    print(render_report(data))
    return EXIT_OK if data.get("overall") == "pass" else EXIT_FAIL


COMMANDS = {"certify": cmd_certify, "eval": cmd_eval, "compare": cmd_compare, "report": cmd_report}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"blasiuscert: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
