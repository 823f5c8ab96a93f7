import csv
import io
import json
import os
import subprocess
import sys
from fractions import Fraction

import pytest

from blasiuscert.certificate import CertifyConfig, parse_config_text
from blasiuscert.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main

SECTION_ORDER = [
    "inner-remainder",
    "F0-bands",
    "sign-changes",
    "energy-I1",
    "energy-I2",
    "energy-I3",
    "contraction-I1",
    "contraction-I2",
    "contraction-I3",
    "appendix-roots",
    "farfield-constants",
    "farfield-contraction",
    "residual",
    "jacobian",
    "match",
    "wall-stress",
]


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture(scope="module")
def default_cert(tmp_path_factory):
    path = tmp_path_factory.mktemp("cert") / "default.json"
    code = main(["certify", "--out", str(path), "--quiet"])
    return code, path, json.loads(path.read_text())


def section(data, name):
    return next(s for s in data["sections"] if s["name"] == name)


def test_default_certificate_passes(default_cert):
    code, _, data = default_cert
    assert code == EXIT_OK and data["overall"] == "pass"
    assert [s["name"] for s in data["sections"]] == SECTION_ORDER
    assert all(s["verdict"] == "pass" for s in data["sections"])


def test_wall_stress_section(default_cert):
    ws = section(default_cert[2], "wall-stress")["values"]
    fpp0 = ws["fpp0"]
    assert fpp0["within_band"] and fpp0["band"] == ["234789/500000", "234811/500000"]
    lo, hi = (Fraction(v) for v in fpp0["enclosure"])
    assert Fraction("0.469578") <= lo and hi <= Fraction("0.469622")
    assert ws["fpp0_blasius"]["within_band"]


def test_records_carry_exact_values_and_bands(default_cert):
    data = default_cert[2]
    b0 = section(data, "contraction-I1")["values"]["B0"]
    assert set(b0) == {"enclosure", "exact", "band", "within_band"}
    lo, hi = (Fraction(v) for v in b0["exact"])
    elo, ehi = (Fraction(v) for v in b0["enclosure"])
    assert elo <= lo <= hi <= ehi


def test_certificate_is_deterministic(default_cert, tmp_path):
    other = tmp_path / "again.json"
    assert main(["certify", "--out", str(other), "--quiet"]) == EXIT_OK
    a, b = default_cert[2], json.loads(other.read_text())
    a.pop("timings"), b.pop("timings")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_report_renders_saved_certificate(default_cert, capsys):
    code, out, _ = run(["report", "--cert", str(default_cert[1])], capsys)
    assert code == EXIT_OK
    for name in SECTION_ORDER:
        assert name in out
    assert out.startswith("certificate") and "overall PASS" in out


def test_report_of_failed_certificate(default_cert, tmp_path, capsys):
    data = dict(default_cert[2], overall="fail")
    path = tmp_path / "failed.json"
    path.write_text(json.dumps(data))
    assert run(["report", "--cert", str(path)], capsys)[0] == EXIT_FAIL


def test_report_usage_errors(tmp_path, capsys):
    assert run(["report", "--cert", str(tmp_path / "missing.json")], capsys)[0] == EXIT_USAGE
    junk = tmp_path / "junk.json"
    junk.write_text("{not json")
    assert run(["report", "--cert", str(junk)], capsys)[0] == EXIT_USAGE


def test_tiny_ball_fails_matching(tmp_path):
    path = tmp_path / "small.json"
    assert main(["certify", "--rho0", "1e-7", "--out", str(path), "--quiet"]) == EXIT_FAIL
    data = json.loads(path.read_text())
    assert data["overall"] == "fail"
    match = section(data, "match")
    assert match["verdict"] == "fail" and "residual exceeds" in match["failure"]


def test_larger_T_shrinks_constants(default_cert, tmp_path):
    path = tmp_path / "T25.json"
    assert main(["certify", "--T", "2.5", "--out", str(path), "--quiet"]) == EXIT_OK
    data = json.loads(path.read_text())
    base = section(default_cert[2], "farfield-constants")["values"]
    big = section(data, "farfield-constants")["values"]
    for name in ("h_norm", "h_m", "R3m", "R4m", "dq", "dB"):
        assert Fraction(big[name]["exact"][1]) < Fraction(base[name]["exact"][1]), name


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# smaller ball\nrho0 = 1e-7\nT = 2.5  # trailing comment\n")
    path = tmp_path / "cfg.json"
    assert main(["certify", "--config", str(cfg), "--out", str(path), "--quiet"]) == EXIT_FAIL
    data = json.loads(path.read_text())
    assert data["config"]["T"] == "5/2" and data["config"]["rho0"] == "1/10000000"
    assert main(["certify", "--config", str(cfg), "--rho0", "5e-5", "--out", str(path), "--quiet"]) == EXIT_OK


def test_config_parser():
    cfg = parse_config_text("eps_inner = 3e-6, 2e-6, 3e-6\ndigits = 8\n", CertifyConfig())
    assert cfg.eps_inner == (Fraction("3e-6"), Fraction("2e-6"), Fraction("3e-6"))
    assert cfg.digits == 8
    with pytest.raises(ValueError, match="line 1"):
        parse_config_text("nonsense")
    with pytest.raises(ValueError, match="unknown key"):
        parse_config_text("colour = blue")
    with pytest.raises(ValueError, match="line 2"):
        parse_config_text("T = 2\nrho0 = abc")


def test_bad_config_is_usage_error(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("T = 1/0\n")
    assert run(["certify", "--config", str(cfg)], capsys)[0] == EXIT_USAGE
    assert run(["certify", "--config", str(tmp_path / "none.cfg")], capsys)[0] == EXIT_USAGE
    assert run(["certify", "--T", "1"], capsys)[0] == EXIT_USAGE


def test_certify_prints_json_without_out(capsys):
    code, out, _ = run(["certify", "--T", "2.5"], capsys)
    assert code == EXIT_OK
    assert json.loads(out)["overall"] == "pass"


def _eval(capsys, *args):
    code, out, _ = run(["eval", *args], capsys)
    assert code == EXIT_OK
    return json.loads(out)


def test_eval_inner_values(capsys):
    res = _eval(capsys, "--x", "0", "--which", "F")
    assert res["form"] == "inner" and Fraction(res["value"]) == 0
    assert res["value_enclosure"] == ["0", "0"]
    assert Fraction(_eval(capsys, "--x", "0", "--which", "F''")["value"]) == 1
    assert float(_eval(capsys, "--x", "1", "--which", "F'")["error_bound"]) <= 4.5e-6


def test_eval_far_derivative_matches_c2_slope(capsys):
    from blasiuscert.matching import c2_triple

    res = _eval(capsys, "--x", "10", "--which", "F'")
    assert res["form"] == "farfield"
    assert abs(float(res["value"]) - c2_triple()[0]) < 1e-10
    assert float(res["error_bound"]) < 1e-60


def test_eval_far_matches_oracle(capsys, oracle):
    res = _eval(capsys, "--x", "4", "--which", "F", "--form", "farfield")
    assert abs(float(res["value"]) - oracle(4.0)) < 1e-6
    assert _eval(capsys, "--x", "5/2", "--which", "Fpp", "--form", "farfield")["which"] == "Fpp"


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--x", "3", "--which", "F", "--form", "inner"],
        ["eval", "--x", "1", "--which", "F", "--form", "farfield"],
        ["eval", "--x", "-1", "--which", "F"],
        ["eval", "--x", "1", "--which", "G"],
        ["eval", "--x", "abc", "--which", "F"],
        ["certify", "--bogus"],
        ["compare", "--samples", "1"],
        ["compare", "--x-max", "1"],
        [],
    ],
)
def test_usage_errors_exit_two(argv, capsys):
    assert run(argv, capsys)[0] == EXIT_USAGE


@pytest.mark.slow
def test_compare_csv(capsys):
    code, out, _ = run(["compare", "--samples", "60", "--format", "csv"], capsys)
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 60
    inner = [r for r in rows if r["region"] == "inner"]
    far = [r for r in rows if r["region"] == "farfield-weighted"]
    assert inner and far
    assert max(float(r["err0"]) for r in inner) <= 2e-7
    assert max(float(r["err0"]) for r in far) <= 1.69e-5


@pytest.mark.slow
def test_compare_json_and_text(capsys):
    code, out, _ = run(["compare", "--samples", "12", "--format", "json", "--x-max", "6"], capsys)
    assert code == EXIT_OK and len(json.loads(out)) == 12
    code, out, _ = run(["compare", "--samples", "12", "--x-max", "6"], capsys)
    assert code == EXIT_OK and "max inner" in out and "max farfield-weighted" in out


@pytest.mark.slow
def test_precision_env_var_reaches_certificate(tmp_path):
    path = tmp_path / "prec.json"
    env = dict(os.environ, BLASIUSCERT_PREC="320")
    proc = subprocess.run(
        [sys.executable, "-m", "blasiuscert.cli", "certify", "--out", str(path), "--quiet"],
        env=env,
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads(path.read_text())["config"]["precision"] == 320
