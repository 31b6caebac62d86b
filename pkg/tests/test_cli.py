import json
import re
import subprocess
import sys

import numpy as np
import pytest

from qrgxy.blocks import CouplingParams
from qrgxy.rgflow import rg_trajectory


def run_cli(*argv, expect=0):
    proc = subprocess.run(
        [sys.executable, "-m", "qrgxy", *argv],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == expect, (proc.returncode, proc.stderr)
    return proc


def test_flow_csv_matches_library_trajectory():
    proc = run_cli("flow", "--dim", "1", "--gamma0", "-0.26", "--steps", "2")
    lines = proc.stdout.strip().split("\n")
    assert lines[0] == "dim,step,gamma,j"
    assert len(lines) == 4
    traj = rg_trajectory(CouplingParams(1.0, -0.26), 1, 2)
    for line, (k, p) in zip(lines[1:], enumerate(traj.steps)):
        dim, step, gamma, j = line.split(",")
        assert (int(dim), int(step)) == (1, k)
        assert abs(float(gamma) - p.gamma) < 1e-10
        assert abs(float(j) - p.j) < 1e-10


def test_flow_json_format():
    proc = run_cli("flow", "--dim", "2", "--gamma0", "0.3", "--steps", "1", "--format", "json")
    rows = json.loads(proc.stdout)
    assert [r["step"] for r in rows] == [0, 1]
    assert rows[0]["gamma"] == 0.3


def test_concurrence_rows_and_isotropic_value():
    proc = run_cli("concurrence", "--dim", "1", "--steps", "1", "--grid", "11")
    lines = proc.stdout.strip().split("\n")
    assert lines[0] == "dim,step,gamma,concurrence,abs_derivative"
    assert len(lines) == 1 + 2 * 11
    by_key = {}
    for line in lines[1:]:
        dim, step, gamma, conc, deriv = line.split(",")
        by_key[(int(step), float(gamma))] = float(conc)
    assert abs(by_key[(0, 0.0)] - 0.5) < 1e-9
    assert by_key[(0, 1.0)] <= 1e-9
    assert by_key[(0, -1.0)] <= 1e-9


def test_scaling_report_structure():
    proc = run_cli("scaling", "--dim", "1", "--steps", "1,2", "--grid", "101", "--threads", "4")
    report = json.loads(proc.stdout)
    assert report["dimension"] == 1
    assert [p["step"] for p in report["points"]] == [1, 2]
    assert [p["N"] for p in report["points"]] == [3, 9]
    for p in report["points"]:
        assert p["gamma_m"] < 0.0
        assert p["max_abs_derivative"] > 0.0
    assert set(report["derivative_fit"]) == {"slope", "intercept", "r2"}
    assert set(report["exponent_fit"]) == {"theta", "r2"}
    assert "n_B" in report["conventions"]["N_definition"]
    assert report["conventions"]["step_range"] == [1, 2]


def test_groundstate_csv_shape_and_amplitudes():
    proc = run_cli("groundstate", "--dim", "1")
    lines = proc.stdout.strip().split("\n")
    assert lines[0] == "basis_index,basis_label,phi1,phi2"
    assert len(lines) == 9
    pattern = re.compile(r"^\d+,[↑↓]{3},-?\d\.\d{12},-?\d\.\d{12}$")
    for line in lines[1:]:
        assert pattern.match(line), line
    amps = []
    for line in lines[1:]:
        _i, _label, p1, p2 = line.split(",")
        amps.extend([abs(float(p1)), abs(float(p2))])
    # at gamma = 1 every doublet amplitude is 0 or 1/2
    for a in amps:
        assert min(a, abs(a - 0.5)) < 1e-9


def test_groundstate_json_round_trip():
    proc = run_cli("groundstate", "--dim", "1", "--gamma0", "0.0", "--format", "json")
    rows = json.loads(proc.stdout)
    assert len(rows) == 8
    assert {r["basis_label"] for r in rows} == {
        "↑↑↑", "↑↑↓", "↑↓↑", "↑↓↓", "↓↑↑", "↓↑↓", "↓↓↑", "↓↓↓"
    }
    n1 = sum(r["phi1"] ** 2 for r in rows)
    n2 = sum(r["phi2"] ** 2 for r in rows)
    assert abs(n1 - 1.0) < 1e-12 and abs(n2 - 1.0) < 1e-12


def test_fixed_points_json_and_curve_file(tmp_path):
    curve_path = tmp_path / "curve.csv"
    proc = run_cli("fixed-points", "--dim", "1", "--grid", "101", "--curve-out", str(curve_path))
    points = json.loads(proc.stdout)
    assert [round(p["gamma"], 8) for p in points] == [-1.0, 0.0, 1.0]
    assert [p["stability"] for p in points] == ["stable", "unstable", "stable"]
    assert abs(points[1]["slope_at_root"] - 3.0) < 1e-4
    lines = curve_path.read_text().strip().split("\n")
    assert lines[0] == "gamma,gamma_prime"
    assert len(lines) == 102
    first = lines[1].split(",")
    assert float(first[0]) == -1.0 and float(first[1]) == -1.0


def test_jsweep_reports_flat_j_axis():
    proc = run_cli("jsweep", "--dim", "1", "--grid", "5")
    lines = proc.stdout.strip().split("\n")
    assert lines[0] == "gamma,j,concurrence"
    assert len(lines) == 1 + 5 * 3 + 1
    tag, value = lines[-1].split(",")
    assert tag == "max_j_spread"
    assert float(value) <= 1e-10
    js = {line.split(",")[1] for line in lines[1:-1]}
    assert js == {"0.1", "1", "10"}


def test_out_flag_writes_file_and_silences_stdout(tmp_path):
    out = tmp_path / "flow.csv"
    direct = run_cli("flow", "--dim", "1", "--gamma0", "0.5", "--steps", "1")
    filed = run_cli("flow", "--dim", "1", "--gamma0", "0.5", "--steps", "1", "--out", str(out))
    assert filed.stdout == ""
    assert out.read_text() == direct.stdout


def test_config_file_supplies_defaults_flags_override(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"dim": 2, "gamma0": 0.5, "steps": 1}))
    pure = run_cli("flow", "--config", str(cfg))
    lines = pure.stdout.strip().split("\n")
    assert len(lines) == 3
    assert lines[1].split(",")[0] == "2"
    assert float(lines[1].split(",")[2]) == 0.5
    mixed = run_cli("flow", "--config", str(cfg), "--dim", "1", "--gamma0", "-0.26")
    lines = mixed.stdout.strip().split("\n")
    assert lines[1].split(",")[0] == "1"
    assert float(lines[1].split(",")[2]) == -0.26


BAD_INVOCATIONS = [
    ("flow", "--gamma0", "0.1"),                      # dim missing
    ("flow", "--dim", "5", "--gamma0", "0.1"),        # dim out of range
    ("flow", "--dim", "1"),                           # gamma0 required
    ("flow", "--dim", "1", "--gamma0", "1.5"),        # gamma0 out of range
    ("flow", "--dim", "1", "--gamma0", "0.1", "--j", "0"),
    ("flow", "--dim", "1", "--gamma0", "0.1", "--format", "xml"),
    ("concurrence", "--dim", "1", "--grid", "4"),     # even grid
    ("scaling", "--dim", "1", "--steps", "3"),        # fits need two steps
    ("scaling", "--dim", "1", "--steps", "1,banana"),
    ("jsweep", "--dim", "1", "--js", "1,0"),
    ("fixed-points", "--dim", "1", "--grid", "50"),
    ("groundstate", "--dim", "1", "--config", "/nonexistent/config.json"),
]


@pytest.mark.parametrize("argv", BAD_INVOCATIONS, ids=lambda a: " ".join(a))
def test_configuration_mistakes_exit_2(argv):
    proc = run_cli(*argv, expect=2)
    assert proc.stdout == ""
    assert proc.stderr.startswith("qrg-error: ")
    assert len(proc.stderr.strip().split("\n")) == 1


def test_config_file_must_hold_an_object(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text("[1, 2, 3]")
    proc = run_cli("flow", "--dim", "1", "--gamma0", "0.1", "--config", str(cfg), expect=2)
    assert proc.stderr.startswith("qrg-error: ")


def test_unknown_flag_exits_2_with_prefix():
    proc = run_cli("flow", "--dim", "1", "--gamma0", "0.1", "--nope", expect=2)
    assert "qrg-error: " in proc.stderr


def test_numerical_contract_failures_exit_3():
    # force an impossible degeneracy tolerance so the solver's doublet check
    # trips; that class of failure must map to exit code 3, not 2
    code = (
        "import qrgxy.rgflow as r, qrgxy.cli as c, sys;"
        "r.DEGENERACY_RTOL = -1.0;"
        "sys.exit(c.main(['groundstate', '--dim', '1']))"
    )
    proc = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True
    )
    assert proc.returncode == 3
    assert proc.stderr.startswith("qrg-error: ")
    assert "degenerate" in proc.stderr


def test_thread_count_never_changes_output():
    fixed = [
        ("concurrence", "--dim", "1", "--steps", "1", "--grid", "21"),
        ("jsweep", "--dim", "1", "--grid", "7"),
    ]
    for argv in fixed:
        one = run_cli(*argv, "--threads", "1")
        again = run_cli(*argv, "--threads", "1")
        eight = run_cli(*argv, "--threads", "8")
        assert one.stdout == again.stdout == eight.stdout
        assert one.stdout  # something was actually produced
