"""Command-line interface: output formats, config merging, exit codes."""

import json
import math
import subprocess
import sys

import pytest

from exittimes import exit_time, family_term, parse_domain, FamilyConstants, Point2, Chart
from exittimes.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# --- eval --------------------------------------------------------------------


def test_eval_single_point(capsys):
    code, out, err = run_cli(
        capsys, "eval", "--domain", "ellipse:a=2,b=1", "--point", "0,0"
    )
    assert code == 0
    assert err == ""
    assert out == "0 0 0.4\n"


def test_eval_multiple_points_order_preserved(capsys):
    code, out, _ = run_cli(
        capsys,
        "eval",
        "--domain", "ellipse:a=2,b=1",
        "--point", "1,0",
        "--point", "0,0.5",
    )
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 2
    assert lines[0].startswith("1 0 ")
    assert lines[1].startswith("0 0.5 ")
    assert float(lines[0].split()[2]) == pytest.approx(0.3)
    assert float(lines[1].split()[2]) == pytest.approx(0.3)


def test_eval_points_file_with_comments(capsys, tmp_path):
    pts = tmp_path / "probes.txt"
    pts.write_text("# header comment\n0,0\n\n0.5,0.25  # trailing note\n")
    code, out, _ = run_cli(
        capsys,
        "eval",
        "--domain", "ellipse:a=1,b=1",
        "--points", str(pts),
    )
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 2
    assert float(lines[0].split()[2]) == pytest.approx(0.25)


def test_eval_infinite_prints_inf(capsys):
    code, out, _ = run_cli(
        capsys, "eval", "--domain", "sector:alpha=2.0", "--point", "1,0.2"
    )
    assert code == 0
    assert out.split()[2] == "inf"


def test_eval_hyperbolic_chart_flag(capsys):
    e = math.e
    code, out, _ = run_cli(
        capsys,
        "eval",
        "--domain", "horodisk:R=1",
        "--chart", "half-plane",
        "--point", f"{e},0",
    )
    assert code == 0
    assert float(out.split()[2]) == pytest.approx(1.0)


def test_eval_family_constant_added(capsys):
    dom = parse_domain("sector:alpha=0.5")
    pt = Point2(0.4, 0.05, Chart.EUCLIDEAN)
    expected = exit_time(dom, pt) + family_term(dom, pt, FamilyConstants(a=0.3))
    code, out, _ = run_cli(
        capsys,
        "eval",
        "--domain", "sector:alpha=0.5",
        "--chart", "euclidean",
        "--family", "a=0.3",
        "--point", "0.4,0.05",
    )
    assert code == 0
    assert float(out.split()[2]) == pytest.approx(expected, rel=1e-9)


# --- exit codes ---------------------------------------------------------------


def test_unknown_domain_exits_2(capsys):
    code, _, err = run_cli(capsys, "eval", "--domain", "pentagon:a=1", "--point", "0,0")
    assert code == 2
    assert "pentagon" in err


def test_malformed_point_exits_2(capsys):
    code, _, err = run_cli(
        capsys, "eval", "--domain", "ellipse:a=1,b=1", "--point", "0;0"
    )
    assert code == 2
    assert "0;0" in err


def test_no_points_exits_2(capsys):
    code, _, err = run_cli(capsys, "eval", "--domain", "ellipse:a=1,b=1")
    assert code == 2
    assert "--point" in err


def test_unknown_chart_exits_2(capsys):
    code, _, err = run_cli(
        capsys,
        "eval",
        "--domain", "ellipse:a=1,b=1",
        "--chart", "mercator",
        "--point", "0,0",
    )
    assert code == 2
    assert "mercator" in err


def test_missing_points_file_exits_2(capsys, tmp_path):
    code, _, err = run_cli(
        capsys,
        "eval",
        "--domain", "ellipse:a=1,b=1",
        "--points", str(tmp_path / "nope.txt"),
    )
    assert code == 2
    assert err.startswith("error:")


def test_bad_family_key_exits_2(capsys):
    code, _, err = run_cli(
        capsys,
        "eval",
        "--domain", "sector:alpha=0.5",
        "--family", "zz=1",
        "--point", "0.4,0",
    )
    assert code == 2
    assert "zz" in err


def test_outside_point_exits_3(capsys):
    code, _, err = run_cli(
        capsys, "eval", "--domain", "ellipse:a=1,b=1", "--point", "5,5"
    )
    assert code == 3
    assert err.startswith("error:")


def test_invalid_chart_coordinates_exit_3(capsys):
    # half-plane chart needs x > 0 (= form keeps argparse from eating the dash)
    code, _, err = run_cli(
        capsys,
        "eval",
        "--domain", "horodisk:R=1",
        "--chart", "half-plane",
        "--point=-1,0",
    )
    assert code == 3
    assert "x > 0" in err


def test_solve_unbounded_without_truncation_exits_4(capsys, tmp_path):
    code, _, err = run_cli(
        capsys,
        "solve",
        "--domain", "parabola:p=1",
        "--h", "0.5",
        "--out", str(tmp_path / "p"),
    )
    assert code == 4
    assert "truncation" in err


def test_rigidity_unbounded_exits_5(capsys):
    code, _, err = run_cli(capsys, "rigidity", "--domain", "parabola:p=1")
    assert code == 5
    assert err.startswith("error:")


# --- simulate -----------------------------------------------------------------

SIM_ARGS = [
    "simulate",
    "--domain", "ellipse:a=1,b=1",
    "--point", "0,0",
    "--paths", "400",
    "--dt", "1e-3",
    "--seed", "11",
]


def test_simulate_json_shape(capsys):
    code, out, _ = run_cli(capsys, *SIM_ARGS)
    assert code == 0
    data = json.loads(out)
    assert sorted(data) == [
        "censored_fraction",
        "mean",
        "n",
        "seed",
        "stderr",
    ]
    assert data["n"] == 400
    assert data["seed"] == 11
    assert data["censored_fraction"] == 0.0
    assert 0.1 < data["mean"] < 0.4
    # keys must come out sorted so runs are byte-comparable
    assert out.index('"censored_fraction"') < out.index('"mean"') < out.index('"n"')


def test_simulate_byte_identical_across_runs_and_workers(capsys):
    outs = []
    for workers in ("1", "1", "3"):
        code, out, _ = run_cli(capsys, *SIM_ARGS, "--workers", workers)
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1] == outs[2]


def test_simulate_wos_method(capsys):
    code, out, _ = run_cli(
        capsys,
        "simulate",
        "--domain", "ellipse:a=1,b=1",
        "--point", "0,0",
        "--method", "wos",
        "--paths", "3000",
        "--seed", "5",
    )
    assert code == 0
    data = json.loads(out)
    assert abs(data["mean"] - 0.25) <= 4.0 * data["stderr"] + 1e-4


def test_simulate_sim_chart_flag(capsys):
    base = [
        "simulate",
        "--domain", "hdisk:R=1",
        "--point", "0,0",
        "--chart", "geodesic-polar",
        "--paths", "300",
        "--dt", "1e-3",
        "--seed", "2",
    ]
    code, out_disk, _ = run_cli(capsys, *base, "--sim-chart", "unit-disk")
    assert code == 0
    code, out_hp, _ = run_cli(capsys, *base, "--sim-chart", "half-plane")
    assert code == 0
    # different integration charts walk different paths but stay consistent
    d, h = json.loads(out_disk), json.loads(out_hp)
    assert d["mean"] != h["mean"]
    assert abs(d["mean"] - h["mean"]) <= 4.0 * (d["stderr"] + h["stderr"])


def test_simulate_euclidean_rejects_hyperbolic_sim_chart(capsys):
    code, _, err = run_cli(
        capsys,
        "simulate",
        "--domain", "ellipse:a=1,b=1",
        "--point", "0,0",
        "--paths", "10",
        "--sim-chart", "half-plane",
    )
    assert code == 3
    assert "euclidean" in err


# --- solve --------------------------------------------------------------------


def test_solve_writes_csv_and_json(capsys, tmp_path):
    prefix = tmp_path / "disk"
    code, out, _ = run_cli(
        capsys,
        "solve",
        "--domain", "ellipse:a=1,b=1",
        "--h", "0.1",
        "--out", str(prefix),
    )
    assert code == 0
    assert "residual" in out
    csv_path = prefix.with_suffix(".csv")
    json_path = prefix.with_suffix(".json")
    assert csv_path.exists() and json_path.exists()
    header, first = csv_path.read_text().splitlines()[:2]
    assert header == "u,v,value"
    assert len(first.split(",")) == 3
    meta = json.loads(json_path.read_text())
    assert meta["domain"] == "ellipse:a=1.0,b=1.0,h=0.0,k=0.0"
    assert meta["h"] == 0.1
    assert meta["residual"] < 1e-8


def test_solve_truncated_parabola(capsys, tmp_path):
    prefix = tmp_path / "par"
    code, out, _ = run_cli(
        capsys,
        "solve",
        "--domain", "parabola:p=1",
        "--h", "0.25",
        "--truncation", "0,6,-4,4",
        "--out", str(prefix),
    )
    assert code == 0
    assert prefix.with_suffix(".csv").exists()


# --- validate -----------------------------------------------------------------

VAL_ARGS = [
    "validate",
    "--domain", "ellipse:a=1,b=1",
    "--point", "0,0",
    "--point", "0.3,0.2",
    "--paths", "1500",
    "--dt", "2e-4",
    "--seed", "1",
    "--grid-h", "0.05",
]


def test_validate_pass_table_and_files(capsys, tmp_path):
    json_out = tmp_path / "report.json"
    csv_out = tmp_path / "report.csv"
    code, out, _ = run_cli(
        capsys,
        *VAL_ARGS,
        "--json-out", str(json_out),
        "--csv-out", str(csv_out),
    )
    assert code == 0
    assert "result: pass" in out
    assert "domain: ellipse:a=1.0,b=1.0,h=0.0,k=0.0" in out

    data = json.loads(json_out.read_text())
    assert data["passed"] is True
    assert len(data["rows"]) == 2
    row = data["rows"][0]
    assert row["mc_pass"] and row["grid_pass"]
    assert abs(row["closed"] - 0.25) < 1e-12

    lines = csv_out.read_text().splitlines()
    assert lines[0].startswith("u,v,closed,mc_mean")
    assert len(lines) == 3


def test_validate_failing_row_exits_1(capsys):
    # the solver is exact on this domain at grid nodes, so probe off-node,
    # where bilinear interpolation leaves ~1e-4, and shrink the tolerance
    code, out, _ = run_cli(
        capsys, *VAL_ARGS, "--point", "0.312,0.204", "--grid-tol", "1e-12"
    )
    assert code == 1
    assert "FAIL" in out


def test_validate_infinite_domain_exits_2(capsys):
    code, _, err = run_cli(
        capsys, "validate", "--domain", "sector:alpha=2.0", "--point", "1,0"
    )
    assert code == 2
    assert "infinite" in err


def test_validate_figure(capsys, tmp_path):
    fig = tmp_path / "grid.png"
    code, _, _ = run_cli(
        capsys,
        "validate",
        "--domain", "ellipse:a=1,b=1",
        "--point", "0,0",
        "--paths", "300",
        "--dt", "1e-3",
        "--grid-h", "0.1",
        "--figure", str(fig),
    )
    assert code == 0
    assert fig.stat().st_size > 1000
    assert fig.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


# --- rigidity and domains list -------------------------------------------------


def test_rigidity_ellipse(capsys):
    code, out, _ = run_cli(capsys, "rigidity", "--domain", "ellipse:a=2,b=1")
    assert code == 0
    assert float(out) == pytest.approx(8.0 * math.pi / 5.0, abs=1e-6)


def test_domains_list(capsys):
    code, out, _ = run_cli(capsys, "domains", "list")
    assert code == 0
    for kind in (
        "ellipse",
        "parabola",
        "annulus",
        "sector",
        "hyperbola-convex",
        "hyperbola-concave",
        "hdisk",
        "horodisk",
        "geodesic-nbhd",
        "geodesic-halfnbhd",
        "ideal-nbhd",
    ):
        assert kind in out
    assert "exit time always infinite" in out
    assert "native chart" in out


# --- config file ---------------------------------------------------------------


def test_config_supplies_defaults_and_flags_win(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"paths": 250, "dt": 1e-3, "seed": 9}))
    base = [
        "simulate",
        "--domain", "ellipse:a=1,b=1",
        "--point", "0,0",
        "--config", str(cfg),
    ]
    code, out, _ = run_cli(capsys, *base)
    assert code == 0
    data = json.loads(out)
    assert data["n"] == 250
    assert data["seed"] == 9

    code, out, _ = run_cli(capsys, *base, "--seed", "4")
    assert code == 0
    data = json.loads(out)
    assert data["n"] == 250  # still from config
    assert data["seed"] == 4  # flag wins


def test_config_must_be_object(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("[1,2]")
    code, _, err = run_cli(
        capsys,
        "simulate",
        "--domain", "ellipse:a=1,b=1",
        "--point", "0,0",
        "--paths", "10",
        "--config", str(cfg),
    )
    assert code == 2
    assert "JSON object" in err


# --- installed entry point ------------------------------------------------------


def test_console_script_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "exittimes.cli", "eval",
         "--domain", "ellipse:a=2,b=1", "--point", "0,0"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0
    assert proc.stdout == "0 0 0.4\n"
