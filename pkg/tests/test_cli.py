"""End-to-end CLI: subcommands, produced files, exit codes."""

import json
import textwrap

import numpy as np
import pytest

from obstaflow import io as rio
from obstaflow.cli import main

_SMALL = textwrap.dedent("""\
    [model]
    epsilon = 0.0625

    [grid]
    n_cells = 140

    [solver]
    t_final = 0.4
    snapshot_times = 0.2, 0.4
    """)


def _write(tmp_path, text, name="cfg.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_run_writes_bundle(tmp_path):
    cfg = _write(tmp_path, _SMALL)
    out = tmp_path / "out"
    assert main(["run", "--config", cfg, "--out", str(out), "--quiet"]) == 0
    for name in ("snapshot_t0.2.csv", "snapshot_t0.4.csv", "series.csv",
                 "summary.json"):
        assert (out / name).is_file(), name
    cols = rio.read_snapshot_csv(str(out / "snapshot_t0.4.csv"))
    assert set(cols) == {"x", "q", "o", "W", "V"}
    assert len(cols["x"]) == 140
    summary = json.loads((out / "summary.json").read_text())
    assert summary["checks"]["min_clearance_positive"] is True
    assert summary["config"]["grid"]["n_cells"] == "140"


def test_dx_override(tmp_path):
    cfg = _write(tmp_path, _SMALL)
    out = tmp_path / "out"
    assert main(["run", "--config", cfg, "--out", str(out), "--quiet",
                 "--dx-override", "0.1"]) == 0
    cols = rio.read_snapshot_csv(str(out / "snapshot_t0.4.csv"))
    assert len(cols["x"]) == 70


def test_sweep_eps(tmp_path):
    cfg = _write(tmp_path, _SMALL + textwrap.dedent("""\
        [experiment]
        kind = eps-sweep
        eps_list = 0.125, 0.0625
        """))
    out = tmp_path / "out"
    assert main(["sweep-eps", "--config", cfg, "--out", str(out), "--quiet"]) == 0
    for name in ("eps0.125_t0.2.csv", "eps0.0625_t0.4.csv", "sweep_eps.json"):
        assert (out / name).is_file(), name
    summary = json.loads((out / "sweep_eps.json").read_text())
    assert summary["sweep"]["eps"] == [0.125, 0.0625]
    assert len(summary["sweep"]["successive_l1"]["0.2"]) == 1


def test_sweep_nu(tmp_path):
    cfg = _write(tmp_path, _SMALL + textwrap.dedent("""\
        [experiment]
        kind = nu-sweep
        nu_list = 0.01, 0.001
        """))
    out = tmp_path / "out"
    assert main(["sweep-nu", "--config", cfg, "--out", str(out), "--quiet"]) == 0
    for name in ("nu0.01_t0.4.csv", "nu0.001_t0.4.csv", "ref_t0.4.csv",
                 "sweep_nu.json"):
        assert (out / name).is_file(), name
    summary = json.loads((out / "sweep_nu.json").read_text())
    d = summary["sweep"]["l1_to_hyperbolic"]["0.4"]
    assert d[1] < d[0]


def test_osl_surface(tmp_path):
    cfg = _write(tmp_path, _SMALL + "[experiment]\nn_times = 6\n")
    out = tmp_path / "out"
    assert main(["osl-surface", "--config", cfg, "--out", str(out), "--quiet"]) == 0
    q = np.loadtxt(out / "osl_q.csv", delimiter=",")
    v = np.loadtxt(out / "osl_v.csv", delimiter=",")
    times = np.loadtxt(out / "osl_times.csv", delimiter=",")
    x = np.loadtxt(out / "osl_x.csv", delimiter=",")
    assert q.shape == (6, 140) and v.shape == (6, 140)
    assert times.shape == (6,) and x.shape == (140,)


def test_compare(tmp_path):
    cfg = _write(tmp_path, "[model]\nepsilon = 0.0625\n[grid]\nn_cells = 140\n")
    out = tmp_path / "out"
    assert main(["compare", "--config", cfg, "--out", str(out), "--quiet"]) == 0
    for lab in ("nonlocal-u1", "local-u1", "local-u2"):
        assert (out / f"{lab}_t0.81.csv").is_file()
    summary = json.loads((out / "compare.json").read_text())
    assert summary["table_columns"] == ["t", "front", "min_clearance", "tv"]
    assert set(summary["table"]) == {"nonlocal-u1", "local-u1", "local-u2"}


def test_validate_prints_report(tmp_path, capsys):
    cfg = _write(tmp_path, _SMALL)
    assert main(["validate", "--config", cfg, "--quiet"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[-1] == "overall: pass"
    assert len(lines) == 6  # five checks plus the verdict


def test_config_error_exit_code(tmp_path, capsys):
    cfg = _write(tmp_path, "[model]\nepsilon = banana\n")
    assert main(["run", "--config", cfg, "--quiet"]) == 2
    assert "model.epsilon" in capsys.readouterr().err


def test_solver_rejection_exit_code(tmp_path, capsys):
    cfg = _write(tmp_path, textwrap.dedent("""\
        [model]
        epsilon = 0.0625
        obstacle = constant
        obstacle_level = 0.5

        [grid]
        n_cells = 140

        [solver]
        t_final = 0.4
        """))
    # infeasible datum (q01 reaches 1 > obstacle): solver rejects the model
    out = tmp_path / "out"
    assert main(["run", "--config", cfg, "--out", str(out), "--quiet"]) == 3
    assert "validation failed" in capsys.readouterr().err


def test_unknown_command_exits_nonzero():
    assert main(["frobnicate"]) != 0
