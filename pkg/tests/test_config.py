"""Strict configuration parsing: defaults, INI/JSON parity, error collection."""

import textwrap

import numpy as np
import pytest

from obstaflow.config import ConfigError, load_config, parse_config


def test_empty_config_gives_defaults():
    cfg = parse_config("")
    assert cfg.model.epsilon == 2.0 ** -10
    assert cfg.model.locality == "nonlocal"
    assert cfg.model.initial == "q01"
    assert cfg.grid.n_cells == 3500
    assert cfg.grid.dx == pytest.approx(1.0 / 500.0)
    assert cfg.solver.t_final == 1.5
    assert cfg.solver.cfl == 0.45
    assert cfg.viscous.nu == 1e-3
    assert cfg.experiment == "run"
    assert cfg.eps_list == (2.0**-6, 2.0**-7, 2.0**-8, 2.0**-9, 2.0**-10)
    assert cfg.nu_list == (1e-2, 1e-3, 1e-4)
    assert cfg.out_dir == "out"
    assert cfg.formats == ("csv", "json")


def test_ini_round_trip():
    cfg = parse_config(textwrap.dedent("""\
        [model]
        epsilon = 0.015625
        velocity = constant
        initial = q02
        locality = local

        [grid]
        x_left = -2
        x_right = 2
        n_cells = 400

        [solver]
        t_final = 2.0
        snapshot_times = 0.5, 1.0, 2.0
        cfl = 0.4

        [experiment]
        kind = eps-sweep
        eps_list = 0.25, 0.125

        [output]
        directory = results
        formats = csv
        """))
    assert cfg.model.epsilon == 0.015625
    assert cfg.model.velocity.kind == "constant"
    assert cfg.model.locality == "local"
    assert cfg.grid.n_cells == 400
    assert cfg.solver.snapshot_times == (0.5, 1.0, 2.0)
    assert cfg.experiment == "eps-sweep"
    assert cfg.eps_list == (0.25, 0.125)
    assert cfg.out_dir == "results"
    assert cfg.formats == ("csv",)


def test_json_equivalent_to_ini():
    ini = parse_config("[model]\nepsilon = 0.25\n[grid]\nn_cells = 500\n")
    js = parse_config('{"model": {"epsilon": 0.25}, "grid": {"n_cells": 500}}')
    assert js.model.epsilon == ini.model.epsilon
    assert js.grid.n_cells == ini.grid.n_cells
    # JSON lists are accepted for list-valued keys
    js2 = parse_config('{"solver": {"snapshot_times": [0.5, 1.0]}}')
    assert js2.solver.snapshot_times == (0.5, 1.0)


def test_epsilon_none_disables_penalization():
    cfg = parse_config("[model]\nepsilon = none\n")
    assert cfg.model.epsilon is None


def test_all_errors_collected_with_paths():
    bad = textwrap.dedent("""\
        [model]
        epsilon = -0.5
        velocity = warp
        colour = blue

        [grid]
        n_cells = four

        [turbo]
        x = 1
        """)
    with pytest.raises(ConfigError) as ei:
        parse_config(bad)
    msgs = ei.value.errors
    joined = "\n".join(msgs)
    assert len(msgs) >= 5
    assert "model.epsilon" in joined
    assert "model.velocity" in joined
    assert "model.colour: unknown key" in joined
    assert "grid.n_cells" in joined
    assert "turbo: unknown section" in joined


def test_syntax_errors_are_config_errors():
    with pytest.raises(ConfigError, match="syntax"):
        parse_config("not a config at all\n")
    with pytest.raises(ConfigError, match="JSON syntax"):
        parse_config("{broken json")


def test_unknown_experiment_and_format():
    with pytest.raises(ConfigError) as ei:
        parse_config("[experiment]\nkind = dance\n[output]\nformats = csv,yaml\n")
    joined = "\n".join(ei.value.errors)
    assert "experiment.kind" in joined
    assert "output.formats" in joined


def test_table_initial_datum(tmp_path):
    table = tmp_path / "datum.csv"
    xs = np.linspace(-3, 4, 50)
    np.savetxt(table, np.column_stack([xs, np.clip(-xs, 0.0, 1.0)]),
               delimiter=",")
    cfg = parse_config(f"[model]\ninitial = {table}\n")
    q0 = cfg.model.initial_field(cfg.grid)
    assert q0.values.max() <= 1.0
    assert q0.values.min() >= 0.0


def test_table_initial_datum_missing_file():
    with pytest.raises(ConfigError, match="model.initial"):
        parse_config("[model]\ninitial = /nonexistent/datum.csv\n")


def test_load_config_reads_file(tmp_path):
    p = tmp_path / "cfg.ini"
    p.write_text("[solver]\nt_final = 0.25\n")
    assert load_config(str(p)).solver.t_final == 0.25


def test_invalid_solver_values():
    with pytest.raises(ConfigError, match="solver"):
        parse_config("[solver]\ncfl = 1.7\n")
    with pytest.raises(ConfigError, match="solver"):
        parse_config("[solver]\nsnapshot_times = 9.0\nt_final = 1.0\n")
