"""Command-line entry point.

Subcommands: run, sweep-eps, sweep-nu, compare, osl-surface, validate.
Results go to the output directory as CSV/JSON; progress goes to stderr.
Exit codes: 0 success, 2 configuration error, 3 solver rejection.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from typing import List, Optional

import numpy as np

from . import io as rio
from .config import ConfigError, RunConfigFile, load_config, parse_config
from .experiments import eps_sweep, model_comparison, nu_sweep, osl_surface
from .fields import FieldError, Grid1D
from .hyperbolic import SolverError, run
from .model import ModelError, validate
from .viscous import viscous_run

__all__ = ["main"]


def _progress(args, msg: str) -> None:
    if not args.quiet:
        print(msg, file=sys.stderr, flush=True)


def _load(args) -> RunConfigFile:
    cfg = load_config(args.config) if args.config else parse_config("")
    if args.out:
        cfg = replace(cfg, out_dir=args.out)
    dx = None
    if args.paper_resolution:
        dx = 1.0 / 5000.0
    if args.dx_override is not None:
        dx = args.dx_override
    if dx is not None:
        g = cfg.grid
        n = int(round((g.x_right - g.x_left) / dx))
        cfg = replace(cfg, grid=Grid1D(g.x_left, g.x_right, n))
    return cfg


def _tname(t: float) -> str:
    return ("%g" % t).replace("-", "m")


def _write_run(cfg: RunConfigFile, result, out: str, prefix: str = "") -> None:
    for t, f in result.snapshots:
        rio.write_snapshot_csv(f, cfg.model, os.path.join(out, f"{prefix}snapshot_t{_tname(t)}.csv"))
    if not result.snapshots:
        rio.write_snapshot_csv(result.final_state, cfg.model,
                               os.path.join(out, f"{prefix}snapshot_final.csv"))
    rio.write_series_csv(result.series, os.path.join(out, f"{prefix}series.csv"))
    rio.write_summary_json(result, cfg.model, cfg.grid,
                           os.path.join(out, f"{prefix}summary.json"),
                           config_echo=cfg.raw)


def _cmd_run(args) -> int:
    cfg = _load(args)
    out = rio.ensure_dir(cfg.out_dir)
    _progress(args, f"run: dx={cfg.grid.dx:.6g}, t_final={cfg.solver.t_final}")
    result = run(cfg.model, cfg.grid, cfg.solver)
    _write_run(cfg, result, out)
    _progress(args, f"run: {result.step_count} steps in {result.wall_time:.2f}s -> {out}")
    return 0


def _cmd_sweep_eps(args) -> int:
    cfg = _load(args)
    out = rio.ensure_dir(cfg.out_dir)
    solver = cfg.solver
    if not solver.snapshot_times:
        solver = replace(solver, snapshot_times=(1.5, min(2.25, solver.t_final)))
    _progress(args, f"sweep-eps over {list(cfg.eps_list)}")
    sweep = eps_sweep(cfg.model, cfg.grid, solver, cfg.eps_list)
    for e, r in zip(sweep.values, sweep.runs):
        spec = cfg.model.with_epsilon(float(e))
        for t, f in r.snapshots:
            rio.write_snapshot_csv(
                f, spec, os.path.join(out, f"eps{e:g}_t{_tname(t)}.csv"))
    summary = {
        "eps": [float(e) for e in sweep.values],
        "snapshot_times": list(sweep.snapshot_times),
        "successive_l1": {
            _tname(t): [float(d) for d in sweep.successive_distances(t)]
            for t in sweep.snapshot_times
        },
        "cauchy_nonincreasing": {
            _tname(t): sweep.cauchy_nonincreasing(t) for t in sweep.snapshot_times
        },
    }
    rio.write_summary_json(sweep.runs[-1], cfg.model.with_epsilon(float(sweep.values[-1])),
                           cfg.grid, os.path.join(out, "sweep_eps.json"),
                           config_echo=cfg.raw, extra={"sweep": summary})
    _progress(args, f"sweep-eps done -> {out}")
    return 0


def _cmd_sweep_nu(args) -> int:
    cfg = _load(args)
    out = rio.ensure_dir(cfg.out_dir)
    vconf = cfg.viscous
    if not vconf.snapshot_times:
        vconf = replace(vconf, snapshot_times=(vconf.t_final,))
    _progress(args, f"sweep-nu over {list(cfg.nu_list)}")
    sweep = nu_sweep(cfg.model, cfg.grid, vconf, cfg.nu_list)
    for v, r in zip(sweep.values, sweep.runs):
        for t, f in r.snapshots:
            rio.write_snapshot_csv(
                f, cfg.model, os.path.join(out, f"nu{v:g}_t{_tname(t)}.csv"))
    for t, f in sweep.reference.snapshots:
        rio.write_snapshot_csv(f, cfg.model, os.path.join(out, f"ref_t{_tname(t)}.csv"))
    summary = {
        "nu": [float(v) for v in sweep.values],
        "snapshot_times": list(sweep.snapshot_times),
        "l1_to_hyperbolic": {
            _tname(t): [float(d) for d in sweep.distances_to_reference(t)]
            for t in sweep.snapshot_times
        },
        "monotone_decreasing": {
            _tname(t): bool(np.all(np.diff(sweep.distances_to_reference(t)) < 0))
            for t in sweep.snapshot_times
        },
    }
    rio.write_summary_json(sweep.reference, cfg.model, cfg.grid,
                           os.path.join(out, "sweep_nu.json"),
                           config_echo=cfg.raw, extra={"sweep": summary})
    _progress(args, f"sweep-nu done -> {out}")
    return 0


def _cmd_compare(args) -> int:
    cfg = _load(args)
    out = rio.ensure_dir(cfg.out_dir)
    eps = cfg.model.epsilon if cfg.model.epsilon is not None else 2.0 ** -10
    _progress(args, f"compare: three models at eps={eps:g}")
    comp = model_comparison(cfg.grid, eps=eps)
    for lab in comp.labels:
        r = comp.runs[lab]
        for t, f in r.snapshots:
            rio.write_snapshot_csv(f, comp_spec_for(lab, eps),
                                   os.path.join(out, f"{lab}_t{_tname(t)}.csv"))
    table = {lab: [list(row) for row in comp.table[lab]] for lab in comp.labels}
    rio.write_summary_json(comp.runs[comp.labels[0]], comp_spec_for(comp.labels[0], eps),
                           cfg.grid, os.path.join(out, "compare.json"),
                           config_echo=cfg.raw,
                           extra={"table_columns": ["t", "front", "min_clearance", "tv"],
                                  "table": table})
    _progress(args, f"compare done -> {out}")
    return 0


def comp_spec_for(label: str, eps: float):
    from .model import paper_model

    if label == "nonlocal-u1":
        return paper_model(epsilon=eps)
    if label == "local-u1":
        return paper_model(epsilon=eps, locality="local")
    return paper_model(epsilon=eps, locality="local", velocity="constant")


def _cmd_osl_surface(args) -> int:
    cfg = _load(args)
    out = rio.ensure_dir(cfg.out_dir)
    _progress(args, f"osl-surface: {cfg.n_times} time rows")
    surf = osl_surface(cfg.model, cfg.grid, cfg.solver, n_times=cfg.n_times)
    rio.write_matrix_csv(surf.times, os.path.join(out, "osl_times.csv"))
    rio.write_matrix_csv(surf.x, os.path.join(out, "osl_x.csv"))
    rio.write_matrix_csv(surf.q, os.path.join(out, "osl_q.csv"))
    rio.write_matrix_csv(surf.v, os.path.join(out, "osl_v.csv"))
    _progress(args, f"osl-surface done -> {out}")
    return 0


def _cmd_validate(args) -> int:
    cfg = _load(args)
    report = validate(cfg.model, cfg.grid)
    for line in report.summary_lines():
        print(line)
    print(f"overall: {'pass' if report.ok else 'FAIL'}")
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "sweep-eps": _cmd_sweep_eps,
    "sweep-nu": _cmd_sweep_nu,
    "compare": _cmd_compare,
    "osl-surface": _cmd_osl_surface,
    "validate": _cmd_validate,
}


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="obstaflow",
        description="Finite-volume solver for the obstacle-penalized nonlocal conservation law.",
    )
    sub = p.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="config file (INI-style sections or JSON)")
        sp.add_argument("--out", help="output directory (overrides config)")
        sp.add_argument("--dx-override", type=float, default=None,
                        help="grid spacing override")
        sp.add_argument("--paper-resolution", action="store_true",
                        help="use the full paper resolution dx=1/5000")
        sp.add_argument("--quiet", action="store_true",
                        help="suppress progress output")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as e:
        print(f"configuration error:\n{e}", file=sys.stderr)
        return 2
    except (SolverError, ModelError, FieldError, rio.IOError_) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
