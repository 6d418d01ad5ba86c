"""CSV/JSON serialization of run results for tests and the figure tooling.

Snapshot CSVs carry columns x,q,o,W,V at 17 significant digits so doubles
round-trip exactly.  Series CSVs mirror DiagnosticsSeries.  Summary JSON
echoes the config and records final diagnostics plus the per-run
acceptance-style booleans.
"""

from __future__ import annotations

import json
import os
from typing import Dict, Optional

import numpy as np

from .diagnostics import DiagnosticsSeries, penalize_array
from .fields import Grid1D, ScalarField
from .hyperbolic import RunResult
from .model import ModelSpec, velocity_eval
from .nonlocal_op import build_weights, eval_nonlocal, eval_nonlocal_fast

__all__ = [
    "write_snapshot_csv",
    "read_snapshot_csv",
    "write_series_csv",
    "read_series_csv",
    "write_summary_json",
    "write_matrix_csv",
    "snapshot_columns",
    "ensure_dir",
    "IOError_",
]

_FMT = "%.17g"


class IOError_(RuntimeError):
    """Raised when a result file cannot be written or parsed."""


def snapshot_columns(state: ScalarField, spec: ModelSpec) -> Dict[str, np.ndarray]:
    """The five documented snapshot columns for one state."""
    grid = state.grid
    q = state.values
    o = np.asarray(spec.obstacle(grid.centers), dtype=np.float64)
    if spec.locality == "local":
        w = q.copy()
    else:
        weights = build_weights(spec.kernel, grid)
        if weights.rate > 0:
            w = eval_nonlocal_fast(state, weights).values
        else:
            w = eval_nonlocal(state, weights).values
    v = penalize_array(o - q, spec.epsilon)
    return {"x": grid.centers, "q": q, "o": o, "W": w, "V": v}


def _write_table(path: str, header, columns) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for row in zip(*columns):
                fh.write(",".join(_FMT % v for v in row) + "\n")
    except OSError as e:
        raise IOError_(f"cannot write {path}: {e}")


def write_snapshot_csv(state: ScalarField, spec: ModelSpec, path: str) -> None:
    cols = snapshot_columns(state, spec)
    _write_table(path, cols.keys(), cols.values())


def read_snapshot_csv(path: str) -> Dict[str, np.ndarray]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
    except (OSError, ValueError) as e:
        raise IOError_(f"cannot read {path}: {e}")
    if data.shape[1] != len(header):
        raise IOError_(f"{path}: {len(header)} header fields, {data.shape[1]} columns")
    return {name: data[:, i] for i, name in enumerate(header)}


def write_series_csv(series: DiagnosticsSeries, path: str) -> None:
    cols = [getattr(series, f) for f in DiagnosticsSeries.FIELDS]
    _write_table(path, DiagnosticsSeries.FIELDS, cols)


def read_series_csv(path: str) -> DiagnosticsSeries:
    cols = read_snapshot_csv(path)
    missing = [f for f in DiagnosticsSeries.FIELDS if f not in cols]
    if missing:
        raise IOError_(f"{path}: missing series columns {missing}")
    return DiagnosticsSeries(*(cols[f] for f in DiagnosticsSeries.FIELDS))


def write_summary_json(
    result: RunResult,
    spec: ModelSpec,
    grid: Grid1D,
    path: str,
    config_echo: Optional[dict] = None,
    extra: Optional[dict] = None,
) -> None:
    s = result.series
    mass0 = s.mass[0] if len(s) else 0.0
    drift = abs(s.mass[-1] - mass0) / max(abs(mass0), 1e-300) if len(s) else 0.0
    summary = {
        "config": config_echo or {},
        "step_count": result.step_count,
        "wall_time": result.wall_time,
        "picard_max": result.picard_max,
        "grid": {"x_left": grid.x_left, "x_right": grid.x_right,
                 "n_cells": grid.n_cells, "dx": grid.dx},
        "epsilon": spec.epsilon,
        "final": {
            f: (float(getattr(s, f)[-1]) if len(s) else None)
            for f in DiagnosticsSeries.FIELDS
        },
        "checks": {
            "relative_mass_drift": float(drift),
            "min_clearance_positive": bool(np.min(s.min_clearance) > 0.0),
            "min_q_above_minus_1e12": bool(np.min(s.min_q) >= -1e-12),
            "tv_within_10x_initial": bool(np.max(s.tv) <= 10.0 * s.tv[0])
            if len(s) and s.tv[0] > 0 else True,
        },
    }
    if extra:
        summary.update(extra)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=1)
            fh.write("\n")
    except OSError as e:
        raise IOError_(f"cannot write {path}: {e}")


def write_matrix_csv(mat: np.ndarray, path: str) -> None:
    """Plain rectangular dump (no header), 17 significant digits."""
    try:
        np.savetxt(path, np.atleast_2d(mat), delimiter=",", fmt=_FMT)
    except OSError as e:
        raise IOError_(f"cannot write {path}: {e}")


def ensure_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path
