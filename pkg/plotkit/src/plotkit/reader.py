"""CSV bundle access with explicit expectation-vs-found error messages.

The input contract is the obstaflow CLI's output format: snapshot CSVs with
header ``x,q,o,W,V``, series CSVs with header
``times,mass,tv,min_clearance,osl_lower_q,osl_upper_v,min_q``, and plain
matrix dumps (``osl_times/osl_x/osl_q/osl_v.csv``) without headers.
"""

from __future__ import annotations

import glob
import os
from typing import Dict, List, Sequence

import numpy as np

__all__ = [
    "PlotkitError",
    "SNAPSHOT_COLUMNS",
    "SERIES_COLUMNS",
    "expand_glob",
    "read_table",
    "read_snapshot",
    "read_series",
    "read_matrix",
]

SNAPSHOT_COLUMNS = ("x", "q", "o", "W", "V")
SERIES_COLUMNS = (
    "times", "mass", "tv", "min_clearance", "osl_lower_q", "osl_upper_v", "min_q",
)


class PlotkitError(RuntimeError):
    """Raised when an input bundle does not match the documented contract."""


def expand_glob(pattern: str) -> List[str]:
    """Sorted matches; an empty result is an error naming the pattern."""
    matches = sorted(glob.glob(pattern))
    if not matches:
        raise PlotkitError(
            f"expected at least one file matching {pattern!r}, found none"
        )
    return matches


def read_table(path: str, required: Sequence[str]) -> Dict[str, np.ndarray]:
    """Headered CSV with at least the ``required`` columns, in any order."""
    if not os.path.isfile(path):
        raise PlotkitError(f"expected file {path!r}, found nothing")
    with open(path, "r", encoding="utf-8") as fh:
        header = [h.strip() for h in fh.readline().strip().split(",")]
        try:
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        except ValueError as e:
            raise PlotkitError(f"{path}: expected numeric CSV rows, found: {e}")
    missing = [c for c in required if c not in header]
    if missing:
        raise PlotkitError(
            f"{path}: expected columns {list(required)}, "
            f"found {header} (missing {missing})"
        )
    if data.size == 0:
        raise PlotkitError(f"{path}: expected data rows, found only a header")
    if data.shape[1] != len(header):
        raise PlotkitError(
            f"{path}: header names {len(header)} columns, rows have {data.shape[1]}"
        )
    return {name: data[:, i] for i, name in enumerate(header)}


def read_snapshot(path: str) -> Dict[str, np.ndarray]:
    return read_table(path, SNAPSHOT_COLUMNS)


def read_series(path: str) -> Dict[str, np.ndarray]:
    return read_table(path, SERIES_COLUMNS)


def read_matrix(path: str) -> np.ndarray:
    """Headerless rectangular dump."""
    if not os.path.isfile(path):
        raise PlotkitError(f"expected file {path!r}, found nothing")
    try:
        return np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as e:
        raise PlotkitError(f"{path}: expected a numeric matrix, found: {e}")
