"""Per-step diagnostics and coincidence-set/flux-constancy reports.

The solvers record one row per time step: mass, total variation, obstacle
clearance min(o - q), extreme one-sided slopes of q and of V_eps(o - q),
and min q.  These are the observable surrogates for the comparison
principle, the BV bound and the one-sided Lipschitz bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .fields import ScalarField
from .model import ModelSpec, penalize, velocity_eval

__all__ = ["DiagnosticsSeries", "CoincidenceReport", "diagnostics_row", "record", "coincidence"]


@dataclass(frozen=True)
class DiagnosticsSeries:
    """Aligned per-step arrays; row layout matches kernels.advance."""

    times: np.ndarray
    mass: np.ndarray
    tv: np.ndarray
    min_clearance: np.ndarray
    osl_lower_q: np.ndarray
    osl_upper_v: np.ndarray
    min_q: np.ndarray

    FIELDS = ("times", "mass", "tv", "min_clearance", "osl_lower_q", "osl_upper_v", "min_q")

    @staticmethod
    def from_matrix(diag: np.ndarray) -> "DiagnosticsSeries":
        if not np.all(np.isfinite(diag)):
            raise ValueError("non-finite diagnostics entry")
        return DiagnosticsSeries(*(np.ascontiguousarray(diag[i]) for i in range(7)))

    def __len__(self) -> int:
        return len(self.times)


def diagnostics_row(q: np.ndarray, o: np.ndarray, eps: Optional[float], dx: float):
    """(mass, tv, min_clearance, osl_lower_q, osl_upper_v, min_q) for a state."""
    clear = o - q
    v = penalize_array(clear, eps)
    dq = np.diff(q)
    tv = float(np.sum(np.abs(dq)))
    osl_q = float(np.min(dq) / dx) if len(dq) else 0.0
    osl_v = float(np.max(np.diff(v)) / dx) if len(dq) else 0.0
    return (
        float(np.sum(q) * dx),
        tv,
        float(np.min(clear)),
        osl_q,
        osl_v,
        float(np.min(q)),
    )


def penalize_array(s: np.ndarray, eps: Optional[float]) -> np.ndarray:
    if eps is None:
        return np.ones_like(s)
    return 1.0 - np.exp(-s / eps)


def record(state: ScalarField, spec: ModelSpec, t: float):
    """One diagnostics row (t first) for a state under a model."""
    o = spec.obstacle(state.grid.centers)
    return (t,) + diagnostics_row(state.values, o, spec.epsilon, state.grid.dx)


@dataclass(frozen=True)
class CoincidenceReport:
    """Maximal intervals where o - q <= tol, with per-interval flux spread.

    c_ref is the flux-constancy reference value o(b) * U(W(b)) at the right
    endpoint b of each interval.
    """

    tol: float
    intervals: List[Tuple[int, int]] = field(default_factory=list)
    flux_values: List[np.ndarray] = field(default_factory=list)
    c_ref: List[float] = field(default_factory=list)
    rel_spread: List[float] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not self.intervals


def coincidence(
    state: ScalarField,
    spec: ModelSpec,
    tol: float = 1e-3,
    W: Optional[ScalarField] = None,
) -> CoincidenceReport:
    """Locate near-contact intervals and measure flux constancy on them.

    W defaults to the fast nonlocal evaluation for nonlocal models; local
    models use W = q.
    """
    if tol <= 0:
        raise ValueError("tol must be > 0")
    grid = state.grid
    o = spec.obstacle(grid.centers)
    q = state.values
    if spec.locality == "local":
        w_vals = q
    elif W is not None:
        w_vals = W.values
    else:
        from .nonlocal_op import build_weights, eval_nonlocal_fast

        w_vals = eval_nonlocal_fast(state, build_weights(spec.kernel, grid)).values

    u = np.array([velocity_eval(spec.velocity, w) for w in w_vals])
    v = penalize_array(o - q, spec.epsilon)
    phi = v * q * u

    mask = (o - q) <= tol
    intervals: List[Tuple[int, int]] = []
    i = 0
    n = len(q)
    while i < n:
        if mask[i]:
            j = i
            while j + 1 < n and mask[j + 1]:
                j += 1
            intervals.append((i, j))
            i = j + 1
        else:
            i += 1

    flux_values = []
    c_refs = []
    spreads = []
    for (i0, i1) in intervals:
        fv = phi[i0 : i1 + 1]
        flux_values.append(fv)
        b = i1
        c_ref = float(o[b] * velocity_eval(spec.velocity, w_vals[b]))
        c_refs.append(c_ref)
        spread = float((np.max(fv) - np.min(fv)) / max(abs(c_ref), 1e-14))
        spreads.append(spread)
    return CoincidenceReport(tol, intervals, flux_values, c_refs, spreads)
