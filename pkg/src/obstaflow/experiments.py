"""Parameter studies: eps-sweep, three-model comparison, OSL surface, nu-sweep.

Everything here is deterministic orchestration over the solvers; results are
plain dataclasses that cli-io serializes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .fields import Grid1D, ScalarField, l1_distance, total_variation
from .hyperbolic import RunResult, SolverConfig, SolverError, run
from .model import ModelSpec, VelocitySpec, paper_model
from .viscous import ViscousConfig, viscous_run

__all__ = [
    "SweepResult",
    "ComparisonResult",
    "OslSurface",
    "eps_sweep",
    "model_comparison",
    "osl_surface",
    "nu_sweep",
    "front_position",
]


@dataclass(frozen=True)
class SweepResult:
    """Runs over one parameter axis plus L1 distance matrices per snapshot.

    ``pairwise_l1[ti]`` is the symmetric matrix of L1 distances between the
    sweep members at snapshot time ``snapshot_times[ti]``.  For sweeps against
    a fixed reference run (nu-sweep), ``reference_l1[ti, k]`` is the distance
    of member k to the reference at that time.
    """

    values: np.ndarray
    runs: Tuple[RunResult, ...]
    snapshot_times: Tuple[float, ...]
    pairwise_l1: np.ndarray
    reference: Optional[RunResult] = None
    reference_l1: Optional[np.ndarray] = None

    def successive_distances(self, t: float) -> np.ndarray:
        """d_k = L1(member_k, member_{k+1}) at snapshot time t."""
        ti = self._time_index(t)
        k = len(self.values)
        return np.array([self.pairwise_l1[ti, i, i + 1] for i in range(k - 1)])

    def cauchy_nonincreasing(self, t: float, slack: float = 0.0) -> bool:
        d = self.successive_distances(t)
        return bool(np.all(np.diff(d) <= slack))

    def distances_to_reference(self, t: float) -> np.ndarray:
        if self.reference_l1 is None:
            raise ValueError("sweep has no reference run")
        return self.reference_l1[self._time_index(t)]

    def _time_index(self, t: float) -> int:
        for i, s in enumerate(self.snapshot_times):
            if abs(s - t) <= 1e-9:
                return i
        raise KeyError(f"no snapshot at t={t}")


def _pairwise(fields: List[ScalarField]) -> np.ndarray:
    k = len(fields)
    m = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            m[i, j] = m[j, i] = l1_distance(fields[i], fields[j])
    return m


def eps_sweep(
    spec_template: ModelSpec,
    grid: Grid1D,
    config: SolverConfig,
    eps_list: Sequence[float],
) -> SweepResult:
    """One run per epsilon (nonincreasing), with pairwise L1 matrices."""
    eps = np.asarray([float(e) for e in eps_list])
    if len(eps) == 0:
        raise SolverError("eps_list must be nonempty")
    if len(eps) > 1 and not np.all(np.diff(eps) <= 0):
        raise SolverError("eps_list must be nonincreasing")
    runs = tuple(run(spec_template.with_epsilon(e), grid, config) for e in eps)
    times = config.snapshot_times
    pair = np.stack(
        [_pairwise([r.snapshot_at(t) for r in runs]) for t in times]
    ) if times else np.zeros((0, len(eps), len(eps)))
    return SweepResult(eps, runs, times, pair)


def front_position(state: ScalarField, threshold: float = 0.05) -> float:
    """Rightmost cell center with q >= threshold (-inf if none)."""
    idx = np.nonzero(state.values >= threshold)[0]
    if len(idx) == 0:
        return -np.inf
    return float(state.grid.centers[idx[-1]])


_COMPARISON_TIMES = (0.0, 0.81, 1.59, 4.5)


@dataclass(frozen=True)
class ComparisonResult:
    """Nonlocal+U1 vs local+U1 vs local+U2 on the shared triangular datum.

    ``table[label]`` lists (time, front_position, min_clearance, tv) per
    snapshot.
    """

    labels: Tuple[str, str, str]
    runs: Dict[str, RunResult]
    table: Dict[str, List[Tuple[float, float, float, float]]]


def model_comparison(
    grid: Grid1D,
    config: Optional[SolverConfig] = None,
    eps: float = 2.0 ** -10,
) -> ComparisonResult:
    """Three runs from the same datum: nonlocal U1, local U1, local U2."""
    if config is None:
        config = SolverConfig(t_final=4.5, snapshot_times=_COMPARISON_TIMES)
    labels = ("nonlocal-u1", "local-u1", "local-u2")
    specs = {
        "nonlocal-u1": paper_model(epsilon=eps),
        "local-u1": paper_model(epsilon=eps, locality="local"),
        "local-u2": paper_model(epsilon=eps, locality="local", velocity="constant"),
    }
    runs = {lab: run(specs[lab], grid, config) for lab in labels}
    table: Dict[str, List[Tuple[float, float, float, float]]] = {}
    for lab in labels:
        rows = []
        o = specs[lab].obstacle(grid.centers)
        for t, f in runs[lab].snapshots:
            rows.append((
                t,
                front_position(f),
                float(np.min(o - f.values)),
                total_variation(f),
            ))
        table[lab] = rows
    return ComparisonResult(labels, runs, table)


@dataclass(frozen=True)
class OslSurface:
    """Dense (time x space) dump of q and V_eps(o - q) for surface plots."""

    times: np.ndarray
    x: np.ndarray
    q: np.ndarray  # shape (n_times, n_cells)
    v: np.ndarray  # same shape
    dx: float

    def row_min_slope_q(self) -> np.ndarray:
        return np.min(np.diff(self.q, axis=1), axis=1) / self.dx

    def row_max_slope_v(self) -> np.ndarray:
        return np.max(np.diff(self.v, axis=1), axis=1) / self.dx


def osl_surface(
    spec: ModelSpec,
    grid: Grid1D,
    config: SolverConfig,
    n_times: int = 64,
) -> OslSurface:
    """Run with a dense snapshot stride and stack the states into matrices."""
    if n_times < 2:
        raise SolverError("n_times must be >= 2")
    times = tuple(np.linspace(0.0, config.t_final, n_times))
    dense = replace(config, snapshot_times=times)
    res = run(spec, grid, dense)
    from .diagnostics import penalize_array

    o = np.asarray(spec.obstacle(grid.centers), dtype=np.float64)
    q = np.stack([f.values for _, f in res.snapshots])
    v = np.stack([penalize_array(o - row, spec.epsilon) for row in q])
    return OslSurface(np.asarray(times), grid.centers, q, v, grid.dx)


def nu_sweep(
    spec: ModelSpec,
    grid: Grid1D,
    vconfig_template: ViscousConfig,
    nu_list: Sequence[float],
) -> SweepResult:
    """Viscous runs over nonincreasing nu, measured against the
    hyperbolic run at each snapshot time."""
    nus = np.asarray([float(v) for v in nu_list])
    if len(nus) == 0:
        raise SolverError("nu_list must be nonempty")
    if len(nus) > 1 and not np.all(np.diff(nus) <= 0):
        raise SolverError("nu_list must be nonincreasing")
    hyp_config = SolverConfig(
        t_final=vconfig_template.t_final,
        snapshot_times=vconfig_template.snapshot_times,
        cfl=vconfig_template.cfl,
        extension=vconfig_template.extension,
        flux_opt_tol=vconfig_template.flux_opt_tol,
        w_max=vconfig_template.w_max,
    )
    reference = run(spec, grid, hyp_config)
    runs = tuple(
        viscous_run(spec, grid, replace(vconfig_template, nu=v)) for v in nus
    )
    times = vconfig_template.snapshot_times
    pair = np.stack(
        [_pairwise([r.snapshot_at(t) for r in runs]) for t in times]
    ) if times else np.zeros((0, len(nus), len(nus)))
    ref = np.stack([
        np.array([l1_distance(r.snapshot_at(t), reference.snapshot_at(t))
                  for r in runs])
        for t in times
    ]) if times else np.zeros((0, len(nus)))
    return SweepResult(nus, runs, times, pair, reference=reference,
                       reference_l1=ref)
