"""Semi-implicit solver for the viscous regularization of the penalized law.

The hyperbolic flux is kept explicit (Godunov interface flux, so the
advection part stays entropy-stable even when it dominates the diffusion)
while the diffusion term nu * d2q/dx2 is implicit, solved by a tridiagonal
direct solve each step.  The nonlocal velocity argument is
Picard-iterated per step.  Initial datum and obstacle are mollified with a
compactly supported bump; the source term -nu * o'' uses the mollified
obstacle curvature.
"""

from __future__ import annotations

from dataclasses import dataclass
import time
from typing import Optional, Tuple

import numpy as np

from . import kernels
from .diagnostics import DiagnosticsSeries, diagnostics_row
from .fields import FieldError, Grid1D, ScalarField
from .hyperbolic import RunResult, SolverConfig, SolverError, _DIAG_CHUNK, _Params
from .model import ModelSpec, validate

__all__ = ["ViscousConfig", "mollify", "viscous_step", "viscous_run"]


@dataclass(frozen=True)
class ViscousConfig(SolverConfig):
    nu: float = 1e-3
    mollifier_width: Optional[float] = None  # default: nu (clamped to >= dx)
    picard_tol: float = 1e-10
    picard_max: int = 50

    def __post_init__(self):
        super().__post_init__()
        if not 0.0 < self.nu <= 1.0:
            raise SolverError(f"nu must be in (0, 1], got {self.nu}")
        if self.picard_max < 1:
            raise SolverError("picard_max must be >= 1")

    def width_for(self, dx: float) -> float:
        w = self.nu if self.mollifier_width is None else self.mollifier_width
        return max(float(w), dx)


def _bump_weights(dx: float, width: float) -> np.ndarray:
    """Discrete bump exp(-1/(1-(x/width)^2)) sampled at cell offsets, sum 1."""
    if width < dx * (1.0 - 1e-12):
        raise FieldError(f"mollifier width {width} below grid spacing {dx}")
    R = int(np.ceil(width / dx)) - 1
    k = np.arange(-R, R + 1)
    z = k * dx / width
    w = np.zeros(len(k))
    inside = np.abs(z) < 1.0
    w[inside] = np.exp(-1.0 / (1.0 - z[inside] ** 2))
    return w / np.sum(w)


def _mollify_array(vals: np.ndarray, dx: float, width: float) -> np.ndarray:
    w = _bump_weights(dx, width)
    R = (len(w) - 1) // 2
    if R == 0:
        return vals.copy()
    padded = np.pad(vals, R, mode="reflect")
    return np.convolve(padded, w, mode="valid")


def mollify(f: ScalarField, width: float) -> ScalarField:
    """Convolve with a unit-mass bump of support radius ``width``.

    A convex combination of cell values: min/max are not expanded, constants
    are preserved, and interior-supported data keeps its mass exactly
    (reflecting padding at the window edges).
    """
    return ScalarField(f.grid, _mollify_array(f.values, f.grid.dx, width))


class _ViscousData:
    """Mollified obstacle samples and solver scalars for one viscous run."""

    def __init__(self, spec: ModelSpec, grid: Grid1D, config: ViscousConfig):
        self.p = _Params(spec, grid, config)
        width = config.width_for(grid.dx)
        dx = grid.dx
        self.o_cells = _mollify_array(self.p.o_cells, dx, width)
        self.o_face = _mollify_array(self.p.o_face, dx, width)
        o2 = np.asarray(spec.obstacle.deriv2(grid.centers), dtype=np.float64)
        self.o2_cells = _mollify_array(o2, dx, width)
        self.width = width


def _advance(q, data, config, t, t_end, diag, col):
    p = data.p
    return kernels.viscous_advance(
        q, data.o_cells, data.o_face, data.o2_cells, t, p.eps, p.c, p.dc,
        p.wmax, p.local, p.ext_zero, p.decay, p.g0, p.use_exp, p.gk, p.tail,
        config.cfl, data.dx, config.flux_opt_tol, t_end, p.u_cap, p.du_cap,
        config.nu, config.picard_tol, config.picard_max, diag, col,
    )


def viscous_step(
    state: ScalarField, spec: ModelSpec, vconfig: ViscousConfig
) -> Tuple[ScalarField, float]:
    """One semi-implicit step; dt from the hyperbolic CFL bound."""
    grid = state.grid
    data = _ViscousData(spec, grid, vconfig)
    data.dx = grid.dx
    q = state.values.copy()
    diag = np.empty((7, 1))
    # cap of one diagnostics column limits the kernel to exactly one step
    status, steps, t, _pic = _advance(
        q, data, vconfig, 0.0, np.inf, diag, 0
    )
    if status == kernels.PICARD_FAIL:
        raise SolverError("Picard iteration did not contract")
    if status == kernels.RESIDUAL_FAIL:
        raise SolverError("tridiagonal solve residual above 1e-12")
    if status == kernels.DT_UNDERFLOW:
        raise SolverError("time step underflow")
    if status == kernels.NAN_STATE:
        raise SolverError("NaN state after viscous step")
    if steps != 1:
        raise SolverError(f"expected a single step, performed {steps}")
    return ScalarField(grid, q), float(t)


def viscous_run(spec: ModelSpec, grid: Grid1D, vconfig: ViscousConfig) -> RunResult:
    """Advance the viscous approximation to t_final (mollified data).

    Mirrors the hyperbolic ``run`` contract; ``RunResult.picard_max`` reports
    the worst per-step Picard iteration count.
    """
    report = validate(spec, grid)
    if not report.ok:
        failing = [k for k, (ok, _) in report.checks.items() if not ok]
        raise SolverError(f"model validation failed: {', '.join(failing)}")
    data = _ViscousData(spec, grid, vconfig)
    data.dx = grid.dx
    q = _mollify_array(spec.initial_field(grid).values, grid.dx, data.width)
    diag = np.empty((7, _DIAG_CHUNK))
    diag[:, 0] = (0.0,) + diagnostics_row(q, data.o_cells, spec.epsilon, grid.dx)
    col = 1
    steps = 0
    t = 0.0
    pic_worst = 0
    boundaries = list(vconfig.snapshot_times)
    if not boundaries or boundaries[-1] < vconfig.t_final - 1e-12:
        boundaries.append(vconfig.t_final)
    snapshots = []
    t0_wall = time.perf_counter()
    if boundaries and boundaries[0] <= 1e-14:
        snapshots.append((0.0, ScalarField(grid, q.copy())))
        boundaries = boundaries[1:]
    for t_end in boundaries:
        while True:
            status, nsteps, t, pic = _advance(q, data, vconfig, t, t_end, diag, col)
            col += nsteps
            steps += nsteps
            pic_worst = max(pic_worst, pic)
            if status == kernels.OK:
                break
            if status == kernels.CAP_FULL:
                diag = np.concatenate([diag, np.empty((7, _DIAG_CHUNK))], axis=1)
                continue
            if status == kernels.PICARD_FAIL:
                raise SolverError(f"Picard iteration did not contract at t={t:.6g}")
            if status == kernels.RESIDUAL_FAIL:
                raise SolverError(f"tridiagonal residual above 1e-12 at t={t:.6g}")
            if status == kernels.DT_UNDERFLOW:
                raise SolverError(f"time step underflow at t={t:.6g}")
            raise SolverError(f"NaN state at step {steps}, t={t:.6g}")
        if any(abs(t_end - s) <= 1e-12 for s in vconfig.snapshot_times):
            snapshots.append((t_end, ScalarField(grid, q.copy())))
    wall = time.perf_counter() - t0_wall
    series = DiagnosticsSeries.from_matrix(diag[:, :col])
    return RunResult(
        snapshots=snapshots,
        final_state=ScalarField(grid, q.copy()),
        series=series,
        step_count=steps,
        wall_time=wall,
        picard_max=pic_worst,
    )
