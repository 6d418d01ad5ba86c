"""Explicit Godunov finite-volume solver for the penalized conservation law.

Modes: nonlocal (velocity argument W[q]), local (velocity argument q) and
unpenalized (V identically 1).  Homogeneous Neumann boundaries via ghost
cells, CFL-controlled forward Euler, W frozen per step.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from . import kernels
from .diagnostics import DiagnosticsSeries, diagnostics_row
from .fields import Grid1D, ScalarField
from .model import ModelSpec, validate, velocity_eval
from .nonlocal_op import build_weights

__all__ = [
    "SolverConfig",
    "RunResult",
    "SolverError",
    "cell_flux",
    "godunov_interface_flux",
    "max_wave_speed",
    "step",
    "run",
]

_DIAG_CHUNK = 250_000


class SolverError(RuntimeError):
    """Raised when a run is rejected (bad spec, dt underflow, NaN state)."""


@dataclass(frozen=True)
class SolverConfig:
    t_final: float = 1.5
    snapshot_times: Tuple[float, ...] = ()
    cfl: float = 0.45
    extension: str = "constant"
    flux_opt_tol: float = 1e-10
    w_max: Optional[float] = None  # default: sup of o over the window

    def __post_init__(self):
        if not 0.0 < self.cfl < 1.0:
            raise SolverError(f"cfl must be in (0,1), got {self.cfl}")
        snaps = tuple(sorted(float(s) for s in self.snapshot_times))
        if snaps and (snaps[0] < 0.0 or snaps[-1] > self.t_final + 1e-12):
            raise SolverError("snapshot_times must lie in [0, t_final]")
        object.__setattr__(self, "snapshot_times", snaps)


@dataclass(frozen=True)
class RunResult:
    snapshots: List[Tuple[float, ScalarField]]
    final_state: ScalarField
    series: DiagnosticsSeries
    step_count: int
    wall_time: float
    picard_max: int = 0  # 0 for the hyperbolic solver (no inner iteration)

    def snapshot_at(self, t: float, atol: float = 1e-9) -> ScalarField:
        for ts, f in self.snapshots:
            if abs(ts - t) <= atol:
                return f
        raise KeyError(f"no snapshot at t={t}")


class _Params:
    """Scalars handed to the compiled kernels, derived once per run."""

    def __init__(self, spec: ModelSpec, grid: Grid1D, config: SolverConfig):
        self.eps = -1.0 if spec.penalization is None else spec.penalization.epsilon
        self.c = spec.velocity.coeff_array
        self.dc = spec.velocity.deriv_coeff_array
        self.local = spec.locality == "local"
        self.ext_zero = config.extension == "zero"
        self.o_cells = np.asarray(spec.obstacle(grid.centers), dtype=np.float64)
        self.o_face = np.asarray(spec.obstacle(grid.faces), dtype=np.float64)
        wmax = config.w_max
        if wmax is None:
            wmax = float(max(np.max(self.o_cells), np.max(self.o_face)))
        self.wmax = wmax
        ws = np.linspace(0.0, wmax, 513)
        self.u_cap = float(max(velocity_eval(spec.velocity, w) for w in ws))
        from .model import velocity_deriv

        self.du_cap = float(max(abs(velocity_deriv(spec.velocity, w)) for w in ws))
        if self.local:
            self.use_exp = True  # unused
            self.decay = 0.0
            self.g0 = 0.0
            self.gk = np.zeros(1)
            self.tail = 0.0
        elif spec.kernel.kind == "exponential":
            self.use_exp = True
            self.decay = float(np.exp(-spec.kernel.rate * grid.dx))
            self.g0 = 1.0 - self.decay
            self.gk = np.zeros(1)
            self.tail = 0.0
        else:
            self.use_exp = False
            self.decay = 0.0
            self.g0 = 0.0
            w = build_weights(spec.kernel, grid, mass_tol=1e-12)
            self.gk = np.asarray(w.gamma_k, dtype=np.float64)
            self.tail = w.tail_mass


def cell_flux(q: float, o_x: float, w: float, spec: ModelSpec) -> float:
    """f = V_eps(o_x - q) * q * U(w); local mode passes w = q."""
    eps = -1.0 if spec.penalization is None else spec.penalization.epsilon
    c = spec.velocity.coeff_array
    wmax = _default_wmax(spec)
    return float(
        kernels.flux_scalar(q, o_x, w, eps, c, wmax, spec.locality == "local")
    )


def godunov_interface_flux(
    q_left: float,
    q_right: float,
    o_face: float,
    w_face: float,
    spec: ModelSpec,
    tol: float = 1e-10,
) -> float:
    """min of f over [q_left, q_right] if increasing across the face, else max."""
    eps = -1.0 if spec.penalization is None else spec.penalization.epsilon
    c = spec.velocity.coeff_array
    dc = spec.velocity.deriv_coeff_array
    wmax = _default_wmax(spec)
    return float(
        kernels.godunov_flux(
            q_left, q_right, o_face, w_face, eps, c, dc, wmax,
            spec.locality == "local", tol,
        )
    )


def _default_wmax(spec: ModelSpec) -> float:
    # sup of o over a generous window; presets are bounded by their offset
    xs = np.linspace(-20.0, 20.0, 2001)
    return float(np.max(spec.obstacle(xs)))


def max_wave_speed(
    q: ScalarField, o: ScalarField, W: Optional[ScalarField], spec: ModelSpec
) -> float:
    """CFL bound L >= max interface characteristic speed; dt = cfl*dx/L."""
    grid = q.grid
    o_face = np.asarray(spec.obstacle(grid.faces), dtype=np.float64)
    n = grid.n_cells
    wf = np.zeros(n + 1)
    if W is not None:
        wf[:n] = W.values
        wf[n] = W.values[-1]
    eps = -1.0 if spec.penalization is None else spec.penalization.epsilon
    c = spec.velocity.coeff_array
    dc = spec.velocity.deriv_coeff_array
    wmax = float(max(np.max(o.values), np.max(o_face)))
    ws = np.linspace(0.0, wmax, 513)
    from .model import velocity_deriv

    u_cap = float(max(velocity_eval(spec.velocity, w) for w in ws))
    du_cap = float(max(abs(velocity_deriv(spec.velocity, w)) for w in ws))
    return float(
        kernels.max_face_speed(
            q.values, o_face, wf, eps, c, dc, wmax,
            spec.locality == "local", u_cap, du_cap,
        )
    )


def step(
    state: ScalarField, spec: ModelSpec, config: SolverConfig, dt: Optional[float] = None
) -> Tuple[ScalarField, float]:
    """One forward-Euler Godunov step; dt from the CFL bound unless given."""
    grid = state.grid
    p = _Params(spec, grid, config)
    n = grid.n_cells
    q = state.values.copy()
    ext = 0.0 if p.ext_zero else float(q[-1])
    wf = np.zeros(n + 1)
    if not p.local:
        w = np.empty(n)
        if p.use_exp:
            kernels.nonlocal_exp(q, p.decay, p.g0, ext, w)
        else:
            kernels.nonlocal_direct(q, p.gk, p.tail, ext, w)
        wf[:n] = w
        wf[n] = ext
    if dt is None:
        L = kernels.max_face_speed(
            q, p.o_face, wf, p.eps, p.c, p.dc, p.wmax, p.local, p.u_cap, p.du_cap
        )
        dt = config.cfl * grid.dx if L <= 0 else config.cfl * grid.dx / L
    if dt < 1e-14:
        raise SolverError("time step underflow")
    F = np.empty(n + 1)
    kernels.godunov_flux_sweep(
        q, p.o_face, wf, p.eps, p.c, p.dc, p.wmax, p.local, config.flux_opt_tol, F
    )
    q -= (dt / grid.dx) * np.diff(F)
    if not np.all(np.isfinite(q)):
        raise SolverError("NaN state after step")
    return ScalarField(grid, q), float(dt)


def run(spec: ModelSpec, grid: Grid1D, config: SolverConfig) -> RunResult:
    """Advance to t_final, recording snapshots and per-step diagnostics.

    Snapshot times are hit exactly by shortening the last dt of each segment.
    """
    report = validate(spec, grid)
    if not report.ok:
        failing = [k for k, (ok, _) in report.checks.items() if not ok]
        raise SolverError(f"model validation failed: {', '.join(failing)}")
    p = _Params(spec, grid, config)
    n = grid.n_cells
    q = spec.initial_field(grid).values.copy()
    w_buf = np.zeros(n)
    wf_buf = np.zeros(n + 1)
    f_buf = np.zeros(n + 1)
    diag = np.empty((7, _DIAG_CHUNK))
    # row 0: the initial state
    diag[:, 0] = (0.0,) + diagnostics_row(
        q, p.o_cells, spec.epsilon, grid.dx
    )
    col = 1
    steps = 0
    t = 0.0
    boundaries = list(config.snapshot_times)
    if not boundaries or boundaries[-1] < config.t_final - 1e-12:
        boundaries.append(config.t_final)
    snapshots = []
    t0_wall = time.perf_counter()
    if boundaries and boundaries[0] <= 1e-14:
        snapshots.append((0.0, ScalarField(grid, q.copy())))
        boundaries = boundaries[1:]
    for t_end in boundaries:
        while True:
            status, nsteps, t = kernels.advance(
                q, p.o_cells, p.o_face, t, p.eps, p.c, p.dc, p.wmax,
                p.local, p.ext_zero, p.decay, p.g0, p.use_exp, p.gk, p.tail,
                config.cfl, grid.dx, config.flux_opt_tol, t_end,
                p.u_cap, p.du_cap, diag, col, w_buf, wf_buf, f_buf,
            )
            col += nsteps
            steps += nsteps
            if status == kernels.OK:
                break
            if status == kernels.CAP_FULL:
                diag = np.concatenate(
                    [diag, np.empty((7, _DIAG_CHUNK))], axis=1
                )
                continue
            if status == kernels.DT_UNDERFLOW:
                raise SolverError(f"time step underflow at t={t:.6g}")
            raise SolverError(f"NaN state at step {steps}, t={t:.6g}")
        if any(abs(t_end - s) <= 1e-12 for s in config.snapshot_times):
            snapshots.append((t_end, ScalarField(grid, q.copy())))
    wall = time.perf_counter() - t0_wall
    series = DiagnosticsSeries.from_matrix(diag[:, :col])
    return RunResult(
        snapshots=snapshots,
        final_state=ScalarField(grid, q.copy()),
        series=series,
        step_count=steps,
        wall_time=wall,
    )
