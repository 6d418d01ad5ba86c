"""Closed-form model data: kernel, velocity, obstacle, penalization, initial data.

The §-style presets used throughout the test problems are provided by name:
obstacle ``paper-gauss`` (a Gaussian dip with floor 0.2), initial data ``q01``
(indicator plus down-ramp) and ``q02`` (pure indicator), velocities ``lwr``
(decreasing affine) and ``constant``, and the unit-mass exponential kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .fields import Grid1D, ScalarField, sample_function, total_variation

__all__ = [
    "KernelSpec",
    "VelocitySpec",
    "ObstacleSpec",
    "Penalization",
    "ModelSpec",
    "ValidationReport",
    "ModelError",
    "validate",
    "penalize",
    "penalize_deriv",
    "velocity_eval",
    "velocity_deriv",
    "q01",
    "q02",
    "paper_model",
]


class ModelError(ValueError):
    """Raised on malformed model specifications."""


# --------------------------------------------------------------------------
# kernel


@dataclass(frozen=True)
class KernelSpec:
    """Nonlocal kernel on [0, inf), nonnegative, nonincreasing, unit mass.

    ``exponential``: gamma(x) = rate * exp(-rate * x), mass exactly 1.
    ``custom-tabulated``: samples of gamma at uniform ``spacing`` starting at
    0, plus a declared ``tail_mass`` beyond the last sample.
    """

    kind: str = "exponential"
    rate: float = 1.0
    table: Optional[np.ndarray] = None
    spacing: float = 0.0
    tail_mass: float = 0.0

    def __post_init__(self):
        if self.kind not in ("exponential", "custom-tabulated"):
            raise ModelError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "exponential" and self.rate <= 0:
            raise ModelError("exponential kernel needs rate > 0")
        if self.kind == "custom-tabulated":
            if self.table is None or self.spacing <= 0:
                raise ModelError("tabulated kernel needs table and spacing > 0")
            tab = np.ascontiguousarray(self.table, dtype=np.float64)
            tab.flags.writeable = False
            object.__setattr__(self, "table", tab)

    def mass(self) -> float:
        if self.kind == "exponential":
            return 1.0
        return float(np.trapezoid(self.table, dx=self.spacing) + self.tail_mass)


# --------------------------------------------------------------------------
# velocity


@dataclass(frozen=True)
class VelocitySpec:
    """Velocity U given by polynomial coefficients (ascending order).

    ``lwr`` is U(x) = (2/3)(3/2 - x); ``constant`` is U(x) = c.
    """

    kind: str = "lwr"
    coefficients: tuple = ()

    def __post_init__(self):
        if self.kind == "lwr":
            object.__setattr__(self, "coefficients", (1.0, -2.0 / 3.0))
        elif self.kind == "constant":
            c = self.coefficients[0] if self.coefficients else 1.0
            object.__setattr__(self, "coefficients", (float(c),))
        elif self.kind == "custom-polynomial":
            if not self.coefficients:
                raise ModelError("custom-polynomial needs coefficients")
            object.__setattr__(
                self, "coefficients", tuple(float(c) for c in self.coefficients)
            )
        else:
            raise ModelError(f"unknown velocity kind {self.kind!r}")

    @property
    def coeff_array(self) -> np.ndarray:
        return np.asarray(self.coefficients, dtype=np.float64)

    @property
    def deriv_coeff_array(self) -> np.ndarray:
        c = self.coeff_array
        if len(c) == 1:
            return np.zeros(1)
        return c[1:] * np.arange(1, len(c))


def velocity_eval(v: VelocitySpec, w) -> float:
    """U(w) (Horner)."""
    c = v.coefficients
    out = 0.0
    for ck in reversed(c):
        out = out * w + ck
    return out


def velocity_deriv(v: VelocitySpec, w) -> float:
    """U'(w)."""
    c = v.coefficients
    out = 0.0
    for k in range(len(c) - 1, 0, -1):
        out = out * w + k * c[k]
    return out


# --------------------------------------------------------------------------
# obstacle


@dataclass(frozen=True)
class ObstacleSpec:
    """Closed-form obstacle with first and second derivatives.

    ``gauss``: o(x) = offset - depth * exp(-(x - center)^2).
    """

    kind: str
    params: tuple
    name: str = ""

    @staticmethod
    def gauss(center: float = 1.0, offset: float = 1.2, depth: float = 1.0):
        return ObstacleSpec("gauss", (center, offset, depth), name="paper-gauss")

    @staticmethod
    def constant(level: float):
        return ObstacleSpec("constant", (float(level),), name="constant")

    def __call__(self, x):
        if self.kind == "gauss":
            c, off, d = self.params
            return off - d * np.exp(-((x - c) ** 2))
        return self.params[0] * np.ones_like(np.asarray(x, dtype=float)) \
            if np.ndim(x) else self.params[0]

    def deriv(self, x):
        if self.kind == "gauss":
            c, off, d = self.params
            return 2.0 * d * (x - c) * np.exp(-((x - c) ** 2))
        return 0.0 * np.asarray(x, dtype=float) if np.ndim(x) else 0.0

    def deriv2(self, x):
        if self.kind == "gauss":
            c, off, d = self.params
            u = x - c
            return 2.0 * d * (1.0 - 2.0 * u * u) * np.exp(-(u * u))
        return 0.0 * np.asarray(x, dtype=float) if np.ndim(x) else 0.0

    @property
    def o_min(self) -> float:
        if self.kind == "gauss":
            c, off, d = self.params
            return off - d
        return self.params[0]


# --------------------------------------------------------------------------
# penalization


@dataclass(frozen=True)
class Penalization:
    """Velocity relaxation factor V(s) = 1 - exp(-s / epsilon)."""

    epsilon: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ModelError("epsilon must be > 0")


def penalize(p: Penalization, s):
    """V(s); the analytic continuation (negative) is returned for s < 0."""
    return 1.0 - np.exp(-s / p.epsilon)


def penalize_deriv(p: Penalization, s):
    """V'(s) = exp(-s/epsilon)/epsilon > 0."""
    return np.exp(-s / p.epsilon) / p.epsilon


# --------------------------------------------------------------------------
# initial data


def q01(x: float) -> float:
    """Indicator on [-1.5, -1] glued to the ramp -x on (-1, 0]."""
    if -1.5 <= x <= -1.0:
        return 1.0
    if -1.0 < x <= 0.0:
        return -x
    return 0.0


def q02(x: float) -> float:
    """Indicator on [-1.5, -1] (not one-sided Lipschitz from below)."""
    return 1.0 if -1.5 <= x <= -1.0 else 0.0


_INITIAL_PRESETS = {"q01": q01, "q02": q02}


# --------------------------------------------------------------------------
# full model spec


InitialDatum = Union[str, Callable[[float], float], ScalarField]


@dataclass(frozen=True)
class ModelSpec:
    kernel: KernelSpec
    velocity: VelocitySpec
    obstacle: ObstacleSpec
    penalization: Optional[Penalization]
    initial: InitialDatum
    locality: str = "nonlocal"

    def __post_init__(self):
        if self.locality not in ("nonlocal", "local"):
            raise ModelError(f"locality must be 'nonlocal' or 'local', got {self.locality!r}")
        if isinstance(self.initial, str) and self.initial not in _INITIAL_PRESETS:
            raise ModelError(f"unknown initial datum preset {self.initial!r}")

    @property
    def epsilon(self) -> Optional[float]:
        return None if self.penalization is None else self.penalization.epsilon

    def initial_field(self, grid: Grid1D, mode: str = "midpoint") -> ScalarField:
        if isinstance(self.initial, ScalarField):
            if self.initial.grid != grid:
                raise ModelError("initial field lives on a different grid")
            return self.initial
        f = _INITIAL_PRESETS[self.initial] if isinstance(self.initial, str) else self.initial
        return sample_function(grid, f, mode=mode)

    def with_epsilon(self, epsilon: Optional[float]) -> "ModelSpec":
        pen = None if epsilon is None else Penalization(epsilon)
        return ModelSpec(self.kernel, self.velocity, self.obstacle, pen,
                         self.initial, self.locality)


def paper_model(
    epsilon: Optional[float] = 2.0 ** -10,
    initial: str = "q01",
    velocity: str = "lwr",
    locality: str = "nonlocal",
) -> ModelSpec:
    """The stock test model: Gaussian-dip obstacle, exponential kernel."""
    vel = VelocitySpec(kind=velocity) if velocity in ("lwr", "constant") else \
        VelocitySpec(kind="custom-polynomial", coefficients=(1.0,))
    pen = None if epsilon is None else Penalization(epsilon)
    return ModelSpec(
        kernel=KernelSpec("exponential", rate=1.0),
        velocity=vel,
        obstacle=ObstacleSpec.gauss(),
        penalization=pen,
        initial=initial,
        locality=locality,
    )


# --------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationReport:
    """Pass/fail per assumption with the measured quantity behind each."""

    checks: dict = field(default_factory=dict)
    u_min: float = 0.0
    kernel_mass: float = 0.0
    o_min: float = 0.0
    o_sup: float = 0.0
    tv_q0: float = 0.0
    d_o: float = 0.0

    @property
    def ok(self) -> bool:
        return all(passed for passed, _ in self.checks.values())

    def summary_lines(self):
        for name, (passed, measured) in self.checks.items():
            yield f"({name}) {'pass' if passed else 'FAIL'}  {measured}"


def validate(spec: ModelSpec, grid: Grid1D, audit_factor: int = 10) -> ValidationReport:
    """Check the model data assumptions on the grid plus a finer audit mesh.

    Checks: (U) velocity decreasing and positive on the achievable range,
    (K) kernel nonnegative/nonincreasing with unit mass, (O) obstacle
    positive and bounded, (I) initial datum nonnegative with finite TV,
    (D) strictly positive feasibility margin min(o - q0).
    """
    checks = {}
    audit = np.linspace(grid.x_left, grid.x_right, grid.n_cells * audit_factor + 1)

    # (O) obstacle
    o_vals = spec.obstacle(audit)
    o_min = float(np.min(o_vals))
    o_sup = float(np.max(o_vals))
    o_ok = (
        o_min > 0
        and np.all(np.isfinite(o_vals))
        and np.all(np.isfinite(spec.obstacle.deriv(audit)))
        and np.all(np.isfinite(spec.obstacle.deriv2(audit)))
    )
    checks["O"] = (bool(o_ok), f"o_min={o_min:.6g}")

    # (U) velocity: U' <= 0 on J, U >= U_min > 0 on the achievable range
    # [0, sup o] (the solver clamps its argument into that interval).
    jlo, jhi = -o_sup - 1.0, o_sup + 1.0
    wj = np.linspace(jlo, jhi, 4001)
    du = np.array([velocity_deriv(spec.velocity, w) for w in wj])
    wr = np.linspace(0.0, o_sup, 2001)
    uvals = np.array([velocity_eval(spec.velocity, w) for w in wr])
    u_min = float(np.min(uvals))
    u_ok = bool(np.all(du <= 1e-14) and u_min > 0)
    checks["U"] = (u_ok, f"U_min={u_min:.6g} on [0,{o_sup:.4g}]")

    # (K) kernel
    if spec.kernel.kind == "exponential":
        k_mass = 1.0
        k_ok = True
    else:
        k_mass = spec.kernel.mass()
        tab = spec.kernel.table
        k_ok = bool(
            np.all(tab >= 0) and np.all(np.diff(tab) <= 1e-14)
            and abs(k_mass - 1.0) <= 1e-8
        )
    checks["K"] = (bool(k_ok), f"kernel mass={k_mass:.12g}")

    # (I) initial datum
    q0 = spec.initial_field(grid)
    tv_q0 = total_variation(q0)
    i_ok = bool(np.min(q0.values) >= 0 and np.isfinite(tv_q0))
    checks["I"] = (i_ok, f"TV(q0)={tv_q0:.6g}, min q0={np.min(q0.values):.6g}")

    # (D) feasibility margin, measured on grid centers and the audit mesh
    if isinstance(spec.initial, ScalarField):
        d_o = float(np.min(spec.obstacle(grid.centers) - q0.values))
    else:
        f = _INITIAL_PRESETS[spec.initial] if isinstance(spec.initial, str) else spec.initial
        q0_audit = np.array([f(x) for x in audit])
        d_o = float(np.min(spec.obstacle(audit) - q0_audit))
    checks["D"] = (d_o > 0, f"d_o={d_o:.6g}")

    return ValidationReport(
        checks=checks,
        u_min=u_min,
        kernel_mass=k_mass,
        o_min=o_min,
        o_sup=o_sup,
        tv_q0=tv_q0,
        d_o=d_o,
    )
