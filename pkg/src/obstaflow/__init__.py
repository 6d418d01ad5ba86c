"""Finite-volume tools for the obstacle-penalized nonlocal conservation law.

    dq/dt + d/dx ( V_eps(o - q) * q * U(W[q]) ) = 0

with the local variant (U argument = q), the unpenalized law, a viscous
reference solver, diagnostics for the scheme's guarantees (mass, clearance,
BV, one-sided Lipschitz slopes, coincidence-set flux constancy), parameter
sweeps and a CLI.

Hot kernels are numba-compiled; set OBSTAFLOW_DISABLE_NUMBA=1 before import
to run the pure-Python fallback.
"""

from ._accel import NUMBA_ENABLED, backend_name
from .fields import (
    FieldError,
    Grid1D,
    ScalarField,
    l1_distance,
    norm_l1,
    norm_linf,
    sample_function,
    total_variation,
)
from .model import (
    KernelSpec,
    ModelError,
    ModelSpec,
    ObstacleSpec,
    Penalization,
    VelocitySpec,
    paper_model,
    validate,
)
from .nonlocal_op import KernelWeights, build_weights, eval_nonlocal, eval_nonlocal_fast
from .hyperbolic import RunResult, SolverConfig, SolverError, run, step
from .viscous import ViscousConfig, mollify, viscous_run, viscous_step
from .diagnostics import CoincidenceReport, DiagnosticsSeries, coincidence
from .experiments import (
    ComparisonResult,
    OslSurface,
    SweepResult,
    eps_sweep,
    model_comparison,
    nu_sweep,
    osl_surface,
)

__version__ = "1.0.0"

__all__ = [
    "NUMBA_ENABLED",
    "backend_name",
    "FieldError",
    "Grid1D",
    "ScalarField",
    "l1_distance",
    "norm_l1",
    "norm_linf",
    "sample_function",
    "total_variation",
    "KernelSpec",
    "ModelError",
    "ModelSpec",
    "ObstacleSpec",
    "Penalization",
    "VelocitySpec",
    "paper_model",
    "validate",
    "KernelWeights",
    "build_weights",
    "eval_nonlocal",
    "eval_nonlocal_fast",
    "RunResult",
    "SolverConfig",
    "SolverError",
    "run",
    "step",
    "ViscousConfig",
    "mollify",
    "viscous_run",
    "viscous_step",
    "CoincidenceReport",
    "DiagnosticsSeries",
    "coincidence",
    "ComparisonResult",
    "OslSurface",
    "SweepResult",
    "eps_sweep",
    "model_comparison",
    "nu_sweep",
    "osl_surface",
    "__version__",
]
