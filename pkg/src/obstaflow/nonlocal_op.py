"""Discrete downstream-average operator W[q](x) = int_x^inf gamma(y-x) q(y) dy.

Kernel cell masses are exact integrals of gamma over cells, so the discrete
operator is a convex combination (weights sum to 1 with the tail).  The
exponential kernel additionally has an O(n) right-to-left recurrence that the
solvers use on every step; the O(n*K) direct sum is kept as the reference
path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .fields import Grid1D, ScalarField
from .model import KernelSpec, ModelError

__all__ = ["KernelWeights", "build_weights", "eval_nonlocal", "eval_nonlocal_fast"]


@dataclass(frozen=True)
class KernelWeights:
    """Cell masses gamma_k = int_{k dx}^{(k+1) dx} gamma, plus the tail."""

    gamma_k: np.ndarray
    tail_mass: float
    dx: float
    rate: float = 0.0  # > 0 iff the exponential fast path applies

    def __post_init__(self):
        gk = np.ascontiguousarray(self.gamma_k, dtype=np.float64)
        gk.flags.writeable = False
        object.__setattr__(self, "gamma_k", gk)

    @property
    def cutoff(self) -> int:
        return len(self.gamma_k)

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.gamma_k) + self.tail_mass)


def build_weights(kernel: KernelSpec, grid: Grid1D, mass_tol: float = 1e-12) -> KernelWeights:
    """Precompute kernel cell masses with tail mass <= mass_tol.

    The cutoff K is minimal; K > 10 * n_cells is rejected (the kernel decays
    too slowly for the computational window).
    """
    dx = grid.dx
    if kernel.kind == "exponential":
        r = kernel.rate
        K = int(np.ceil(-np.log(mass_tol) / (r * dx)))
        if K > 10 * grid.n_cells:
            raise ModelError(
                f"kernel cutoff K={K} exceeds 10*n_cells={10 * grid.n_cells}; "
                "kernel decays too slowly for this window"
            )
        k = np.arange(K)
        gamma_k = np.exp(-r * k * dx) * (1.0 - np.exp(-r * dx))
        tail = float(np.exp(-r * K * dx))
        return KernelWeights(gamma_k, tail, dx, rate=r)

    # tabulated: cumulative trapezoid on the table, interpolated at cell edges
    tab = kernel.table
    h = kernel.spacing
    xs = np.arange(len(tab)) * h
    cum = np.concatenate(([0.0], np.cumsum((tab[1:] + tab[:-1]) * 0.5 * h)))
    table_extent = xs[-1]
    K = int(np.ceil(table_extent / dx))
    if K > 10 * grid.n_cells:
        raise ModelError(
            f"kernel cutoff K={K} exceeds 10*n_cells={10 * grid.n_cells}"
        )
    edges = np.arange(K + 1) * dx
    cum_at_edges = np.interp(edges, xs, cum)
    gamma_k = np.diff(cum_at_edges)
    tail = float(kernel.tail_mass + cum[-1] - cum_at_edges[-1])
    w = KernelWeights(gamma_k, tail, dx, rate=0.0)
    if abs(w.total_mass - 1.0) > 1e-8:
        raise ModelError(f"kernel mass {w.total_mass} deviates from 1 beyond 1e-8")
    return w


def _extension_value(q: np.ndarray, extension: str) -> float:
    if extension == "constant":
        return float(q[-1])
    if extension == "zero":
        return 0.0
    raise ModelError(f"unknown extension policy {extension!r}")


def eval_nonlocal(q: ScalarField, w: KernelWeights, extension: str = "constant") -> ScalarField:
    """Direct-sum evaluation of W from cell averages."""
    if abs(w.dx - q.grid.dx) > 1e-14 * abs(q.grid.dx):
        raise ModelError("weights were built for a different grid spacing")
    ext = _extension_value(q.values, extension)
    out = np.empty(q.grid.n_cells)
    kernels.nonlocal_direct(q.values, w.gamma_k, w.tail_mass, ext, out)
    return ScalarField(q.grid, out)


def eval_nonlocal_fast(q: ScalarField, w: KernelWeights, extension: str = "constant") -> ScalarField:
    """O(n) recurrence; exponential kernels only."""
    if w.rate <= 0:
        raise ModelError("fast path requires an exponential kernel")
    ext = _extension_value(q.values, extension)
    dx = q.grid.dx
    decay = float(np.exp(-w.rate * dx))
    g0 = 1.0 - decay
    out = np.empty(q.grid.n_cells)
    kernels.nonlocal_exp(q.values, decay, g0, ext, out)
    return ScalarField(q.grid, out)
