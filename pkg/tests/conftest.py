"""Shared fixtures.

The heavy simulation fixtures are session-scoped and lazily built: unit test
modules use the small grids only, while the acceptance suite reuses one
five-member eps sweep, one stiff conservation run and one viscosity sweep
across all of its criteria.
"""

import numpy as np
import pytest

from obstaflow.fields import Grid1D
from obstaflow.hyperbolic import SolverConfig, run
from obstaflow.model import paper_model
from obstaflow.viscous import ViscousConfig
from obstaflow.experiments import eps_sweep, nu_sweep

EPS_LIST = (2.0 ** -6, 2.0 ** -7, 2.0 ** -8, 2.0 ** -9, 2.0 ** -10)
NU_LIST = (1e-2, 1e-3, 1e-4)
DESK_N = 3500  # dx = 1/500 on [-3, 4]


@pytest.fixture(scope="session")
def desk_grid():
    return Grid1D(-3.0, 4.0, DESK_N)


@pytest.fixture(scope="session")
def small_grid():
    return Grid1D(-3.0, 4.0, 700)


@pytest.fixture(scope="session")
def sweep_t45(desk_grid):
    """Five-eps sweep to T=4.5 with the figure snapshot times (minutes)."""
    config = SolverConfig(t_final=4.5, snapshot_times=(1.5, 2.25, 4.5))
    return eps_sweep(paper_model(), desk_grid, config, EPS_LIST)


@pytest.fixture(scope="session")
def conservation_run(desk_grid):
    """The stiff eps=2^-10 run to T=1.5, timed."""
    return run(paper_model(epsilon=2.0 ** -10), desk_grid,
               SolverConfig(t_final=1.5, snapshot_times=(1.5,)))


@pytest.fixture(scope="session")
def nu_sweep_desk(desk_grid):
    """Viscous nu sweep at eps=2^-6 against the hyperbolic reference."""
    vconf = ViscousConfig(nu=1e-2, t_final=1.5, snapshot_times=(1.5,))
    return nu_sweep(paper_model(epsilon=2.0 ** -6), desk_grid, vconf, NU_LIST)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
