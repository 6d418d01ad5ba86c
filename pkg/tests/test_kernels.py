"""Numerical kernels: Horner, tridiagonal solve, Godunov flux, fused sweep."""

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from obstaflow import kernels
from obstaflow.fields import Grid1D
from obstaflow.hyperbolic import SolverConfig, run
from obstaflow.model import paper_model

LWR_C = np.array([1.0, -2.0 / 3.0])
LWR_DC = np.array([-2.0 / 3.0])
WMAX = 2.2


def _flux(s, o, w, eps):
    """Reference flux in nonlocal mode, straight from the definition."""
    u = 1.0 - (2.0 / 3.0) * np.clip(w, 0.0, WMAX)
    return (1.0 - np.exp(-(o - s) / eps)) * s * u


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=1, max_size=6), st.floats(-2, 2))
def test_poly_eval_matches_polyval(coeffs, x):
    c = np.asarray(coeffs)
    assert kernels.poly_eval(c, x) == pytest.approx(
        np.polyval(c[::-1], x), rel=1e-12, abs=1e-12
    )


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2**32 - 1))
def test_thomas_matches_dense_solve(n, seed):
    """Thomas algorithm agrees with a dense solve on dominant tridiagonals."""
    rng = np.random.default_rng(seed)
    lower = rng.uniform(-1, 1, n)
    upper = rng.uniform(-1, 1, n)
    diag = 3.0 + rng.uniform(0, 1, n)  # strictly diagonally dominant
    rhs = rng.uniform(-5, 5, n)
    A = np.diag(diag) + np.diag(upper[:-1], 1) + np.diag(lower[1:], -1)
    out = np.empty(n)
    kernels.thomas_solve(lower, diag, upper, rhs, out, np.empty(n))
    assert np.allclose(out, np.linalg.solve(A, rhs), rtol=1e-12, atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(
    o=st.floats(0.2, 1.2),
    eps=st.floats(2.0 ** -8, 1.0),
    frac=st.floats(0.0, 1.0),
)
def test_contact_argmax_solves_critical_equation(o, eps, frac):
    """The returned point satisfies s + eps*log1p(s/eps) = o to high accuracy."""
    s = kernels._contact_argmax(0.0, o, o, eps, 1.0 / eps, 1e-12)
    g = s + eps * np.log1p(s / eps) - o
    assert abs(g) <= 1e-9
    assert 0.0 <= s <= o


@settings(max_examples=150, deadline=None)
@given(
    ql_frac=st.floats(0.0, 1.0),
    qr_frac=st.floats(0.0, 1.0),
    o=st.floats(0.25, 1.2),
    w=st.floats(0.0, 1.2),
    eps=st.floats(2.0 ** -8, 1.0),
)
def test_godunov_flux_brute_force(ql_frac, qr_frac, o, w, eps):
    """Interface flux equals the brute-force extremum of f between the states.

    States respect the interface precondition q <= o + margin; far above the
    ceiling the flux grows like exp((q-o)/eps) and an absolute tolerance
    degenerates to roundoff noise.
    """
    hi = min(1.1, o + 0.05)
    ql, qr = ql_frac * hi, qr_frac * hi
    got = kernels.godunov_flux(ql, qr, o, w, eps, LWR_C, LWR_DC, WMAX,
                               False, 1e-10)
    lo, hi = min(ql, qr), max(ql, qr)
    s = np.linspace(lo, hi, max(int((hi - lo) / 1e-4) + 2, 2))
    f = _flux(s, o, w, eps)
    want = f.min() if ql <= qr else f.max()
    assert got == pytest.approx(want, abs=1e-6)


def test_godunov_flux_local_mode_concave():
    """Local LWR-type flux: the classic Godunov min/max with sonic point."""
    eps = 0.5
    o = 1.2
    for ql, qr in [(0.9, 0.1), (0.1, 0.9), (0.6, 0.6)]:
        got = kernels.godunov_flux(ql, qr, o, 0.0, eps, LWR_C, LWR_DC, WMAX,
                                   True, 1e-10)
        lo, hi = min(ql, qr), max(ql, qr)
        s = np.linspace(lo, hi, 4001)
        u = 1.0 - (2.0 / 3.0) * np.clip(s, 0.0, WMAX)
        f = (1.0 - np.exp(-(o - s) / eps)) * s * u
        want = f.min() if ql <= qr else f.max()
        assert got == pytest.approx(want, abs=1e-6)


@pytest.fixture(scope="module")
def contact_state():
    """An evolved state in obstacle contact (eps = 2^-6, t = 1.2)."""
    grid = Grid1D(-3.0, 4.0, 700)
    spec = paper_model(epsilon=2.0 ** -6)
    res = run(spec, grid, SolverConfig(t_final=1.2, snapshot_times=(1.2,)))
    return grid, spec, res.snapshot_at(1.2)


def test_fused_sweep_matches_generic(contact_state):
    """The fused flux+speed pass reproduces the per-face godunov_flux values."""
    grid, spec, state = contact_state
    eps = spec.epsilon
    q = state.values
    n = grid.n_cells
    o_face = spec.obstacle(grid.faces)
    from obstaflow.nonlocal_op import build_weights, eval_nonlocal_fast

    w = eval_nonlocal_fast(state, build_weights(spec.kernel, grid)).values
    w_face = np.concatenate([w, [q[-1]]])
    phi0 = 1.0 - np.exp(-o_face / eps)
    f_fused = np.empty(n + 1)
    L = kernels.fused_godunov_sweep(q, o_face, w_face, phi0, eps, LWR_C,
                                    WMAX, 1e-10, f_fused)
    f_ref = np.empty(n + 1)
    kernels.godunov_flux_sweep(q, o_face, w_face, eps, LWR_C, LWR_DC, WMAX,
                               False, 1e-10, f_ref)
    assert np.max(np.abs(f_fused - f_ref)) <= 1e-11
    L_ref = kernels.max_face_speed(q, o_face, w_face, eps, LWR_C, LWR_DC,
                                   WMAX, False, 1.0, 2.0 / 3.0)
    assert L == pytest.approx(L_ref, rel=1e-12)


def test_speed_bound_dominates_sampled_derivative(contact_state):
    """L from the CFL bound majorizes |df/ds| sampled on each face interval."""
    grid, spec, state = contact_state
    eps = spec.epsilon
    q = state.values
    o_face = spec.obstacle(grid.faces)
    w_face = np.full(grid.n_cells + 1, 0.3)
    L = kernels.max_face_speed(q, o_face, w_face, eps, LWR_C, LWR_DC, WMAX,
                               False, 1.0, 2.0 / 3.0)
    worst = 0.0
    for j in range(0, grid.n_cells + 1, 7):
        ql = q[j - 1] if j > 0 else q[0]
        qr = q[j] if j < grid.n_cells else q[-1]
        s = np.linspace(0.0, max(ql, qr), 50)
        for sv in s:
            d = kernels.flux_dq(sv, o_face[j], w_face[j], eps, LWR_C, LWR_DC,
                                WMAX, False)
            worst = max(worst, abs(d))
    assert L >= worst - 1e-12


def test_upwind_equals_godunov_for_monotone_flux():
    """With eps <= 0 (no penalization) and U >= 0 the flux is increasing."""
    rng = np.random.default_rng(3)
    q = rng.uniform(0.0, 1.0, 64)
    o_face = np.full(65, 1.2)
    w_face = np.full(65, 0.4)
    a = np.empty(65)
    b = np.empty(65)
    kernels.upwind_flux_sweep(q, o_face, w_face, -1.0, LWR_C, WMAX, False, a)
    kernels.godunov_flux_sweep(q, o_face, w_face, -1.0, LWR_C, LWR_DC, WMAX,
                               False, 1e-10, b)
    assert np.allclose(a, b, atol=1e-14)


@pytest.mark.slow
def test_fallback_backend_bitwise_equivalent(tmp_path):
    """The pure-numpy fallback reproduces the numba run exactly."""
    grid = Grid1D(-3.0, 4.0, 200)
    spec = paper_model(epsilon=2.0 ** -5)
    config = SolverConfig(t_final=0.3, snapshot_times=(0.3,))
    here = run(spec, grid, config).snapshot_at(0.3).values

    out = tmp_path / "fallback.npy"
    child = (
        "import numpy as np\n"
        "from obstaflow import NUMBA_ENABLED\n"
        "assert not NUMBA_ENABLED\n"
        "from obstaflow.fields import Grid1D\n"
        "from obstaflow.model import paper_model\n"
        "from obstaflow.hyperbolic import SolverConfig, run\n"
        "g = Grid1D(-3.0, 4.0, 200)\n"
        "r = run(paper_model(epsilon=2.0**-5), g,\n"
        "        SolverConfig(t_final=0.3, snapshot_times=(0.3,)))\n"
        f"np.save({str(out)!r}, r.snapshot_at(0.3).values)\n"
    )
    env = dict(os.environ, OBSTAFLOW_DISABLE_NUMBA="1")
    subprocess.run([sys.executable, "-c", child], env=env, check=True,
                   capture_output=True)
    there = np.load(out)
    assert np.array_equal(here, there)
