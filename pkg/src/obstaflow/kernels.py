"""Hot numeric kernels: nonlocal recurrence, Godunov fluxes, time stepping.

All functions here take plain scalars/ndarrays so they compile under numba's
``@njit`` (see :mod:`obstaflow._accel`).  With ``OBSTAFLOW_DISABLE_NUMBA=1``
the same code runs as plain Python.

Conventions:
  * velocity U is a polynomial with ascending coefficients ``c``; its
    derivative coefficients are ``dc``; the argument is clamped to
    ``[0, wmax]`` before evaluation (derivative 0 outside).
  * ``eps <= 0`` encodes "no penalization" (V identically 1).
  * faces are indexed j = 0..n; face j sits between cells j-1 and j, with
    Neumann ghost cells copying the edge values.
"""

import numpy as np

from ._accel import maybe_njit

# exp(-x) below this threshold is treated as 0 (double precision noise)
_EXP_CUT = 45.0


@maybe_njit
def poly_eval(c, x):
    out = 0.0
    for k in range(len(c) - 1, -1, -1):
        out = out * x + c[k]
    return out


@maybe_njit
def flux_scalar(s, o, w, eps, c, wmax, local):
    """f(s) = V_eps(o - s) * s * U(arg), arg = s (local) or w (nonlocal)."""
    wa = s if local else w
    if wa < 0.0:
        wa = 0.0
    elif wa > wmax:
        wa = wmax
    u = poly_eval(c, wa)
    if eps > 0.0:
        a = (o - s) / eps
        e = 0.0 if a > _EXP_CUT else np.exp(-a)
        v = 1.0 - e
    else:
        v = 1.0
    return v * s * u


@maybe_njit
def flux_dq(s, o, w, eps, c, dc, wmax, local):
    """d f / d s at fixed o (and fixed w in nonlocal mode)."""
    wa = s if local else w
    wc = wa
    if wc < 0.0:
        wc = 0.0
    elif wc > wmax:
        wc = wmax
    u = poly_eval(c, wc)
    if eps > 0.0:
        a = (o - s) / eps
        e = 0.0 if a > _EXP_CUT else np.exp(-a)
        v = 1.0 - e
        vp = e / eps
    else:
        v = 1.0
        vp = 0.0
    df = u * (v - s * vp)
    if local and 0.0 < s < wmax:
        df += v * s * poly_eval(dc, s)
    return df


@maybe_njit
def _bisect_dflux(a, b, da, o, w, eps, c, dc, wmax, local, tol):
    """Root of flux_dq on [a, b] given flux_dq(a) = da with a sign change."""
    fa = da
    for _ in range(200):
        m = 0.5 * (a + b)
        fm = flux_dq(m, o, w, eps, c, dc, wmax, local)
        if fa * fm <= 0.0:
            b = m
        else:
            a = m
            fa = fm
        if b - a <= tol:
            break
    return 0.5 * (a + b)


@maybe_njit
def godunov_flux(ql, qr, o, w, eps, c, dc, wmax, local, tol):
    """Godunov interface flux: min of f on [ql, qr] if ql <= qr, else max.

    In nonlocal mode with penalization, d f/d s = U(w) * phi(s) with phi
    strictly decreasing, so f is unimodal: the minimum sits at an endpoint
    and the maximum needs at most one bracketed bisection.  The general
    (local / custom) case pre-scans the derivative on 16 subintervals.
    """
    if ql == qr:
        return flux_scalar(ql, o, w, eps, c, wmax, local)
    want_min = ql < qr
    lo = ql if want_min else qr
    hi = qr if want_min else ql
    f_lo = flux_scalar(lo, o, w, eps, c, wmax, local)
    f_hi = flux_scalar(hi, o, w, eps, c, wmax, local)
    if want_min:
        best = f_lo if f_lo < f_hi else f_hi
    else:
        best = f_lo if f_lo > f_hi else f_hi

    if not local:
        if eps <= 0.0:
            return best  # f linear in s
        if want_min:
            return best  # unimodal: min at an endpoint
        dlo = flux_dq(lo, o, w, eps, c, dc, wmax, local)
        dhi = flux_dq(hi, o, w, eps, c, dc, wmax, local)
        if dlo > 0.0 and dhi < 0.0:
            s = _bisect_dflux(lo, hi, dlo, o, w, eps, c, dc, wmax, local, tol)
            fs = flux_scalar(s, o, w, eps, c, wmax, local)
            if fs > best:
                best = fs
        return best

    # general path: derivative pre-scan + bisection per sign change
    nseg = 16
    h = (hi - lo) / nseg
    sprev = lo
    dprev = flux_dq(lo, o, w, eps, c, dc, wmax, local)
    for j in range(1, nseg + 1):
        s = lo + h * j
        d = flux_dq(s, o, w, eps, c, dc, wmax, local)
        if dprev == 0.0 or dprev * d < 0.0:
            r = _bisect_dflux(sprev, s, dprev, o, w, eps, c, dc, wmax, local, tol)
            fr = flux_scalar(r, o, w, eps, c, wmax, local)
            if want_min:
                if fr < best:
                    best = fr
            else:
                if fr > best:
                    best = fr
        sprev = s
        dprev = d
    return best


@maybe_njit
def _contact_argmax(lo, hi, o, eps, inv_eps, tol):
    """Critical point of the penalized flux on [lo, hi] in nonlocal mode.

    f'(s) = 0 reduces to g(s) = s + eps*log1p(s/eps) - o = 0 with g strictly
    increasing, solved by safeguarded Newton (bracket maintained).
    """
    a = lo
    b = hi
    s = 0.5 * (a + b)
    for _ in range(80):
        g = s + eps * np.log1p(s * inv_eps) - o
        if g < 0.0:
            a = s
        else:
            b = s
        dg = 1.0 + 1.0 / (1.0 + s * inv_eps)
        s2 = s - g / dg
        if s2 <= a or s2 >= b:
            s2 = 0.5 * (a + b)
        if abs(s2 - s) <= tol:
            return s2
        s = s2
    return s


@maybe_njit
def fused_godunov_sweep(q, o_face, w_face, phi0_face, eps, c, wmax, tol, out):
    """Nonlocal-mode Godunov fluxes plus the CFL speed bound in one pass.

    Shares the per-face exponentials between the flux and the speed bound;
    ``phi0_face`` holds the precomputed 1 - exp(-o/eps) values.  Returns L,
    the max over faces of sup |df/ds| on [0, max(ql, qr)].
    """
    n = len(q)
    inv_eps = 0.0 if eps <= 0.0 else 1.0 / eps
    L = 0.0
    for j in range(n + 1):
        ql = q[j - 1] if j > 0 else q[0]
        qr = q[j] if j < n else q[n - 1]
        wa = w_face[j]
        if wa < 0.0:
            wa = 0.0
        elif wa > wmax:
            wa = wmax
        u = poly_eval(c, wa)
        if eps <= 0.0:
            out[j] = ql * u  # f = s*u is increasing: Godunov = upwind
            if u > L:
                L = u
            continue
        o = o_face[j]
        a_l = (o - ql) * inv_eps
        e_l = 0.0 if a_l > _EXP_CUT else np.exp(-a_l)
        f_l = (1.0 - e_l) * ql * u
        if ql == qr:
            F = f_l
            e_m = e_l
            qm = ql
        else:
            a_r = (o - qr) * inv_eps
            e_r = 0.0 if a_r > _EXP_CUT else np.exp(-a_r)
            f_r = (1.0 - e_r) * qr * u
            if ql < qr:
                # f unimodal (concave bump): min sits at an endpoint
                F = f_l if f_l < f_r else f_r
                e_m = e_r
                qm = qr
            else:
                F = f_l if f_l > f_r else f_r
                e_m = e_l
                qm = ql
                d_l = (1.0 - e_l) - ql * e_l * inv_eps
                d_r = (1.0 - e_r) - qr * e_r * inv_eps
                if d_r > 0.0 and d_l < 0.0:
                    s = _contact_argmax(qr, ql, o, eps, inv_eps, tol)
                    a_s = (o - s) * inv_eps
                    e_s = 0.0 if a_s > _EXP_CUT else np.exp(-a_s)
                    f_s = (1.0 - e_s) * s * u
                    if f_s > F:
                        F = f_s
        out[j] = F
        phiq = (1.0 - e_m) - qm * e_m * inv_eps
        if phiq < 0.0:
            phiq = -phiq
        phi0 = phi0_face[j]
        Li = u * (phi0 if phi0 > phiq else phiq)
        if Li > L:
            L = Li
    return L


@maybe_njit
def nonlocal_exp(q, decay, g0, ext_value, out):
    """O(n) right-to-left recurrence for the exponential kernel.

    W_i = g0 * q_i + decay * W_{i+1}, seeded with the extension value
    (constant continuation carries the full remaining kernel mass).
    """
    n = len(q)
    wn = ext_value
    for i in range(n - 1, -1, -1):
        wn = g0 * q[i] + decay * wn
        out[i] = wn
    return out


@maybe_njit
def nonlocal_direct(q, gk, tail_mass, ext_value, out):
    """O(n*K) direct sum with the precomputed kernel cell masses."""
    n = len(q)
    K = len(gk)
    for i in range(n):
        acc = tail_mass * ext_value
        for k in range(K):
            j = i + k
            acc += gk[k] * (q[j] if j < n else ext_value)
        out[i] = acc
    return out


@maybe_njit
def max_face_speed(q, o_face, w_face, eps, c, dc, wmax, local, u_cap, du_cap):
    """Upper bound on max |df/ds| over all faces and s in [0, max(ql, qr)].

    For eps > 0, phi(s) = V(o-s) - s V'(o-s) is strictly decreasing, so its
    extreme values on [0, qm] sit at the endpoints.  ``u_cap``/``du_cap``
    bound U and |U'| on [0, wmax] (used in local mode).
    """
    n = len(q)
    L = 0.0
    for j in range(n + 1):
        ql = q[j - 1] if j > 0 else q[0]
        qr = q[j] if j < n else q[n - 1]
        qm = ql if ql > qr else qr
        o = o_face[j]
        if eps > 0.0:
            a0 = o / eps
            phi0 = 1.0 - (0.0 if a0 > _EXP_CUT else np.exp(-a0))
            aq = (o - qm) / eps
            e = 0.0 if aq > _EXP_CUT else np.exp(-aq)
            phiq = (1.0 - e) - qm * e / eps
            m = phi0 if phi0 > -phiq else -phiq
            if m < 0.0:
                m = -m
        else:
            m = 1.0
        if local:
            Li = u_cap * m + qm * du_cap
        else:
            wa = w_face[j]
            if wa < 0.0:
                wa = 0.0
            elif wa > wmax:
                wa = wmax
            Li = poly_eval(c, wa) * m
        if Li > L:
            L = Li
    return L


@maybe_njit
def upwind_flux_sweep(q, o_face, w_face, eps, c, wmax, local, out):
    """First-order upwind flux (velocity >= 0): F_j = f(q_{j-1})."""
    n = len(q)
    for j in range(n + 1):
        ql = q[j - 1] if j > 0 else q[0]
        out[j] = flux_scalar(ql, o_face[j], w_face[j], eps, c, wmax, local)
    return out


@maybe_njit
def godunov_flux_sweep(q, o_face, w_face, eps, c, dc, wmax, local, tol, out):
    n = len(q)
    for j in range(n + 1):
        ql = q[j - 1] if j > 0 else q[0]
        qr = q[j] if j < n else q[n - 1]
        out[j] = godunov_flux(ql, qr, o_face[j], w_face[j], eps, c, dc,
                              wmax, local, tol)
    return out


@maybe_njit
def thomas_solve(lower, diag, upper, rhs, out, scratch):
    """Tridiagonal solve (Thomas algorithm); returns out."""
    n = len(diag)
    scratch[0] = upper[0] / diag[0]
    out[0] = rhs[0] / diag[0]
    for i in range(1, n):
        denom = diag[i] - lower[i] * scratch[i - 1]
        scratch[i] = upper[i] / denom
        out[i] = (rhs[i] - lower[i] * out[i - 1]) / denom
    for i in range(n - 2, -1, -1):
        out[i] -= scratch[i] * out[i + 1]
    return out


# status codes for advance() / viscous_advance()
OK = 0
CAP_FULL = 1
DT_UNDERFLOW = 2
NAN_STATE = 3
PICARD_FAIL = 4
RESIDUAL_FAIL = 5


@maybe_njit
def advance(q, o_cells, o_face, t0, eps, c, dc, wmax, local, ext_zero,
            decay, g0, use_exp, gk, tail_mass, cfl, dx, tol, t_end,
            u_cap, du_cap, diag, n0, w_buf, wf_buf, f_buf):
    """Advance the explicit Godunov scheme in place from t0 to t_end.

    Records one diagnostics column per step into ``diag`` (rows: t, mass,
    tv, min clearance, min forward slope of q, max forward slope of
    V_eps(o - q), min q) starting at column ``n0``.  Returns
    (status, steps_done, t_reached).
    """
    n = len(q)
    t = t0
    col = n0
    cap = diag.shape[1]
    steps = 0
    phi0_face = np.empty(n + 1)
    for j in range(n + 1):
        if eps > 0.0:
            a0 = o_face[j] / eps
            phi0_face[j] = 1.0 - (0.0 if a0 > _EXP_CUT else np.exp(-a0))
        else:
            phi0_face[j] = 1.0
    while t < t_end - 1e-14:
        if col >= cap:
            return CAP_FULL, steps, t
        ext = 0.0 if ext_zero else q[n - 1]
        if not local:
            if use_exp:
                nonlocal_exp(q, decay, g0, ext, w_buf)
            else:
                nonlocal_direct(q, gk, tail_mass, ext, w_buf)
            for j in range(n):
                wf_buf[j] = w_buf[j]
            wf_buf[n] = ext
            L = fused_godunov_sweep(q, o_face, wf_buf, phi0_face, eps, c,
                                    wmax, tol, f_buf)
        else:
            L = max_face_speed(q, o_face, wf_buf, eps, c, dc, wmax, local,
                               u_cap, du_cap)
        dt = cfl * dx if L <= 0.0 else cfl * dx / L
        if t + dt > t_end:
            dt = t_end - t
        if dt < 1e-14:
            return DT_UNDERFLOW, steps, t
        if local:
            godunov_flux_sweep(q, o_face, wf_buf, eps, c, dc, wmax, local,
                               tol, f_buf)
        dtdx = dt / dx
        mass = 0.0
        tv = 0.0
        min_clear = 1e300
        osl_q = 1e300
        osl_v = -1e300
        min_q = 1e300
        q_prev = 0.0
        v_prev = 0.0
        for i in range(n):
            qi = q[i] - dtdx * (f_buf[i + 1] - f_buf[i])
            if not np.isfinite(qi):
                return NAN_STATE, steps, t
            q[i] = qi
            mass += qi
            clear = o_cells[i] - qi
            if clear < min_clear:
                min_clear = clear
            if qi < min_q:
                min_q = qi
            if eps > 0.0:
                a = clear / eps
                vi = 1.0 - (0.0 if a > _EXP_CUT else np.exp(-a))
            else:
                vi = 1.0
            if i > 0:
                d = qi - q_prev
                tv += d if d > 0.0 else -d
                slope = d / dx
                if slope < osl_q:
                    osl_q = slope
                sv = (vi - v_prev) / dx
                if sv > osl_v:
                    osl_v = sv
            q_prev = qi
            v_prev = vi
        t += dt
        diag[0, col] = t
        diag[1, col] = mass * dx
        diag[2, col] = tv
        diag[3, col] = min_clear
        diag[4, col] = osl_q
        diag[5, col] = osl_v
        diag[6, col] = min_q
        col += 1
        steps += 1
    return OK, steps, t


@maybe_njit
def viscous_advance(q, o_cells, o_face, o2_cells, t0, eps, c, dc, wmax, local,
                    ext_zero, decay, g0, use_exp, gk, tail_mass, cfl, dx, tol,
                    t_end, u_cap, du_cap, nu, picard_tol, picard_max,
                    diag, n0):
    """Semi-implicit viscous stepping from t0 to t_end, in place.

    Per step: explicit Godunov flux of the pre-step state with the nonlocal
    argument Picard-iterated (W is refreshed from the current iterate),
    implicit diffusion (I - nu*dt*D2) q = rhs by tridiagonal solve, source
    term -nu*dt*o2_cells.  Diagnostics layout matches advance().
    Returns (status, steps_done, t_reached, max_picard_iterations).
    """
    n = len(q)
    t = t0
    col = n0
    cap = diag.shape[1]
    steps = 0
    pic_max_seen = 0
    w_buf = np.empty(n)
    wf_buf = np.zeros(n + 1)
    f_buf = np.empty(n + 1)
    rhs = np.empty(n)
    qk = np.empty(n)
    qk1 = np.empty(n)
    low = np.empty(n)
    dg = np.empty(n)
    up = np.empty(n)
    scr = np.empty(n)
    while t < t_end - 1e-14:
        if col >= cap:
            return CAP_FULL, steps, t, pic_max_seen
        ext = 0.0 if ext_zero else q[n - 1]
        if not local:
            if use_exp:
                nonlocal_exp(q, decay, g0, ext, w_buf)
            else:
                nonlocal_direct(q, gk, tail_mass, ext, w_buf)
            for j in range(n):
                wf_buf[j] = w_buf[j]
            wf_buf[n] = ext
        L = max_face_speed(q, o_face, wf_buf, eps, c, dc, wmax, local,
                           u_cap, du_cap)
        dt = cfl * dx if L <= 0.0 else cfl * dx / L
        if t + dt > t_end:
            dt = t_end - t
        if dt < 1e-14:
            return DT_UNDERFLOW, steps, t, pic_max_seen
        a = nu * dt / (dx * dx)
        for i in range(n):
            low[i] = -a
            up[i] = -a
            dg[i] = 1.0 + 2.0 * a
        dg[0] = 1.0 + a
        dg[n - 1] = 1.0 + a
        dtdx = dt / dx
        for i in range(n):
            qk[i] = q[i]
        delta = 0.0
        converged = False
        for m in range(picard_max):
            if not local:
                extk = 0.0 if ext_zero else qk[n - 1]
                if use_exp:
                    nonlocal_exp(qk, decay, g0, extk, w_buf)
                else:
                    nonlocal_direct(qk, gk, tail_mass, extk, w_buf)
                for j in range(n):
                    wf_buf[j] = w_buf[j]
                wf_buf[n] = extk
            godunov_flux_sweep(q, o_face, wf_buf, eps, c, dc, wmax, local,
                               tol, f_buf)
            for i in range(n):
                rhs[i] = q[i] - dtdx * (f_buf[i + 1] - f_buf[i]) \
                    - dt * nu * o2_cells[i]
            thomas_solve(low, dg, up, rhs, qk1, scr)
            delta = 0.0
            for i in range(n):
                d = qk1[i] - qk[i]
                if d < 0.0:
                    d = -d
                if d > delta:
                    delta = d
                qk[i] = qk1[i]
            if m + 1 > pic_max_seen:
                pic_max_seen = m + 1
            if delta <= picard_tol:
                converged = True
                break
        if not converged and delta > 1e3 * picard_tol:
            return PICARD_FAIL, steps, t, pic_max_seen
        # relative residual of the last tridiagonal solve
        rmax = 0.0
        bmax = 1e-300
        for i in range(n):
            ax = dg[i] * qk[i]
            if i > 0:
                ax += low[i] * qk[i - 1]
            if i < n - 1:
                ax += up[i] * qk[i + 1]
            r = ax - rhs[i]
            if r < 0.0:
                r = -r
            if r > rmax:
                rmax = r
            b = rhs[i]
            if b < 0.0:
                b = -b
            if b > bmax:
                bmax = b
        if rmax > 1e-12 * bmax:
            return RESIDUAL_FAIL, steps, t, pic_max_seen
        mass = 0.0
        tv = 0.0
        min_clear = 1e300
        osl_q = 1e300
        osl_v = -1e300
        min_q = 1e300
        q_prev = 0.0
        v_prev = 0.0
        for i in range(n):
            qi = qk[i]
            if not np.isfinite(qi):
                return NAN_STATE, steps, t, pic_max_seen
            q[i] = qi
            mass += qi
            clear = o_cells[i] - qi
            if clear < min_clear:
                min_clear = clear
            if qi < min_q:
                min_q = qi
            if eps > 0.0:
                aa = clear / eps
                vi = 1.0 - (0.0 if aa > _EXP_CUT else np.exp(-aa))
            else:
                vi = 1.0
            if i > 0:
                d = qi - q_prev
                tv += d if d > 0.0 else -d
                slope = d / dx
                if slope < osl_q:
                    osl_q = slope
                sv = (vi - v_prev) / dx
                if sv > osl_v:
                    osl_v = sv
            q_prev = qi
            v_prev = vi
        t += dt
        diag[0, col] = t
        diag[1, col] = mass * dx
        diag[2, col] = tv
        diag[3, col] = min_clear
        diag[4, col] = osl_q
        diag[5, col] = osl_v
        diag[6, col] = min_q
        col += 1
        steps += 1
    return OK, steps, t, pic_max_seen
