"""Compiled method-of-lines RK4 kernel with Hermite-interpolated delays.

Ring-buffer slot ``k % L`` holds the state and its time derivative at step
``k``. A lag read at stage offset ``c`` (0, 1/2 or 1 step) for a delay of
``q`` steps lands at fractional step ``k + c - q``; the integer part and the
fraction are the same for every ``k`` and are precomputed by the caller.
"""
from __future__ import annotations

import numpy as np
from numba import njit

OK = 0
NON_FINITE = 1
NON_POSITIVE = 2
SINGULAR = 3

U_LAG_MIN = 1e-12


@njit(cache=True, inline="always")
def _hermite(y0, d0, y1, d1, s, h):
    s2 = s * s
    s3 = s2 * s
    return (
        (2 * s3 - 3 * s2 + 1) * y0
        + (s3 - 2 * s2 + s) * h * d0
        + (-2 * s3 + 3 * s2) * y1
        + (s3 - s2) * h * d1
    )


@njit(cache=True, inline="always")
def _hermite_slope(y0, d0, y1, d1, s, h):
    s2 = s * s
    return (
        (6 * s2 - 6 * s) * y0 / h
        + (3 * s2 - 4 * s + 1) * d0
        + (-6 * s2 + 6 * s) * y1 / h
        + (3 * s2 - 2 * s) * d1
    )


@njit(cache=True)
def _lagged(buf, dbuf, hist, k, off, frac, L, h, out):
    """Write the field at fractional step k + off + frac into ``out``."""
    j = k + off
    M = out.shape[0]
    if j < 0:
        for i in range(M):
            out[i] = hist[i]
        return
    if frac == 0.0:
        r = j % L
        for i in range(M):
            out[i] = buf[r, i]
        return
    r0 = j % L
    r1 = (j + 1) % L
    for i in range(M):
        out[i] = _hermite(buf[r0, i], dbuf[r0, i], buf[r1, i], dbuf[r1, i], frac, h)


@njit(cache=True)
def _rhs(u, v, u1, u2, v2, pars, inv_dx2, du, dv):
    r1, r2, a, K, gamma, m, d1, d2 = pars[0], pars[1], pars[2], pars[3], pars[4], pars[5], pars[6], pars[7]
    M = u.shape[0]
    q = gamma * (1.0 - m)
    for i in range(M):
        if u2[i] < U_LAG_MIN:
            return SINGULAR
        if M == 1:
            lu = 0.0
            lv = 0.0
        elif i == 0:
            lu = 2.0 * (u[1] - u[0]) * inv_dx2
            lv = 2.0 * (v[1] - v[0]) * inv_dx2
        elif i == M - 1:
            lu = 2.0 * (u[M - 2] - u[M - 1]) * inv_dx2
            lv = 2.0 * (v[M - 2] - v[M - 1]) * inv_dx2
        else:
            lu = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_dx2
            lv = (v[i - 1] - 2.0 * v[i] + v[i + 1]) * inv_dx2
        du[i] = d1 * lu + r1 * u[i] * (1.0 - u1[i] / K) - a * (1.0 - m) * u[i] * v[i]
        dv[i] = d2 * lv + r2 * v[i] * (1.0 - v2[i] / (q * u2[i]))
    return OK


@njit(cache=True)
def _lags(U, V, dU, dV, hu, hv, k, offs, fracs, stage, L, h, cur_u, cur_v, u1, u2, v2):
    # A zero delay (offset sentinel) reads the current stage value.
    if offs[stage, 0] == -(1 << 40):
        u1[:] = cur_u
    else:
        _lagged(U, dU, hu, k, offs[stage, 0], fracs[stage, 0], L, h, u1)
    if offs[stage, 1] == -(1 << 40):
        u2[:] = cur_u
        v2[:] = cur_v
    else:
        _lagged(U, dU, hu, k, offs[stage, 1], fracs[stage, 1], L, h, u2)
        _lagged(V, dV, hv, k, offs[stage, 1], fracs[stage, 1], L, h, v2)


@njit(cache=True)
def advance(
    U, V, dU, dV, hu, hv, k0, nsteps, pars, inv_dx2, h, offs, fracs,
    rec, rec_start, rec_stride, rec_pos,
):
    """Advance ``nsteps`` RK4 steps from step ``k0``.

    Rows of ``rec`` receive (t, u0, v0, u0_lag1, du0, dv0, du0_lag1) at steps
    that are multiples of ``rec_stride`` and not below ``rec_start``.

    Returns (status, steps_done, rec_pos).
    """
    L, M = U.shape
    u = np.empty(M)
    v = np.empty(M)
    su = np.empty(M)
    sv = np.empty(M)
    ku = np.empty((4, M))
    kv = np.empty((4, M))
    u1 = np.empty(M)
    u2 = np.empty(M)
    v2 = np.empty(M)
    lag_out = np.empty(M)
    stage_c = (0, 1, 1, 2)
    for n in range(nsteps):
        k = k0 + n
        r = k % L
        for i in range(M):
            u[i] = U[r, i]
            v[i] = V[r, i]
            ku[0, i] = dU[r, i]
            kv[0, i] = dV[r, i]
        for st in range(1, 4):
            w = 0.5 * h if st < 3 else h
            for i in range(M):
                su[i] = u[i] + w * ku[st - 1, i]
                sv[i] = v[i] + w * kv[st - 1, i]
            _lags(U, V, dU, dV, hu, hv, k, offs, fracs, stage_c[st], L, h, su, sv, u1, u2, v2)
            status = _rhs(su, sv, u1, u2, v2, pars, inv_dx2, ku[st], kv[st])
            if status != OK:
                return status, n, rec_pos
        r1 = (k + 1) % L
        bad = False
        neg = False
        for i in range(M):
            un = u[i] + h / 6.0 * (ku[0, i] + 2.0 * ku[1, i] + 2.0 * ku[2, i] + ku[3, i])
            vn = v[i] + h / 6.0 * (kv[0, i] + 2.0 * kv[1, i] + 2.0 * kv[2, i] + kv[3, i])
            if not (np.isfinite(un) and np.isfinite(vn)):
                bad = True
            elif un <= 0.0 or vn <= 0.0:
                neg = True
            U[r1, i] = un
            V[r1, i] = vn
        if bad:
            return NON_FINITE, n, rec_pos
        if neg:
            return NON_POSITIVE, n, rec_pos
        # Derivative at the new node, with lags read at the full-step offset.
        for i in range(M):
            su[i] = U[r1, i]
            sv[i] = V[r1, i]
        _lags(U, V, dU, dV, hu, hv, k, offs, fracs, 2, L, h, su, sv, u1, u2, v2)
        status = _rhs(su, sv, u1, u2, v2, pars, inv_dx2, ku[0], kv[0])
        if status != OK:
            return status, n, rec_pos
        for i in range(M):
            dU[r1, i] = ku[0, i]
            dV[r1, i] = kv[0, i]
        kn = k + 1
        if kn >= rec_start and kn % rec_stride == 0 and rec_pos < rec.shape[0]:
            rec[rec_pos, 0] = kn * h
            rec[rec_pos, 1] = U[r1, 0]
            rec[rec_pos, 2] = V[r1, 0]
            rec[rec_pos, 3] = u1[0]
            rec[rec_pos, 4] = dU[r1, 0]
            rec[rec_pos, 5] = dV[r1, 0]
            rec[rec_pos, 6] = _lag_slope(U, dU, k, offs[2, 0], fracs[2, 0], L, h)
            rec_pos += 1
    return OK, nsteps, rec_pos


@njit(cache=True)
def _lag_slope(U, dU, k, off, frac, L, h):
    if off == -(1 << 40):
        return dU[(k + 1) % L, 0]
    j = k + off
    if j < 0:
        return 0.0
    r0 = j % L
    if frac == 0.0:
        return dU[r0, 0]
    r1 = (j + 1) % L
    return _hermite_slope(U[r0, 0], dU[r0, 0], U[r1, 0], dU[r1, 0], frac, h)


@njit(cache=True)
def initial_slope(u, v, hu, hv, pars, inv_dx2, zero1, zero2, du, dv):
    """Right derivative at t = 0: lagged values come from the history."""
    u1 = u.copy() if zero1 else hu.copy()
    if zero2:
        u2 = u.copy()
        v2 = v.copy()
    else:
        u2 = hu.copy()
        v2 = hv.copy()
    return _rhs(u, v, u1, u2, v2, pars, inv_dx2, du, dv)
