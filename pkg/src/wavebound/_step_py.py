"""NumPy fallback engine for the binary64 time loop.

The expression shapes below are written with the exact same association as
the compiled kernels: NumPy elementwise operations round once per written
operation, so both engines produce bit-identical fields.  Do not refactor
the arithmetic (no fusing, no reassociation).
"""

import numpy as np


def solve_field(w, p1, s, a, dt):
    """Fill rows 1..k_max of the time-major field w; row 0 holds p0.

    w: (k_max+1, i_max+1) float64, s: (i_max+1, k_max+1) or None.
    Column k of s feeds the update that produces row k+1 (k >= 1).
    """
    k_max = w.shape[0] - 1
    dt2 = dt * dt
    half_a = 0.5 * a
    if k_max >= 1:
        w0 = w[0]
        dp = (w0[2:] - 2.0 * w0[1:-1]) + w0[:-2]
        if p1 is None:
            w[1, 1:-1] = w0[1:-1] + half_a * dp
        else:
            w[1, 1:-1] = (w0[1:-1] + dt * p1[1:-1]) + half_a * dp
        w[1, 0] = 0.0
        w[1, -1] = 0.0
    for k in range(1, k_max):
        wk = w[k]
        wm = w[k - 1]
        dp = (wk[2:] - 2.0 * wk[1:-1]) + wk[:-2]
        upd = (2.0 * wk[1:-1] - wm[1:-1]) + a * dp
        if s is not None:
            upd = upd + dt2 * s[1:-1, k]
        w[k + 1, 1:-1] = upd
        w[k + 1, 0] = 0.0
        w[k + 1, -1] = 0.0


def solve_last(p0, p1, a, dt, k_max):
    """Row k_max only, keeping two time levels (zero-source path)."""
    pm = np.array(p0, dtype=np.float64)
    if k_max == 0:
        return pm
    half_a = 0.5 * a
    dp = (pm[2:] - 2.0 * pm[1:-1]) + pm[:-2]
    pk = np.empty_like(pm)
    if p1 is None:
        pk[1:-1] = pm[1:-1] + half_a * dp
    else:
        pk[1:-1] = (pm[1:-1] + dt * p1[1:-1]) + half_a * dp
    pk[0] = 0.0
    pk[-1] = 0.0
    new = np.empty_like(pm)
    for _ in range(1, k_max):
        dp = (pk[2:] - 2.0 * pk[1:-1]) + pk[:-2]
        new[1:-1] = (2.0 * pk[1:-1] - pm[1:-1]) + a * dp
        new[0] = 0.0
        new[-1] = 0.0
        pm, pk, new = pk, new, pm
    return pk


def solve_checkpoints(p0, p1, a, dt, k_max, ks):
    """Rows at the sorted step indices ks, streamed like solve_last."""
    out = np.empty((len(ks), len(p0)), dtype=np.float64)
    pos = 0
    pm = np.array(p0, dtype=np.float64)
    while pos < len(ks) and ks[pos] == 0:
        out[pos] = pm
        pos += 1
    if k_max == 0 or pos == len(ks):
        return out
    half_a = 0.5 * a
    dp = (pm[2:] - 2.0 * pm[1:-1]) + pm[:-2]
    pk = np.empty_like(pm)
    if p1 is None:
        pk[1:-1] = pm[1:-1] + half_a * dp
    else:
        pk[1:-1] = (pm[1:-1] + dt * p1[1:-1]) + half_a * dp
    pk[0] = 0.0
    pk[-1] = 0.0
    while pos < len(ks) and ks[pos] == 1:
        out[pos] = pk
        pos += 1
    new = np.empty_like(pm)
    for k in range(1, k_max):
        dp = (pk[2:] - 2.0 * pk[1:-1]) + pk[:-2]
        new[1:-1] = (2.0 * pk[1:-1] - pm[1:-1]) + a * dp
        new[0] = 0.0
        new[-1] = 0.0
        pm, pk, new = pk, new, pm
        while pos < len(ks) and ks[pos] == k + 1:
            out[pos] = pk
            pos += 1
    return out
