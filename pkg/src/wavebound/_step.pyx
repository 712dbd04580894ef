# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled engine for the binary64 time loop.

Each written operation is one IEEE-754 round-to-nearest operation: the
expressions keep the reference C shapes (dp first, then the update) and the
module is compiled with -ffp-contract=off so no multiply-add fusion can
merge two roundings into one.  The NumPy fallback mirrors these shapes
exactly; both engines are bit-identical.
"""

import numpy as np


def solve_field(w, p1, s, double a, double dt):
    """Fill rows 1..k_max of the time-major field w; row 0 holds p0.

    w: (k_max+1, i_max+1) float64, s: (i_max+1, k_max+1) or None.
    Column k of s feeds the update that produces row k+1 (k >= 1).
    """
    cdef double[:, ::1] wv = w
    cdef bint has_p1 = p1 is not None
    cdef bint has_s = s is not None
    cdef double[::1] p1v = p1 if has_p1 else _EMPTY_1D
    cdef double[:, ::1] sv = s if has_s else _EMPTY_2D
    cdef Py_ssize_t k_max = wv.shape[0] - 1
    cdef Py_ssize_t n = wv.shape[1]
    cdef Py_ssize_t i, k
    cdef double dp
    cdef double dt2 = dt * dt
    cdef double half_a = 0.5 * a

    if k_max >= 1:
        wv[1, 0] = 0.0
        wv[1, n - 1] = 0.0
        for i in range(1, n - 1):
            dp = wv[0, i + 1] - 2. * wv[0, i] + wv[0, i - 1]
            if has_p1:
                wv[1, i] = wv[0, i] + dt * p1v[i] + half_a * dp
            else:
                wv[1, i] = wv[0, i] + half_a * dp
    for k in range(1, k_max):
        wv[k + 1, 0] = 0.0
        wv[k + 1, n - 1] = 0.0
        if has_s:
            for i in range(1, n - 1):
                dp = wv[k, i + 1] - 2. * wv[k, i] + wv[k, i - 1]
                wv[k + 1, i] = 2. * wv[k, i] - wv[k - 1, i] + a * dp + dt2 * sv[i, k]
        else:
            for i in range(1, n - 1):
                dp = wv[k, i + 1] - 2. * wv[k, i] + wv[k, i - 1]
                wv[k + 1, i] = 2. * wv[k, i] - wv[k - 1, i] + a * dp


def solve_last(p0, p1, double a, double dt, Py_ssize_t k_max):
    """Row k_max only, keeping two time levels (zero-source path)."""
    cdef object bm = np.array(p0, dtype=np.float64)
    if k_max == 0:
        return bm
    cdef Py_ssize_t n = bm.shape[0]
    cdef object bk = np.empty(n, dtype=np.float64)
    cdef object bn = np.empty(n, dtype=np.float64)
    cdef double[::1] pm = bm
    cdef double[::1] pk = bk
    cdef double[::1] nw = bn
    cdef double[::1] tmp
    cdef bint has_p1 = p1 is not None
    cdef double[::1] p1v = p1 if has_p1 else _EMPTY_1D
    cdef Py_ssize_t i, k
    cdef double dp
    cdef double half_a = 0.5 * a

    pk[0] = 0.0
    pk[n - 1] = 0.0
    for i in range(1, n - 1):
        dp = pm[i + 1] - 2. * pm[i] + pm[i - 1]
        if has_p1:
            pk[i] = pm[i] + dt * p1v[i] + half_a * dp
        else:
            pk[i] = pm[i] + half_a * dp
    for k in range(1, k_max):
        nw[0] = 0.0
        nw[n - 1] = 0.0
        for i in range(1, n - 1):
            dp = pk[i + 1] - 2. * pk[i] + pk[i - 1]
            nw[i] = 2. * pk[i] - pm[i] + a * dp
        tmp = pm
        pm = pk
        pk = nw
        nw = tmp
    return np.array(pk, dtype=np.float64)


def solve_checkpoints(p0, p1, double a, double dt, Py_ssize_t k_max, ks):
    """Rows at the sorted step indices ks, streamed like solve_last."""
    cdef object karr = np.ascontiguousarray(ks, dtype=np.int64)
    cdef long long[::1] kv = karr
    cdef Py_ssize_t m = kv.shape[0]
    cdef object bm = np.array(p0, dtype=np.float64)
    cdef Py_ssize_t n = bm.shape[0]
    cdef object out_obj = np.empty((m, n), dtype=np.float64)
    cdef double[:, ::1] out = out_obj
    cdef double[::1] pm = bm
    cdef Py_ssize_t pos = 0
    cdef Py_ssize_t i, k

    while pos < m and kv[pos] == 0:
        for i in range(n):
            out[pos, i] = pm[i]
        pos += 1
    if k_max == 0 or pos == m:
        return out_obj

    cdef object bk = np.empty(n, dtype=np.float64)
    cdef object bn = np.empty(n, dtype=np.float64)
    cdef double[::1] pk = bk
    cdef double[::1] nw = bn
    cdef double[::1] tmp
    cdef bint has_p1 = p1 is not None
    cdef double[::1] p1v = p1 if has_p1 else _EMPTY_1D
    cdef double dp
    cdef double half_a = 0.5 * a

    pk[0] = 0.0
    pk[n - 1] = 0.0
    for i in range(1, n - 1):
        dp = pm[i + 1] - 2. * pm[i] + pm[i - 1]
        if has_p1:
            pk[i] = pm[i] + dt * p1v[i] + half_a * dp
        else:
            pk[i] = pm[i] + half_a * dp
    while pos < m and kv[pos] == 1:
        for i in range(n):
            out[pos, i] = pk[i]
        pos += 1
    for k in range(1, k_max):
        nw[0] = 0.0
        nw[n - 1] = 0.0
        for i in range(1, n - 1):
            dp = pk[i + 1] - 2. * pk[i] + pk[i - 1]
            nw[i] = 2. * pk[i] - pm[i] + a * dp
        tmp = pm
        pm = pk
        pk = nw
        nw = tmp
        while pos < m and kv[pos] == k + 1:
            for i in range(n):
                out[pos, i] = pk[i]
            pos += 1
    return out_obj


_EMPTY_1D = np.empty(0, dtype=np.float64)
_EMPTY_2D = np.empty((0, 0), dtype=np.float64)
