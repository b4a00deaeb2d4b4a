# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled RK4 kernel for polynomial companion flows.

Mirrors ``_rk4_py.rk4_polyflow`` operation for operation; see that module
for the contract.  Built with -ffp-contract=off so results match the
Python fallback exactly.
"""

import numpy as np

from libc.math cimport isfinite


cdef inline double _flow(double* state, double* coef, int* expo,
                         int nterms, int m) noexcept nogil:
    cdef double acc = 0.0
    cdef double term, v
    cdef int t, d, r, e
    for t in range(nterms):
        term = coef[t]
        for d in range(m):
            v = state[d]
            e = expo[t * m + d]
            for r in range(e):
                term = term * v
        acc = acc + term
    return acc


cdef inline void _deriv(double* state, double* out, double* coef, int* expo,
                        int nterms, int m) noexcept nogil:
    cdef int j
    for j in range(m - 1):
        out[j] = state[j + 1]
    out[m - 1] = _flow(state, coef, expo, nterms, m)


def rk4_polyflow(xi0, coef, expo, int n, int substeps, double T):
    cdef double[::1] s_mv = np.ascontiguousarray(xi0, dtype=np.float64).copy()
    cdef double[::1] coef_mv = np.ascontiguousarray(coef, dtype=np.float64)
    cdef int[::1] expo_mv = np.ascontiguousarray(
        np.asarray(expo, dtype=np.int32).reshape(-1)
    )
    cdef int m = s_mv.shape[0]
    cdef int nterms = coef_mv.shape[0]
    out_arr = np.empty((n + 1, m + 1))
    cdef double[:, ::1] out = out_arr
    cdef double h = T / n / substeps
    cdef double h2 = 0.5 * h
    cdef double h6 = h / 6.0

    cdef double[::1] k1 = np.zeros(m)
    cdef double[::1] k2 = np.zeros(m)
    cdef double[::1] k3 = np.zeros(m)
    cdef double[::1] k4 = np.zeros(m)
    cdef double[::1] tmp = np.zeros(m)

    cdef double* s = &s_mv[0]
    cdef double* cf = &coef_mv[0]
    cdef int* ex = &expo_mv[0]
    cdef int i, j, sub, fail = -1
    cdef bint ok

    with nogil:
        for j in range(m):
            out[0, j] = s[j]
        out[0, m] = _flow(s, cf, ex, nterms, m)
        for i in range(1, n + 1):
            for sub in range(substeps):
                _deriv(s, &k1[0], cf, ex, nterms, m)
                for j in range(m):
                    tmp[j] = s[j] + h2 * k1[j]
                _deriv(&tmp[0], &k2[0], cf, ex, nterms, m)
                for j in range(m):
                    tmp[j] = s[j] + h2 * k2[j]
                _deriv(&tmp[0], &k3[0], cf, ex, nterms, m)
                for j in range(m):
                    tmp[j] = s[j] + h * k3[j]
                _deriv(&tmp[0], &k4[0], cf, ex, nterms, m)
                for j in range(m):
                    s[j] = s[j] + h6 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
            for j in range(m):
                out[i, j] = s[j]
            out[i, m] = _flow(s, cf, ex, nterms, m)
            ok = True
            for j in range(m + 1):
                if not isfinite(out[i, j]):
                    ok = False
                    break
            if not ok:
                fail = i
                break
    return out_arr, fail
