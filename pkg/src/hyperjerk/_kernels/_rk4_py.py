"""Pure-Python RK4 kernel for polynomial companion flows.

Reference implementation for the compiled twin in ``_rk4.pyx``: both perform
the identical sequence of double-precision operations (integer powers by
repeated multiplication, fixed accumulation order), so their outputs agree
exactly on hardware without fused multiply-add contraction.
"""

from __future__ import annotations

import math

import numpy as np


def rk4_polyflow(xi0, coef, expo, n, substeps, T):
    """Integrate the companion system with a polynomial top derivative.

    State s in R^m evolves by ds[j] = s[j+1] for j < m-1 and
    ds[m-1] = sum_t coef[t] * prod_d s[d]^expo[t][d].

    Returns ``(out, fail)`` where out is an (n+1, m+1) array of augmented
    states (state plus top derivative) at times k T / n, and fail is the
    index of the first non-finite row, or -1.
    """
    m = len(xi0)
    nterms = len(coef)
    coef = [float(c) for c in coef]
    expo = [[int(e) for e in row] for row in expo]
    s = [float(v) for v in xi0]
    h = T / n / substeps
    h2 = 0.5 * h
    h6 = h / 6.0

    def flow(state):
        acc = 0.0
        for t in range(nterms):
            term = coef[t]
            row = expo[t]
            for d in range(m):
                v = state[d]
                for _ in range(row[d]):
                    term = term * v
            acc = acc + term
        return acc

    def deriv(state, out):
        for j in range(m - 1):
            out[j] = state[j + 1]
        out[m - 1] = flow(state)

    k1 = [0.0] * m
    k2 = [0.0] * m
    k3 = [0.0] * m
    k4 = [0.0] * m
    tmp = [0.0] * m
    out = np.empty((n + 1, m + 1))
    out[0, :m] = s
    out[0, m] = flow(s)
    fail = -1
    for i in range(1, n + 1):
        for _ in range(substeps):
            deriv(s, k1)
            for j in range(m):
                tmp[j] = s[j] + h2 * k1[j]
            deriv(tmp, k2)
            for j in range(m):
                tmp[j] = s[j] + h2 * k2[j]
            deriv(tmp, k3)
            for j in range(m):
                tmp[j] = s[j] + h * k3[j]
            deriv(tmp, k4)
            for j in range(m):
                s[j] = s[j] + h6 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
        out[i, :m] = s
        out[i, m] = flow(s)
        ok = True
        for j in range(m + 1):
            if not math.isfinite(out[i, j]):
                ok = False
                break
        if not ok:
            fail = i
            break
    return out, fail
