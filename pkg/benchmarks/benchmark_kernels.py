#!/usr/bin/env python3
"""Benchmark the compiled RK4 kernel against the pure-Python fallback.

Runs the oscillator preset at several problem sizes through both backends,
reports wall time, speedup, and whether the outputs agree bitwise.

    python benchmarks/benchmark_kernels.py [--repeats 3]
"""

import argparse
import time

import numpy as np

from hyperjerk import van_der_pol
from hyperjerk import _kernels


def model_arrays(model):
    coef, expo = [], []
    for k, feat in enumerate(model.phi.monomials):
        for c, ex in feat:
            coef.append(model.theta[k] * c)
            expo.append(ex)
    return (
        np.asarray(model.xi0, dtype=float),
        np.asarray(coef, dtype=float),
        np.asarray(expo, dtype=np.int32).reshape(len(expo), model.m),
    )


def best_time(fn, repeats):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    if not _kernels.HAVE_COMPILED:
        print("compiled kernel not available; timing the Python backend only")

    xi0, coef, expo = model_arrays(van_der_pol())
    cases = [(1000, 10), (10000, 10), (10000, 40)]
    print(f"{'n':>8} {'substeps':>9} {'steps':>9} {'python':>10} {'compiled':>10} "
          f"{'speedup':>8} {'bitwise':>8}")
    for n, substeps in cases:
        t_py, out_py = best_time(
            lambda: _kernels.rk4_polyflow_python(xi0, coef, expo, n, substeps, 1.0),
            args.repeats,
        )
        if _kernels.HAVE_COMPILED:
            t_c, out_c = best_time(
                lambda: _kernels.rk4_polyflow_compiled(xi0, coef, expo, n, substeps, 1.0),
                args.repeats,
            )
            same = np.array_equal(np.asarray(out_c[0]), out_py[0])
            print(f"{n:>8} {substeps:>9} {n * substeps:>9} {t_py:>9.4f}s {t_c:>9.4f}s "
                  f"{t_py / t_c:>7.1f}x {str(same):>8}")
        else:
            print(f"{n:>8} {substeps:>9} {n * substeps:>9} {t_py:>9.4f}s {'-':>10} "
                  f"{'-':>8} {'-':>8}")


if __name__ == "__main__":
    main()
