"""Windowed derivative estimation from uniformly sampled noisy output.

The sample stream is cut into disjoint windows of length N; each window
produces one estimate of every derivative order 0..m, attributed to the
window's anchor time (the sample instant just before the window's first
sample).  ``select_window_size`` implements the bias/variance-optimal window
rule given the two error constants.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .orthopoly import WeightFunction, filter_matrix, orthogonal_family

__all__ = [
    "WindowPlan",
    "DerivativeEstimates",
    "plan_windows",
    "estimate_derivatives",
    "select_window_size",
]


@dataclass(frozen=True)
class WindowPlan:
    """Disjoint partition of n samples into n_prime windows of length N."""

    n: int
    N: int
    n_prime: int
    starts: np.ndarray  # 0-based offsets; window i covers samples starts[i]..starts[i]+N-1

    def start_times(self, T: float) -> np.ndarray:
        """Anchor times t_i = starts[i] * T / n."""
        return self.starts * (T / self.n)


@dataclass(frozen=True)
class DerivativeEstimates:
    """values[i, d] estimates the d-th output derivative at window i's anchor."""

    values: np.ndarray
    plan: WindowPlan


def plan_windows(n: int, N: int) -> WindowPlan:
    """Disjoint windows starting at 0, N, 2N, ...; the trailing n mod N samples are dropped."""
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    if not 1 <= N <= n:
        raise ValueError(f"window length N={N} must satisfy 1 <= N <= n={n}")
    n_prime = n // N
    starts = np.arange(n_prime, dtype=np.int64) * N
    return WindowPlan(n=n, N=N, n_prime=n_prime, starts=starts)


def estimate_derivatives(
    z, T: float, m: int, plan: WindowPlan, weight: WeightFunction | None = None
) -> DerivativeEstimates:
    """Apply the order-0..m filters to every window of z.

    z holds n observations at times j T/n, j = 1..n.  One shared polynomial
    family serves all windows; the result is linear in z.
    """
    z = np.asarray(z, dtype=float)
    if z.shape != (plan.n,):
        raise ValueError(f"observations have shape {z.shape}, plan expects ({plan.n},)")
    if m > plan.N - 1:
        raise ValueError(f"max order m={m} needs window length > m, got N={plan.N}")
    family = orthogonal_family(plan.N, m, weight)
    W = filter_matrix(family, plan.n, T)
    windows = z[: plan.n_prime * plan.N].reshape(plan.n_prime, plan.N)
    return DerivativeEstimates(values=windows @ W.T, plan=plan)


def select_window_size(A_hat: float, B_hat: float, m: int, n: int) -> int:
    """Window length minimizing the A (N/n)^2 + B n^2m / N^(2m+1) error envelope.

    Returns [(2m+1) B / (2A)]^(1/(2m+3)) n^((2m+2)/(2m+3)) rounded to the
    nearest integer and clamped to [2(m+1), n].  Only the ratio B/A matters,
    so per-window and total-across-windows constants give the same answer.
    """
    if A_hat <= 0.0 or B_hat <= 0.0:
        raise ValueError(f"error constants must be positive, got A={A_hat}, B={B_hat}")
    if m < 0:
        raise ValueError(f"max order must be >= 0, got {m}")
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    lo = 2 * (m + 1)
    if lo > n:
        raise ValueError(f"need n >= {lo} samples to fit a window for order m={m}")
    q = 2 * m + 3
    raw = ((2 * m + 1) * B_hat / (2.0 * A_hat)) ** (1.0 / q) * float(n) ** ((q - 1.0) / q)
    return int(min(max(round(raw), lo), n))
