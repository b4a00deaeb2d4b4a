"""Closed-form error envelopes for the differentiation filter and the estimator.

Each function evaluates one analytical bound as a plain formula: filter bias,
filter variance and their mean-squared-error sum, the optimized total-MSE
constant, the perturbed-pseudoinverse operator bound and its head-body-tail
expectation refinement, and the five-term mean-absolute-error bound on the
parameter estimate.  All functions are deterministic and total over their
stated preconditions; no randomness lives here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

__all__ = [
    "FilterBoundInputs",
    "MAEBoundInputs",
    "MAEBoundBreakdown",
    "bias_bound",
    "variance_bound",
    "mse_bound",
    "epsilon_n",
    "wedin_s_bound",
    "head_body_tail",
    "delta_theta_mae_bound",
]


@dataclass(frozen=True)
class FilterBoundInputs:
    """Constants entering the per-window filter error bounds.

    M : sup of |d^(d+1) y / dt^(d+1)| over the window.
    T : horizon; d : derivative order; N, n : window and total sample counts.
    g_over_h : ratio of the absolute-sum to the normalization constant of the
        degree-d filter polynomial.
    s : noise functional, sqrt of (1/N) sum rho^2 p^2 Var w over the window.
    h : normalization constant of the degree-d filter polynomial.
    """

    M: float
    T: float
    d: int
    N: int
    n: int
    g_over_h: float
    s: float
    h: float

    def __post_init__(self):
        if self.M < 0.0 or self.s < 0.0:
            raise ValueError("M and s must be nonnegative")
        if self.T <= 0.0 or self.h <= 0.0 or self.g_over_h <= 0.0:
            raise ValueError("T, h, and g/h must be positive")
        if self.d < 0 or self.N < 1 or self.n < 1:
            raise ValueError("d must be >= 0 and N, n >= 1")


def bias_bound(inputs: FilterBoundInputs) -> float:
    """(M T / (d+1)) (N/n) (g/h): worst-case mean offset of the filtered derivative."""
    return (
        inputs.M * inputs.T / (inputs.d + 1) * (inputs.N / inputs.n) * inputs.g_over_h
    )


def variance_bound(inputs: FilterBoundInputs) -> float:
    """(n^2d / N^(2d+1)) (d! s / (T^d h))^2; exact for independent noise."""
    core = math.factorial(inputs.d) * inputs.s / (inputs.T**inputs.d * inputs.h)
    return float(inputs.n) ** (2 * inputs.d) / float(inputs.N) ** (2 * inputs.d + 1) * core**2


def mse_bound(inputs: FilterBoundInputs) -> float:
    """Squared bias envelope plus variance envelope."""
    return bias_bound(inputs) ** 2 + variance_bound(inputs)


def epsilon_n(A_tilde: float, B_tilde: float, m: int, n_prime: int) -> float:
    """Constant of the optimized total differentiation MSE.

    2 (2m+1)^(1/(2m+3)) A^((2m+1)/(2m+3)) B^(2/(2m+3)) / n', where A and B
    are the summed bias-squared and variance constants across windows and
    orders.  The total MSE with the optimal window obeys
    eps * n' * n^(-2/(2m+3)).
    """
    if A_tilde < 0.0 or B_tilde < 0.0:
        raise ValueError(f"constants must be nonnegative, got A={A_tilde}, B={B_tilde}")
    if m < 0 or n_prime < 1:
        raise ValueError(f"invalid sizes m={m}, n_prime={n_prime}")
    q = 2 * m + 3
    return (
        2.0 * (2 * m + 1) ** (1.0 / q) * A_tilde ** ((q - 2.0) / q) * B_tilde ** (2.0 / q) / n_prime
    )


def wedin_s_bound(sigma: float, delta: float, lam: float) -> float:
    """Operator-norm bound 2(lam+delta) / (sigma (lam + (sigma-delta)^+)).

    Controls the difference between the pseudoinverses of the unregularized
    stacked matrix [0; A] and the perturbed regularized stack [lam I; A+D],
    where sigma is the least singular value of A and delta the operator norm
    of D.
    """
    if sigma <= 0.0 or lam <= 0.0:
        raise ValueError(f"need sigma > 0 and lam > 0, got sigma={sigma}, lam={lam}")
    if delta < 0.0:
        raise ValueError(f"perturbation norm must be >= 0, got {delta}")
    return 2.0 * (lam + delta) / (sigma * (lam + max(0.0, sigma - delta)))


def _adaptive_simpson(f, a: float, b: float, rel_tol: float) -> float:
    """Adaptive Simpson quadrature with absolute tolerance scaled off a first pass."""

    def simpson(x0, x2, f0, f1, f2):
        return (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2)

    def recurse(x0, x2, f0, f1, f2, whole, tol, depth):
        xm = 0.5 * (x0 + x2)
        xl = 0.5 * (x0 + xm)
        xr = 0.5 * (xm + x2)
        fl = f(xl)
        fr = f(xr)
        left = simpson(x0, xm, f0, fl, f1)
        right = simpson(xm, x2, f1, fr, f2)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return recurse(x0, xm, f0, fl, f1, left, tol / 2.0, depth - 1) + recurse(
            xm, x2, f1, fr, f2, right, tol / 2.0, depth - 1
        )

    if b <= a:
        return 0.0
    mid = 0.5 * (a + b)
    fa, fm, fb = f(a), f(mid), f(b)
    whole = simpson(a, b, fa, fm, fb)
    tol = rel_tol * max(abs(whole), 1e-300)
    return recurse(a, b, fa, fm, fb, whole, tol, depth=48)


def head_body_tail(
    sigma: float,
    lam: float,
    delta_tail_moment: float,
    delta_cdf: Callable[[float], float],
    rel_tol: float = 1e-6,
) -> tuple[float, float, float]:
    """Three-piece bound on the expected pseudoinverse perturbation norm.

    Splits E||S|| over the events delta <= lam, lam < delta <= sigma, and
    delta > sigma:

    * head: 4 lam / sigma^2, deterministic;
    * body: 3 * integral over (lam, sigma) of
      (lam + sigma) P(delta > v) / (sigma (lam + sigma - v)^2) dv, evaluated
      by adaptive Simpson on [lam, sigma - eps] with eps = 1e-9 (sigma - lam);
    * tail: 4 E[delta ; delta > sigma] / (sigma lam), where the truncated
      moment is supplied by the caller.

    ``delta_cdf(v)`` must return P(delta <= v).
    """
    if sigma <= 0.0:
        raise ValueError(f"need sigma > 0, got {sigma}")
    if not 0.0 < lam < sigma:
        raise ValueError(f"need 0 < lam < sigma, got lam={lam}, sigma={sigma}")
    if delta_tail_moment < 0.0:
        raise ValueError(f"truncated moment must be >= 0, got {delta_tail_moment}")
    s_head = 4.0 * lam / sigma**2

    def integrand(v: float) -> float:
        sf = 1.0 - delta_cdf(v)
        return (lam + sigma) * sf / (sigma * (lam + sigma - v) ** 2)

    eps = 1e-9 * (sigma - lam)
    s_body = 3.0 * _adaptive_simpson(integrand, lam, sigma - eps, rel_tol)
    s_tail = 4.0 * delta_tail_moment / (sigma * lam)
    return s_head, s_body, s_tail


@dataclass(frozen=True)
class MAEBoundInputs:
    """Inputs of the five-term mean-absolute-error bound on the estimate.

    eps_N, eps_N_m : total and highest-order differentiation error constants
        (eps_N_m <= eps_N).
    sigma_bar : least singular value of the noise-free feature matrix divided
        by sqrt(n'); U_bar : predictor norm divided by sqrt(n').
    """

    eps_N: float
    eps_N_m: float
    sigma_bar: float
    U_bar: float
    C_phi: float
    alpha: float
    m: int
    n: float
    n_prime: float
    lam: float

    def __post_init__(self):
        if self.sigma_bar <= 0.0 or self.lam <= 0.0:
            raise ValueError("sigma_bar and lam must be positive")
        if self.eps_N < 0.0 or self.eps_N_m < 0.0 or self.U_bar < 0.0 or self.C_phi < 0.0:
            raise ValueError("constants must be nonnegative")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"Holder exponent must lie in (0, 1], got {self.alpha}")
        if self.m < 0 or self.n < 1 or self.n_prime < 1:
            raise ValueError("need m >= 0, n >= 1, n_prime >= 1")


@dataclass(frozen=True)
class MAEBoundBreakdown:
    """Per-term values of the mean-absolute-error bound.

    predictor_noise : predictor error passed through the clean pseudoinverse.
    head, body, tail : the three pieces of E||S|| scaled by the predictor norm.
    cross : the product term between the pseudoinverse perturbation and the
        predictor error.
    """

    predictor_noise: float
    head: float
    body: float
    tail: float
    cross: float

    @property
    def total(self) -> float:
        return self.predictor_noise + self.head + self.body + self.tail + self.cross


def delta_theta_mae_bound(inputs: MAEBoundInputs) -> MAEBoundBreakdown:
    """Evaluate the displayed five-term bound on E||theta_hat - theta||."""
    i = inputs
    q = 2 * i.m + 3
    root_np = math.sqrt(i.n_prime)
    n_pow = i.n ** (1.0 / q)

    predictor_noise = math.sqrt(i.eps_N_m) / (i.sigma_bar * n_pow)
    head = 4.0 * i.U_bar * i.lam / (i.sigma_bar**2 * root_np)
    body = (
        6.0
        * i.C_phi ** (2.0 * i.alpha)
        * i.U_bar
        * i.eps_N**i.alpha
        / i.n ** (2.0 * i.alpha / q)
        * (
            2.0 * math.log(i.sigma_bar * root_np / i.lam) / i.sigma_bar**3
            + root_np / (i.lam * i.sigma_bar**2)
        )
    )
    tail = (
        4.0
        * i.C_phi**2
        * i.U_bar
        * i.eps_N
        * root_np
        / (i.lam * i.sigma_bar ** (2.0 / i.alpha) * i.n ** (2.0 / q))
    )
    cross = (
        2.0 ** (2.0 - i.alpha / 2.0)
        * math.sqrt(i.eps_N_m)
        / n_pow
        * (
            i.C_phi**2
            * i.eps_N
            * i.n_prime ** (1.0 / i.alpha)
            / (i.sigma_bar ** (2.0 / i.alpha) * i.n ** (2.0 / q) * i.lam ** (2.0 / i.alpha))
            + 1.0 / i.sigma_bar ** (2.0 / i.alpha)
        )
        ** (i.alpha / 2.0)
    )
    return MAEBoundBreakdown(
        predictor_noise=predictor_noise, head=head, body=body, tail=tail, cross=cross
    )
