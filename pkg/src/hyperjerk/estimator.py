"""Block-ridge regression of the highest derivative on the feature map.

The regression stacks lambda * I on top of the feature matrix and a zero
block on top of the predictor, then applies the Moore-Penrose pseudoinverse
of the stacked system.  With lambda > 0 this equals Tikhonov least squares
with coefficient lambda^2; with lambda = 0 it requires full column rank.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .differentiator import DerivativeEstimates

__all__ = [
    "FeatureMap",
    "RegressionProblem",
    "Estimate",
    "SingularProblemError",
    "polynomial_feature_map",
    "build_regression",
    "ridge_solve",
    "lambda_star",
]

# Relative singular-value cutoff for the pseudoinverse.
SVD_RCOND = 1e-12


class SingularProblemError(Exception):
    """Raised when lambda = 0 is combined with a rank-deficient feature matrix."""


@dataclass(frozen=True)
class FeatureMap:
    """Known state-to-regressor map with declared Holder smoothness.

    ``eval`` maps a state vector of length m to a feature vector of length p.
    If ``vectorized`` it must also accept an (k, m) array and return (k, p).
    ``alpha`` and ``C_phi`` are declared metadata, not verified.
    ``monomials`` optionally describes each feature as a sum of monomials
    ``(coefficient, exponents)``, which unlocks the compiled integrator path.
    """

    p: int
    m: int
    eval: Callable[[np.ndarray], np.ndarray]
    alpha: float = 1.0
    C_phi: float = 1.0
    vectorized: bool = False
    monomials: Optional[tuple] = None

    def __post_init__(self):
        if self.p < 1 or self.m < 1:
            raise ValueError(f"need p >= 1 and m >= 1, got p={self.p}, m={self.m}")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"Holder exponent must lie in (0, 1], got {self.alpha}")


def polynomial_feature_map(
    features: Sequence[Sequence[tuple]], m: int, alpha: float = 1.0, C_phi: float = 1.0
) -> FeatureMap:
    """Feature map whose components are multivariate polynomials in the state.

    ``features[k]`` lists the monomials of feature k as ``(coef, exponents)``
    pairs, ``exponents`` being an m-tuple of nonnegative integers.
    """
    frozen = tuple(
        tuple((float(c), tuple(int(e) for e in ex)) for c, ex in feat) for feat in features
    )
    for feat in frozen:
        for _, ex in feat:
            if len(ex) != m or any(e < 0 for e in ex):
                raise ValueError(f"monomial exponents {ex} invalid for state dimension {m}")

    def _eval(xi: np.ndarray) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        out = np.zeros(xi.shape[:-1] + (len(frozen),))
        for k, feat in enumerate(frozen):
            for c, ex in feat:
                term = np.full(xi.shape[:-1], c)
                for d, e in enumerate(ex):
                    if e:
                        term = term * xi[..., d] ** e
                out[..., k] = out[..., k] + term
        return out

    return FeatureMap(
        p=len(frozen), m=m, eval=_eval, alpha=alpha, C_phi=C_phi,
        vectorized=True, monomials=frozen,
    )


def polynomial_jacobian(phi: FeatureMap, xi: np.ndarray) -> np.ndarray:
    """Exact (p, m) Jacobian of a polynomial feature map at state xi."""
    if phi.monomials is None:
        raise ValueError("feature map carries no monomial description")
    xi = np.asarray(xi, dtype=float)
    J = np.zeros((phi.p, phi.m))
    for k, feat in enumerate(phi.monomials):
        for c, ex in feat:
            for d, e in enumerate(ex):
                if e == 0:
                    continue
                term = c * e * xi[d] ** (e - 1)
                for dd, ee in enumerate(ex):
                    if dd != d and ee:
                        term *= xi[dd] ** ee
                J[k, d] += term
    return J


def lipschitz_on_box(phi: FeatureMap, lo, hi, grid: int = 33) -> float:
    """Largest Jacobian spectral norm of a polynomial map over a state box.

    Evaluated on a regular grid; adequate as a declared local Lipschitz
    (alpha = 1 Holder) coefficient for smooth polynomial maps.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    axes = [np.linspace(lo[d], hi[d], grid) for d in range(phi.m)]
    best = 0.0
    for point in np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, phi.m):
        s = np.linalg.norm(polynomial_jacobian(phi, point), 2)
        if s > best:
            best = s
    return float(best)


@dataclass(frozen=True)
class RegressionProblem:
    """Feature matrix rows phi(x_hat[i, :m]), predictor x_hat[:, m], ridge coefficient."""

    Phi_hat: np.ndarray
    u_hat_m: np.ndarray
    lam: float


@dataclass(frozen=True)
class Estimate:
    theta_hat: np.ndarray
    sigma_min_Phi_hat: float
    lambda_used: float


def build_regression(derivs: DerivativeEstimates, phi: FeatureMap, lam: float) -> RegressionProblem:
    """Assemble the feature matrix and predictor from derivative estimates.

    Row i of the feature matrix is phi applied to the first m derivative
    estimates of window i; the predictor is the order-m column.
    """
    values = derivs.values
    if values.ndim != 2 or values.shape[0] < 1:
        raise ValueError("derivative estimates must be a nonempty matrix")
    if values.shape[1] != phi.m + 1:
        raise ValueError(
            f"estimates carry {values.shape[1] - 1} derivative orders, feature map expects {phi.m}"
        )
    if lam < 0.0:
        raise ValueError(f"ridge coefficient must be >= 0, got {lam}")
    states = values[:, : phi.m]
    if phi.vectorized:
        Phi_hat = np.asarray(phi.eval(states), dtype=float)
    else:
        Phi_hat = np.asarray([phi.eval(row) for row in states], dtype=float)
    if Phi_hat.shape != (values.shape[0], phi.p):
        raise ValueError(
            f"feature map returned shape {Phi_hat.shape}, expected {(values.shape[0], phi.p)}"
        )
    return RegressionProblem(Phi_hat=Phi_hat, u_hat_m=values[:, phi.m].copy(), lam=lam)


def ridge_solve(problem: RegressionProblem) -> Estimate:
    """Solve theta = pinv([lam I; Phi]) [0; u] by SVD of the stacked block matrix."""
    Phi = problem.Phi_hat
    n_prime, p = Phi.shape
    svals = np.linalg.svd(Phi, compute_uv=False)
    sigma_min = float(svals.min()) if n_prime >= p else 0.0
    if problem.lam == 0.0:
        top = svals.max(initial=0.0)
        if n_prime < p or top == 0.0 or sigma_min <= SVD_RCOND * top:
            raise SingularProblemError(
                "lambda = 0 requires a full-column-rank feature matrix "
                f"(sigma_min = {sigma_min:.3e})"
            )
    R = np.vstack([problem.lam * np.eye(p), Phi])
    u = np.concatenate([np.zeros(p), problem.u_hat_m])
    theta = np.linalg.pinv(R, rcond=SVD_RCOND) @ u
    return Estimate(theta_hat=theta, sigma_min_Phi_hat=sigma_min, lambda_used=problem.lam)


def lambda_star(
    C_phi: float, eps_N: float, alpha: float, m: int, n: int, n_prime: int
) -> float:
    """Regularization sqrt(n') C_phi eps_N^(alpha/2) n^(-alpha/(2m+3)).

    Balances the errors-in-variables term against the predictor-noise term;
    advisory, since the constants are rarely known exactly.
    """
    if C_phi <= 0.0 or eps_N <= 0.0:
        raise ValueError(f"need positive constants, got C_phi={C_phi}, eps_N={eps_N}")
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"Holder exponent must lie in (0, 1], got {alpha}")
    if m < 0 or n < 1 or n_prime < 1:
        raise ValueError(f"invalid sizes m={m}, n={n}, n_prime={n_prime}")
    return float(np.sqrt(n_prime) * C_phi * eps_N ** (alpha / 2.0) * n ** (-alpha / (2 * m + 3)))
