"""Discrete weighted orthogonal polynomials and derivative-filter weights.

Everything here lives on the unit-interval node grid j/N, j = 1..N, with a
strictly positive weight on the nodes.  A family of monic polynomials
orthogonal under the induced discrete inner product yields, for each
derivative order d, a linear filter whose weights recover the d-th
derivative of low-degree polynomial signals exactly and whose bias/variance
on general smooth signals is controlled by the normalization constants
``h[d]`` and ``g[d]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MAX_DEGREE",
    "WeightFunction",
    "PolynomialFamily",
    "FilterCoefficients",
    "uniform_weight",
    "inner_product",
    "orthogonal_family",
    "filter_coefficients",
    "filter_matrix",
]

# Monic Gram-Schmidt in double precision degrades past this degree.
MAX_DEGREE = 8


@dataclass(frozen=True)
class WeightFunction:
    """Node weights rho(j/N), j = 1..N; all entries must be strictly positive."""

    samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("weight samples must be a nonempty 1-D vector")
        if not np.all(np.isfinite(samples)) or np.any(samples <= 0.0):
            raise ValueError("weight samples must be finite and strictly positive")
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return self.samples.size


def uniform_weight(N: int) -> WeightFunction:
    """The default weight rho = 1 on all N nodes."""
    if N < 1:
        raise ValueError(f"window length must be >= 1, got {N}")
    return WeightFunction(np.ones(N))


@dataclass(frozen=True)
class PolynomialFamily:
    """Monic polynomials p^0..p^m orthogonal in the discrete weighted inner product.

    Attributes
    ----------
    N, m : window length and maximum degree (m <= N - 1).
    coeffs : (m+1, m+1) array; row d holds the ascending monomial
        coefficients of p^d (entries above index d are zero, entry d is 1).
    node_values : (m+1, N) array of p^d(j/N).
    h : h[d] = (1/N) sum_j rho_j p^d(j/N) (j/N)^d, positive by monicity.
    g : g[d] = (1/N) sum_j rho_j |p^d(j/N)|.
    """

    N: int
    m: int
    coeffs: np.ndarray
    node_values: np.ndarray
    h: np.ndarray
    g: np.ndarray
    weight: WeightFunction

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(1, self.N + 1) / self.N


@dataclass(frozen=True)
class FilterCoefficients:
    """Window filter weights for one derivative order (units: time^-d)."""

    d: int
    weights: np.ndarray


def inner_product(f_vals, g_vals, weight: WeightFunction) -> float:
    """(1/N) sum_j rho(j/N) f(j/N) g(j/N) over the N nodes."""
    f_vals = np.asarray(f_vals, dtype=float)
    g_vals = np.asarray(g_vals, dtype=float)
    N = len(weight)
    if f_vals.shape != (N,) or g_vals.shape != (N,):
        raise ValueError(
            f"inner product needs two length-{N} vectors, "
            f"got shapes {f_vals.shape} and {g_vals.shape}"
        )
    return float(np.dot(weight.samples, f_vals * g_vals) / N)


def orthogonal_family(N: int, m: int, weight: WeightFunction | None = None) -> PolynomialFamily:
    """Build the monic orthogonal family of degrees 0..m on the N-node grid.

    Uses modified Gram-Schmidt on the monomial basis with one
    reorthogonalization pass.  The discrete inner product has rank N, so
    ``m <= N - 1`` is required.
    """
    if N < 1:
        raise ValueError(f"window length must be >= 1, got {N}")
    if m < 0:
        raise ValueError(f"max degree must be >= 0, got {m}")
    if m > N - 1:
        raise ValueError(f"max degree {m} exceeds rank of the N={N} node grid (need m <= N-1)")
    if m > MAX_DEGREE:
        raise ValueError(f"max degree {m} exceeds supported cap {MAX_DEGREE}")
    if weight is None:
        weight = uniform_weight(N)
    elif len(weight) != N:
        raise ValueError(f"weight has {len(weight)} samples, window needs {N}")

    x = np.arange(1, N + 1) / N
    w = weight.samples / N
    values = np.zeros((m + 1, N))
    coeffs = np.zeros((m + 1, m + 1))
    norms2 = np.zeros(m + 1)
    for d in range(m + 1):
        v = x**d
        c = np.zeros(m + 1)
        c[d] = 1.0
        for _ in range(2):  # second pass reorthogonalizes
            for k in range(d):
                proj = np.dot(w, v * values[k]) / norms2[k]
                v = v - proj * values[k]
                c[: m + 1] -= proj * coeffs[k]
        values[d] = v
        coeffs[d] = c
        norms2[d] = np.dot(w, v * v)

    h = np.array([np.dot(w, values[d] * x**d) for d in range(m + 1)])
    g = np.array([np.dot(w, np.abs(values[d])) for d in range(m + 1)])
    # Monic polynomials give h[d] = <p^d, p^d> > 0; the flip below only
    # guards against a future change of normalization.
    for d in range(m + 1):
        if h[d] < 0.0:
            values[d] = -values[d]
            coeffs[d] = -coeffs[d]
            h[d] = -h[d]
    return PolynomialFamily(N=N, m=m, coeffs=coeffs, node_values=values, h=h, g=g, weight=weight)


def filter_coefficients(
    family: PolynomialFamily, d: int, n: int, T: float, N: int | None = None
) -> FilterCoefficients:
    """Weights c_j = C rho(j/N) p^d(j/N) with C = d! n^d / (N^(d+1) T^d h[d]).

    Applied to samples z taken at times t_i + j T/n, j = 1..N, the dot
    product sum_j c_j z_j estimates the d-th derivative at the window
    anchor t_i; it is exact for polynomial signals of degree <= d.
    """
    if N is None:
        N = family.N
    elif N != family.N:
        raise ValueError(f"window length {N} does not match family N={family.N}")
    if not 0 <= d <= family.m:
        raise ValueError(f"derivative order {d} outside family degrees 0..{family.m}")
    if n < N:
        raise ValueError(f"total sample count n={n} smaller than window N={N}")
    if T <= 0.0:
        raise ValueError(f"horizon must be positive, got {T}")
    C = math.factorial(d) * float(n) ** d / (float(N) ** (d + 1) * T**d * family.h[d])
    weights = C * family.weight.samples * family.node_values[d]
    return FilterCoefficients(d=d, weights=weights)


def filter_matrix(family: PolynomialFamily, n: int, T: float) -> np.ndarray:
    """Stack filter weights for every order 0..m into an (m+1, N) matrix."""
    return np.vstack(
        [filter_coefficients(family, d, n, T).weights for d in range(family.m + 1)]
    )
