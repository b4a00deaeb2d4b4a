"""Parameter estimation for hyperjerk systems.

Estimates the parameter vector of a continuous-time system whose state is
the stack of output derivatives and whose top derivative is linear in the
parameter, from noisy uniformly sampled output: windowed orthogonal
polynomial filters recover the derivatives, and block-ridge least squares
inverts the dynamics.  Companion modules evaluate the finite-sample error
envelopes and benchmark the estimator end to end.
"""

__version__ = "0.1.0"

from .differentiator import (
    DerivativeEstimates,
    WindowPlan,
    estimate_derivatives,
    plan_windows,
    select_window_size,
)
from .estimator import (
    Estimate,
    FeatureMap,
    RegressionProblem,
    SingularProblemError,
    build_regression,
    lambda_star,
    polynomial_feature_map,
    ridge_solve,
)
from .orthopoly import (
    FilterCoefficients,
    PolynomialFamily,
    WeightFunction,
    filter_coefficients,
    inner_product,
    orthogonal_family,
    uniform_weight,
)
from .simulator import (
    IntegrationDivergedError,
    NoiseModel,
    SystemModel,
    Trajectory,
    harmonic_oscillator,
    integrate,
    observe,
    van_der_pol,
)

__all__ = [
    "__version__",
    "DerivativeEstimates",
    "Estimate",
    "FeatureMap",
    "FilterCoefficients",
    "IntegrationDivergedError",
    "NoiseModel",
    "PolynomialFamily",
    "RegressionProblem",
    "SingularProblemError",
    "SystemModel",
    "Trajectory",
    "WeightFunction",
    "WindowPlan",
    "build_regression",
    "estimate_derivatives",
    "filter_coefficients",
    "harmonic_oscillator",
    "inner_product",
    "integrate",
    "lambda_star",
    "observe",
    "orthogonal_family",
    "plan_windows",
    "polynomial_feature_map",
    "ridge_solve",
    "select_window_size",
    "uniform_weight",
    "van_der_pol",
]
