"""The analytical error envelopes: frozen-value examples and soundness sweeps."""

import math

import numpy as np
import pytest
from scipy import integrate as sci_integrate

from hyperjerk.differentiator import estimate_derivatives, plan_windows
from hyperjerk.orthopoly import filter_matrix, orthogonal_family
from hyperjerk.theory import (
    FilterBoundInputs,
    MAEBoundInputs,
    bias_bound,
    delta_theta_mae_bound,
    epsilon_n,
    head_body_tail,
    mse_bound,
    variance_bound,
    wedin_s_bound,
)


def make_inputs(**kw):
    base = dict(M=1.0, T=1.0, d=1, N=10, n=100, g_over_h=4.0, s=1.0, h=0.25)
    base.update(kw)
    return FilterBoundInputs(**base)


class TestFilterBounds:
    def test_bias_zero_for_polynomials(self):
        assert bias_bound(make_inputs(M=0.0)) == 0.0

    def test_bias_direct_product(self):
        assert bias_bound(make_inputs(M=1.0, T=1.0, d=1, N=10, n=100, g_over_h=4.0)) == (
            pytest.approx(0.2)
        )

    def test_bias_order_zero(self):
        assert bias_bound(make_inputs(M=2.0, d=0, N=5, n=10, g_over_h=1.0)) == pytest.approx(1.0)

    def test_variance_moving_average(self):
        sigma = 0.7
        inputs = make_inputs(d=0, N=4, n=16, s=sigma, h=1.0)
        assert variance_bound(inputs) == pytest.approx(sigma**2 / 4)

    def test_variance_noiseless(self):
        assert variance_bound(make_inputs(s=0.0)) == 0.0

    def test_variance_forward_difference(self):
        # matches the exact variance 2 (n/T)^2 sigma^2 = 32 of the two-point rule
        inputs = make_inputs(d=1, N=2, n=4, T=1.0, s=0.25, h=1.0 / 16.0)
        assert variance_bound(inputs) == pytest.approx(32.0)

    def test_mse_composition(self):
        inputs = make_inputs()
        assert mse_bound(inputs) == pytest.approx(bias_bound(inputs) ** 2 + variance_bound(inputs))
        assert mse_bound(make_inputs(M=0.0)) == pytest.approx(variance_bound(inputs))
        assert mse_bound(make_inputs(s=0.0)) == pytest.approx(bias_bound(inputs) ** 2)

    def test_validation(self):
        with pytest.raises(ValueError):
            make_inputs(M=-1.0)
        with pytest.raises(ValueError):
            make_inputs(T=0.0)


class TestEpsilonN:
    def test_order_zero_unit_constants(self):
        # at m = 0 the leading factor is 2 * 1^(1/3), so unit constants over
        # two windows give exactly 1
        assert epsilon_n(1.0, 1.0, 0, 2) == pytest.approx(1.0)

    def test_zero_bias_constant(self):
        assert epsilon_n(0.0, 1.0, 1, 3) == 0.0

    def test_calculator_value(self):
        # 2 * 3^(1/5) * 8^(2/5), recomputed independently
        assert epsilon_n(1.0, 8.0, 1, 1) == pytest.approx(5.7238763, rel=1e-7)

    def test_dominates_the_exact_optimum(self):
        # the constant rounds the exact optimized coefficient
        # r^(2/(2m+3)) + r^(-(2m+1)/(2m+3)), r = (2m+1)/2, upward
        for m in (0, 1, 2, 3):
            q = 2 * m + 3
            r = (2 * m + 1) / 2.0
            exact = r ** (2.0 / q) + r ** (-(2.0 * m + 1.0) / q)
            assert epsilon_n(1.0, 1.0, m, 1) >= exact

    def test_validation(self):
        with pytest.raises(ValueError):
            epsilon_n(-1.0, 1.0, 0, 1)
        with pytest.raises(ValueError):
            epsilon_n(1.0, 1.0, 0, 0)

class TestWedinBound:
    def test_substitution(self):
        assert wedin_s_bound(2.0, 1.0, 1.0) == pytest.approx(1.0)

    def test_clamp_branch(self):
        assert wedin_s_bound(1.0, 2.0, 1.0) == pytest.approx(6.0)

    def test_unperturbed_limit(self):
        assert wedin_s_bound(1.0, 0.0, 1e-9) == pytest.approx(2e-9, rel=1e-6)

    def test_envelope_on_random_matrices(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            rows = rng.integers(3, 12)
            cols = rng.integers(1, min(rows, 5) + 1)
            A = rng.normal(size=(rows, cols))
            sigma = np.linalg.svd(A, compute_uv=False).min()
            if sigma < 1e-6:
                continue
            D = rng.normal(size=(rows, cols))
            delta = np.linalg.norm(D, 2)
            for lam in (0.05, 0.5):
                B = np.linalg.pinv(np.vstack([np.zeros((cols, cols)), A]))
                B_hat = np.linalg.pinv(np.vstack([lam * np.eye(cols), A + D]))
                S = np.linalg.norm(B - B_hat, 2)
                assert S <= wedin_s_bound(sigma, delta, lam) * (1 + 1e-9)


class TestHeadBodyTail:
    def test_head_value(self):
        s_head, s_body, s_tail = head_body_tail(2.0, 1.0, 0.0, lambda v: 1.0)
        assert s_head == pytest.approx(1.0)

    def test_point_mass_at_zero(self):
        s_head, s_body, s_tail = head_body_tail(2.0, 1.0, 0.0, lambda v: 1.0)
        assert s_body == pytest.approx(0.0, abs=1e-12)
        assert s_tail == 0.0

    def test_chebyshev_tail_against_quadrature_oracle(self):
        # P(delta > v) = min(1, 1/v^2), lambda = 1, sigma = 2
        sigma, lam = 2.0, 1.0

        def cdf(v):
            return 1.0 - min(1.0, 1.0 / v**2) if v > 0 else 0.0

        def integrand(v):
            return 3.0 * (lam + sigma) * min(1.0, 1.0 / v**2) / (sigma * (lam + sigma - v) ** 2)

        oracle, err = sci_integrate.quad(integrand, lam, sigma, epsabs=1e-12, epsrel=1e-10)
        assert err < 1e-8
        _, s_body, _ = head_body_tail(sigma, lam, 0.0, cdf)
        assert s_body == pytest.approx(oracle, rel=1e-5)

    def test_tail_uses_supplied_moment(self):
        _, _, s_tail = head_body_tail(2.0, 0.5, 0.8, lambda v: 1.0)
        assert s_tail == pytest.approx(4.0 * 0.8 / (2.0 * 0.5))

    def test_lambda_must_be_below_sigma(self):
        with pytest.raises(ValueError):
            head_body_tail(1.0, 1.0, 0.0, lambda v: 1.0)
        with pytest.raises(ValueError):
            head_body_tail(1.0, 2.0, 0.0, lambda v: 1.0)


UNIT_MAE = dict(
    eps_N=1.0, eps_N_m=1.0, sigma_bar=1.0, U_bar=1.0, C_phi=1.0,
    alpha=1.0, m=0, n=1, n_prime=1, lam=1.0,
)


class TestDeltaThetaBound:
    def test_all_unit_constants(self):
        breakdown = delta_theta_mae_bound(MAEBoundInputs(**UNIT_MAE))
        assert breakdown.predictor_noise == pytest.approx(1.0)
        assert breakdown.head == pytest.approx(4.0)
        assert breakdown.body == pytest.approx(6.0)
        assert breakdown.tail == pytest.approx(4.0)
        assert breakdown.cross == pytest.approx(4.0)
        assert breakdown.total == pytest.approx(19.0)

    def test_noiseless_limit_reduces_to_head(self):
        inputs = MAEBoundInputs(**{**UNIT_MAE, "eps_N": 0.0, "eps_N_m": 0.0, "n_prime": 4})
        breakdown = delta_theta_mae_bound(inputs)
        assert breakdown.total == pytest.approx(breakdown.head)
        assert breakdown.head == pytest.approx(4.0 * 1.0 * 1.0 / (1.0 * 2.0))

    def test_lambda_star_makes_leading_rate_dominate(self):
        # with lam = lambda_star and n' ~ n^(1/(2m+3)), the bound decays like
        # n^(-alpha/(2m+3)); check the fitted log-log slope at large n
        from hyperjerk.estimator import lambda_star

        m, alpha, C_phi = 1, 1.0, 2.0
        q = 2 * m + 3
        values = []
        ns = [10**3, 10**6, 10**9]
        for n in ns:
            n_prime = max(1.0, n ** (1.0 / q))
            lam = lambda_star(C_phi, 1.0, alpha, m, n, int(n_prime))
            inputs = MAEBoundInputs(
                eps_N=1.0, eps_N_m=1.0, sigma_bar=2.0, U_bar=3.0, C_phi=C_phi,
                alpha=alpha, m=m, n=n, n_prime=n_prime, lam=lam,
            )
            values.append(delta_theta_mae_bound(inputs).total)
        slope = (math.log(values[2]) - math.log(values[1])) / (math.log(ns[2]) - math.log(ns[1]))
        assert slope == pytest.approx(-alpha / q, abs=0.15 * alpha / q)
        assert all(math.isfinite(v) and v > 0 for v in values)

    def test_validation(self):
        with pytest.raises(ValueError):
            MAEBoundInputs(**{**UNIT_MAE, "sigma_bar": 0.0})
        with pytest.raises(ValueError):
            MAEBoundInputs(**{**UNIT_MAE, "lam": 0.0})
        with pytest.raises(ValueError):
            MAEBoundInputs(**{**UNIT_MAE, "alpha": 1.2})


class TestFilterEnvelopeSweep:
    """Exact bias and variance of the filter never exceed their envelopes."""

    def _check_signal(self, f, df, sup_dnext, N, n, T, m):
        plan = plan_windows(n, N)
        family = orthogonal_family(N, m)
        times = np.arange(1, n + 1) * (T / n)
        y = f(times)
        noiseless = estimate_derivatives(y, T, m, plan)
        anchors = plan.start_times(T)
        span = N * T / n
        W = filter_matrix(family, n, T)
        for d in range(m + 1):
            truth = df(anchors, d)
            for i, t_i in enumerate(anchors):
                inputs = FilterBoundInputs(
                    M=sup_dnext(t_i, t_i + span, d + 1),
                    T=T,
                    d=d,
                    N=N,
                    n=n,
                    g_over_h=family.g[d] / family.h[d],
                    s=math.sqrt(np.sum(family.weight.samples**2 * family.node_values[d] ** 2) / N),
                    h=family.h[d],
                )
                exact_bias = abs(noiseless.values[i, d] - truth[i])
                assert exact_bias <= bias_bound(inputs) * (1 + 1e-9) + 1e-12
            # unit noise variance: exact filter variance vs envelope
            exact_var = float(np.sum(W[d] ** 2))
            assert exact_var <= variance_bound(inputs) * (1 + 1e-9)

    @pytest.mark.parametrize("N,n", [(8, 64), (16, 64), (16, 128)])
    @pytest.mark.parametrize("m", [1, 2])
    def test_sin_exp_poly(self, N, n, m):
        T = 1.5
        omega = 3.0

        def sup_sin(a, b, k):
            return omega**k  # global sup of the k-th derivative of sin

        self._check_signal(
            lambda t: np.sin(omega * t),
            lambda t, d: omega**d * np.sin(omega * t + d * math.pi / 2),
            sup_sin,
            N, n, T, m,
        )
        self._check_signal(
            lambda t: np.exp(t),
            lambda t, d: np.exp(t),
            lambda a, b, k: math.exp(b),
            N, n, T, m,
        )
        coeffs = [0.3, -1.0, 2.0, 0.5]  # cubic

        def poly_d(t, d):
            return np.polynomial.polynomial.polyval(
                t, np.polynomial.polynomial.polyder(coeffs, d)
            )

        def sup_poly(a, b, k):
            if k > 3:
                return 0.0
            dk = np.polynomial.polynomial.polyder(coeffs, k)
            grid = np.linspace(a, b, 33)
            return float(np.abs(np.polynomial.polynomial.polyval(grid, dk)).max())

        self._check_signal(
            lambda t: np.polynomial.polynomial.polyval(t, coeffs),
            poly_d,
            sup_poly,
            N, n, T, m,
        )
