"""Orthogonal family construction, filter weights, and their hand-derived oracles."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperjerk.orthopoly import (
    WeightFunction,
    filter_coefficients,
    filter_matrix,
    inner_product,
    orthogonal_family,
    uniform_weight,
)


def exact_family_fractions(N, m, rho=None):
    """Independent oracle: Gram-Schmidt in exact rational arithmetic."""
    if rho is None:
        rho = [Fraction(1)] * N
    nodes = [Fraction(j, N) for j in range(1, N + 1)]
    w = [r / N for r in rho]

    def ip(f, g):
        return sum(wi * fi * gi for wi, fi, gi in zip(w, f, g))

    polys = []
    for d in range(m + 1):
        v = [x**d for x in nodes]
        for k in range(d):
            proj = ip(v, polys[k]) / ip(polys[k], polys[k])
            v = [vi - proj * pi for vi, pi in zip(v, polys[k])]
        polys.append(v)
    h = [ip(polys[d], [x**d for x in nodes]) for d in range(m + 1)]
    g = [ip([abs(v) for v in polys[d]], [Fraction(1)] * N) for d in range(m + 1)]
    return polys, h, g


class TestInnerProduct:
    def test_constants(self):
        w = uniform_weight(2)
        assert inner_product([1.0, 1.0], [1.0, 1.0], w) == pytest.approx(1.0)

    def test_hand_sum_two_nodes(self):
        w = uniform_weight(2)
        assert inner_product([0.5, 1.0], [1.0, 1.0], w) == pytest.approx(0.75)

    def test_orthogonality_by_construction(self):
        fam = orthogonal_family(5, 2)
        w = fam.weight
        assert inner_product(fam.node_values[1], fam.node_values[0], w) == pytest.approx(
            0.0, abs=1e-14
        )

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            inner_product([1.0, 2.0, 3.0], [1.0, 2.0], uniform_weight(2))


class TestWeightFunction:
    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            WeightFunction(np.array([1.0, 0.0]))

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            WeightFunction(np.array([]))


class TestOrthogonalFamily:
    def test_two_node_family(self):
        fam = orthogonal_family(2, 1)
        assert fam.node_values[0] == pytest.approx([1.0, 1.0])
        # p^1(x) = x - 3/4 on nodes {1/2, 1}
        assert fam.coeffs[1][:2] == pytest.approx([-0.75, 1.0])
        assert fam.h[1] == pytest.approx(1.0 / 16.0)
        assert fam.g[1] == pytest.approx(0.25)

    def test_three_node_family_matches_rational_oracle(self):
        fam = orthogonal_family(3, 2)
        polys, h, g = exact_family_fractions(3, 2)
        assert fam.h[1] == pytest.approx(float(h[1]))  # 2/27
        assert fam.g[1] == pytest.approx(float(g[1]))  # 2/9
        assert h[1] == Fraction(2, 27)
        assert g[1] == Fraction(2, 9)
        for d in range(3):
            assert fam.node_values[d] == pytest.approx([float(v) for v in polys[d]])

    def test_degree_zero_is_one(self):
        fam = orthogonal_family(17, 0)
        assert fam.node_values[0] == pytest.approx(np.ones(17))
        assert fam.h[0] == pytest.approx(1.0)

    def test_monic_leading_coefficient(self):
        fam = orthogonal_family(12, 4)
        for d in range(5):
            assert fam.coeffs[d][d] == pytest.approx(1.0)
            if d + 1 <= fam.m:
                assert fam.coeffs[d][d + 1 :] == pytest.approx(np.zeros(fam.m - d))

    def test_h_positive(self):
        rng = np.random.default_rng(3)
        fam = orthogonal_family(20, 6, WeightFunction(rng.uniform(0.2, 5.0, 20)))
        assert np.all(fam.h > 0)

    def test_rank_deficiency_rejected(self):
        with pytest.raises(ValueError):
            orthogonal_family(3, 3)

    def test_degree_cap(self):
        with pytest.raises(ValueError):
            orthogonal_family(64, 9)

    def test_weight_length_mismatch(self):
        with pytest.raises(ValueError):
            orthogonal_family(4, 1, uniform_weight(5))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(3, 64), st.randoms(use_true_random=False))
    def test_orthogonality_random_weights(self, N, rnd):
        rho = np.array([0.1 + 9.9 * rnd.random() for _ in range(N)])
        m = min(N - 1, 8)
        fam = orthogonal_family(N, m, WeightFunction(rho))
        w = rho / N
        for d in range(m + 1):
            nd = np.sqrt(np.dot(w, fam.node_values[d] ** 2))
            for dd in range(d):
                ndd = np.sqrt(np.dot(w, fam.node_values[dd] ** 2))
                ip = np.dot(w, fam.node_values[d] * fam.node_values[dd])
                assert abs(ip) <= 1e-8 * nd * ndd

    def test_riemann_limit_of_h(self):
        h64 = orthogonal_family(64, 1).h[1]
        h1024 = orthogonal_family(1024, 1).h[1]
        assert abs(h64 - h1024) / h1024 < 0.05


class TestFilterCoefficients:
    def test_forward_difference(self):
        fam = orthogonal_family(2, 1)
        fc = filter_coefficients(fam, 1, n=10, T=2.0)
        assert fc.weights == pytest.approx([-5.0, 5.0])  # (-n/T, +n/T)

    def test_moving_average(self):
        fam = orthogonal_family(7, 0)
        fc = filter_coefficients(fam, 0, n=7, T=1.0)
        assert fc.weights == pytest.approx(np.full(7, 1.0 / 7.0))

    def test_three_node_first_derivative(self):
        # from p^1(x) = x - 2/3, h = 2/27: weights (-n/2T, 0, +n/2T)
        fam = orthogonal_family(3, 1)
        fc = filter_coefficients(fam, 1, n=6, T=2.0)
        assert fc.weights == pytest.approx([-1.5, 0.0, 1.5])

    def test_annihilates_constants(self):
        rng = np.random.default_rng(5)
        for d in (1, 2, 3):
            N = 16
            fam = orthogonal_family(N, d, WeightFunction(rng.uniform(0.5, 2.0, N)))
            fc = filter_coefficients(fam, d, n=64, T=1.0)
            assert abs(fc.weights.sum()) <= 1e-9 * np.abs(fc.weights).max()

    def test_moment_annihilation_and_normalization(self):
        N, n, T = 12, 48, 2.0
        for d in (1, 2, 3):
            fam = orthogonal_family(N, d)
            c = filter_coefficients(fam, d, n, T).weights
            x = fam.nodes
            for k in range(d):
                assert abs(np.dot(c, x**k)) <= 1e-8 * np.abs(c).max()
            scale = (N * T / n) ** d
            assert np.dot(c, x**d) * scale == pytest.approx(float(math.factorial(d)))

    def test_order_beyond_family(self):
        fam = orthogonal_family(8, 2)
        with pytest.raises(ValueError):
            filter_coefficients(fam, 3, n=8, T=1.0)

    def test_window_exceeds_samples(self):
        fam = orthogonal_family(8, 2)
        with pytest.raises(ValueError):
            filter_coefficients(fam, 1, n=4, T=1.0)


class TestPolynomialExactness:
    @settings(max_examples=80, deadline=None)
    @given(
        st.integers(0, 4),
        st.randoms(use_true_random=False),
    )
    def test_exact_on_low_degree_polynomials(self, d, rnd):
        N = rnd.randint(2 * (d + 1), 64)
        n = N * rnd.randint(1, 4)
        T = 0.5 + 3.0 * rnd.random()
        coeffs = [rnd.uniform(-10.0, 10.0) for _ in range(d + 1)]
        t_i = rnd.uniform(0.0, 1.0)
        fam = orthogonal_family(N, d)
        c = filter_coefficients(fam, d, n, T).weights
        tj = t_i + np.arange(1, N + 1) * (T / n)
        samples = np.polynomial.polynomial.polyval(tj, coeffs)
        est = float(np.dot(c, samples))
        truth = float(
            np.polynomial.polynomial.polyval(t_i, np.polynomial.polynomial.polyder(coeffs, d))
        )
        scale = max(abs(truth), sum(abs(a) for a in coeffs))
        assert abs(est - truth) <= 1e-6 * scale


def test_filter_matrix_stacks_all_orders():
    fam = orthogonal_family(6, 2)
    W = filter_matrix(fam, 12, 1.0)
    assert W.shape == (3, 6)
    for d in range(3):
        assert W[d] == pytest.approx(filter_coefficients(fam, d, 12, 1.0).weights)
