import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from numpy.testing import assert_allclose

from gwca import (
    SignalStats,
    SizeMismatchError,
    build_laplacian,
    build_pair_kernels,
    cauchy_cross_bound,
    laplacian_powers,
    pad_pair,
    random_graph,
    signal_stats,
    w2_gaussian,
    w2_metric,
    w2_upper_bound,
)


def two_pass_stats(x):
    """Independent oracle: explicit two-pass population mean/variance."""
    n = len(x)
    mean = sum(x) / n
    var = sum((v - mean) ** 2 for v in x) / n
    return mean, var


class TestSignalStats:
    def test_constant_signal(self):
        s = signal_stats(np.full(7, 3.25))
        assert s.mean == 3.25
        assert s.variance == 0.0
        assert s.count == 7

    def test_plus_minus_one(self):
        s = signal_stats(np.array([1.0, -1.0]))
        assert s.mean == 0.0
        assert s.variance == 1.0

    def test_matches_two_pass_oracle(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal(100)
        s = signal_stats(x)
        mean, var = two_pass_stats(list(x))
        assert abs(s.mean - mean) < 1e-12
        assert abs(s.variance - var) < 1e-12

    @settings(max_examples=50, deadline=None)
    @given(arrays(np.float64, st.integers(1, 40), elements=st.floats(-100, 100)))
    def test_oracle_property(self, x):
        s = signal_stats(x)
        mean, var = two_pass_stats(list(x))
        assert abs(s.mean - mean) < 1e-9
        assert abs(s.variance - var) < 1e-9

    def test_empty_signal_rejected(self):
        with pytest.raises(ValueError):
            signal_stats(np.array([]))

    def test_tiny_negative_variance_clamped(self):
        s = SignalStats(0.0, -1e-13, 4)
        assert s.variance == 0.0

    def test_large_negative_variance_rejected(self):
        with pytest.raises(ValueError):
            SignalStats(0.0, -1e-6, 4)


class TestW2Gaussian:
    def test_identical_stats(self):
        s = SignalStats(1.5, 2.0, 10)
        assert w2_gaussian(s, s) == 0.0

    def test_scalar_closed_form(self):
        s1 = SignalStats(0.0, 1.0, 5)
        s2 = SignalStats(3.0, 4.0, 5)
        assert w2_gaussian(s1, s2) == pytest.approx(10.0, abs=1e-14)

    def test_symmetry(self):
        s1 = SignalStats(-1.0, 0.3, 4)
        s2 = SignalStats(2.0, 1.7, 9)
        assert w2_gaussian(s1, s2) == w2_gaussian(s2, s1)

    def test_metric_is_square_root(self):
        s1 = SignalStats(0.0, 1.0, 5)
        s2 = SignalStats(3.0, 4.0, 5)
        assert w2_metric(s1, s2) == pytest.approx(math.sqrt(10.0))

    def test_matches_sorted_sample_transport_oracle(self):
        # quantile coupling is the exact 1-D optimal transport plan
        rng = np.random.default_rng(1)
        for mu1, v1, mu2, v2 in [(0.0, 1.0, 1.0, 0.5), (-2.0, 0.25, 0.5, 2.0)]:
            a = np.sort(rng.normal(mu1, math.sqrt(v1), size=1_000_000))
            b = np.sort(rng.normal(mu2, math.sqrt(v2), size=1_000_000))
            empirical = float(np.mean((a - b) ** 2))
            closed = w2_gaussian(SignalStats(mu1, v1, 1), SignalStats(mu2, v2, 1))
            assert abs(closed - empirical) / empirical < 1e-2

    def test_metric_axioms_on_random_triples(self):
        rng = np.random.default_rng(2)
        for _ in range(500):
            a, b, c = (SignalStats(rng.uniform(-5, 5), rng.uniform(0, 4), 1) for _ in range(3))
            dab, dbc, dac = w2_metric(a, b), w2_metric(b, c), w2_metric(a, c)
            assert dab >= 0
            assert abs(dab - w2_metric(b, a)) < 1e-10
            assert w2_metric(a, a) == 0.0
            assert dac <= dab + dbc + 1e-10


def direct_stats(power, features, w):
    """Filtered-signal statistics straight from the definitions."""
    x = power @ features @ w
    return signal_stats(x)


class TestPairKernels:
    def test_order_zero_closed_forms(self):
        n = 4
        eye = [np.eye(n)]
        kernels = build_pair_kernels(eye, eye, 0)
        assert_allclose(kernels.k_mu1, np.full((n, n), 1 / 16), atol=1e-15)
        centering = np.eye(n) - np.full((n, n), 1 / n)
        assert_allclose(kernels.k_sigma1, centering / n, atol=1e-15)

    def test_order_zero_depends_only_on_node_count(self):
        rng = np.random.default_rng(3)
        g1 = random_graph(rng, 6, 0.3, 1)
        g2 = random_graph(rng, 6, 0.9, 1)
        k1 = build_pair_kernels(
            laplacian_powers(build_laplacian(g1), 0), laplacian_powers(build_laplacian(g1), 0), 0
        )
        k2 = build_pair_kernels(
            laplacian_powers(build_laplacian(g2), 0), laplacian_powers(build_laplacian(g2), 0), 0
        )
        for field in ("k_mu1", "k_mu2", "k_mu12", "k_sigma1", "k_sigma2", "k_sigma12"):
            assert_allclose(getattr(k1, field), getattr(k2, field), atol=1e-15)

    def test_quadratic_forms_reproduce_statistics(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            n = int(rng.integers(2, 20))
            d1, d2 = int(rng.integers(1, 5)), int(rng.integers(1, 5))
            k = int(rng.integers(0, 5))
            g1 = random_graph(rng, n, rng.uniform(0.2, 0.9), d1)
            g2 = random_graph(rng, n, rng.uniform(0.2, 0.9), d2)
            p1 = laplacian_powers(build_laplacian(g1), k)
            p2 = laplacian_powers(build_laplacian(g2), k)
            kernels = build_pair_kernels(p1, p2, k)
            w1, w2 = rng.standard_normal(d1), rng.standard_normal(d2)
            a, b = g1.features @ w1, g2.features @ w2
            s1 = direct_stats(p1[k], g1.features, w1)
            s2 = direct_stats(p2[k], g2.features, w2)
            assert a @ kernels.k_mu1 @ a == pytest.approx(s1.mean**2, abs=1e-10, rel=1e-10)
            assert b @ kernels.k_mu2 @ b == pytest.approx(s2.mean**2, abs=1e-10, rel=1e-10)
            assert a @ kernels.k_mu12 @ b == pytest.approx(s1.mean * s2.mean, abs=1e-10, rel=1e-10)
            assert a @ kernels.k_sigma1 @ a == pytest.approx(s1.variance, abs=1e-10, rel=1e-10)
            assert b @ kernels.k_sigma2 @ b == pytest.approx(s2.variance, abs=1e-10, rel=1e-10)

    def test_mean_and_variance_kernels_are_psd(self):
        rng = np.random.default_rng(5)
        g1 = random_graph(rng, 10, 0.5, 1)
        g2 = random_graph(rng, 10, 0.5, 1)
        kernels = build_pair_kernels(
            laplacian_powers(build_laplacian(g1), 3), laplacian_powers(build_laplacian(g2), 3), 3
        )
        for name in ("k_mu1", "k_mu2", "k_sigma1", "k_sigma2"):
            m = getattr(kernels, name)
            assert np.abs(m - m.T).max() < 1e-9
            assert np.linalg.eigvalsh(m).min() >= -1e-9

    def test_unequal_sizes_rejected(self):
        with pytest.raises(SizeMismatchError):
            build_pair_kernels([np.eye(3)], [np.eye(5)], 0)


class TestCauchyCrossBound:
    def test_equality_on_identical_signals(self):
        rng = np.random.default_rng(6)
        x = rng.standard_normal(15)
        xc = x - x.mean()
        lhs, rhs = cauchy_cross_bound(xc, xc)
        assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_orthogonal_signals(self):
        x1 = np.array([1.0, -1.0, 0.0, 0.0])
        x2 = np.array([0.0, 0.0, 1.0, -1.0])
        lhs, rhs = cauchy_cross_bound(x1, x2)
        assert rhs == 0.0
        assert lhs >= 0.0

    def test_holds_on_random_instances(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            n = 20
            x1 = rng.standard_normal(n)
            x2 = rng.standard_normal(n)
            lhs, rhs = cauchy_cross_bound(x1 - x1.mean(), x2 - x2.mean())
            assert lhs >= rhs - 1e-12

    def test_length_mismatch(self):
        with pytest.raises(SizeMismatchError):
            cauchy_cross_bound(np.zeros(3), np.zeros(4))


class TestW2UpperBound:
    def test_zero_weights_give_zero(self):
        rng = np.random.default_rng(8)
        g1, g2 = random_graph(rng, 6, 0.5, 2), random_graph(rng, 6, 0.5, 3)
        kernels = build_pair_kernels(
            laplacian_powers(build_laplacian(g1), 1), laplacian_powers(build_laplacian(g2), 1), 1
        )
        assert w2_upper_bound(kernels, g1.features, g2.features, np.zeros(2), np.zeros(3)) == 0.0

    def test_duplicated_graph_gives_zero(self):
        rng = np.random.default_rng(9)
        g = random_graph(rng, 8, 0.5, 3)
        powers = laplacian_powers(build_laplacian(g), 2)
        kernels = build_pair_kernels(powers, powers, 2)
        w = rng.standard_normal(3)
        assert abs(w2_upper_bound(kernels, g.features, g.features, w, w)) < 1e-12

    def test_dominates_exact_distance(self):
        rng = np.random.default_rng(10)
        for _ in range(100):
            n1, n2 = int(rng.integers(2, 15)), int(rng.integers(2, 15))
            d1, d2 = int(rng.integers(1, 4)), int(rng.integers(1, 4))
            k = int(rng.integers(0, 4))
            g1, g2 = pad_pair(
                random_graph(rng, n1, 0.5, d1), random_graph(rng, n2, 0.5, d2)
            )
            p1 = laplacian_powers(build_laplacian(g1), k)
            p2 = laplacian_powers(build_laplacian(g2), k)
            kernels = build_pair_kernels(p1, p2, k)
            w1, w2 = rng.standard_normal(d1), rng.standard_normal(d2)
            bound = w2_upper_bound(kernels, g1.features, g2.features, w1, w2)
            exact = w2_gaussian(
                direct_stats(p1[k], g1.features, w1), direct_stats(p2[k], g2.features, w2)
            )
            assert bound >= exact - 1e-9
