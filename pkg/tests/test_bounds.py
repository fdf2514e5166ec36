import math

import numpy as np
import pytest

from qksim import bounds, datasets, kernels


def noise(p_tilde, layers=8):
    return kernels.NoiseModel(rate_per_layer=p_tilde, layers=layers)


class TestTheorem1Bound:
    def test_identity_kernel_ideal_term(self):
        n = 8
        y = np.array([1.0, -1.0] * 4)
        report = bounds.theorem1_bound(np.eye(n), y, 100, noise(0.0), 2)
        assert report.c1 == pytest.approx(n)
        assert report.term_ideal == pytest.approx(1.0)
        assert report.c_q == pytest.approx(1.0)

    def test_noiseless_infinite_shots_reduces_to_ideal(self):
        y = np.array([1.0, -1.0, 1.0, -1.0])
        report = bounds.theorem1_bound(np.eye(4), y, "inf", noise(0.0), 2)
        assert report.term_noise == 0.0
        assert report.c2 > 0.0
        assert report.term_ideal == pytest.approx(math.sqrt(report.c1 / 4))

    def test_noise_beyond_breakdown_is_infinite(self):
        n = 50
        y = np.array([1.0, -1.0] * 25)
        q = np.eye(n)
        threshold = bounds.breakdown_threshold(q, n, 2)
        p_tilde = min(threshold * 1.5, 1.0)
        report = bounds.theorem1_bound(q, y, 100, noise(p_tilde, layers=1), 2)
        assert report.p > threshold
        assert report.c2 == 0.0
        assert report.term_noise == math.inf

    def test_infinite_shots_with_noise_still_vacuous(self):
        y = np.array([1.0, -1.0])
        report = bounds.theorem1_bound(np.eye(2), y, "inf", noise(0.2, layers=1), 2)
        assert report.c2 == 0.0
        assert report.term_noise == math.inf

    def test_label_length_checked(self):
        with pytest.raises(ValueError):
            bounds.theorem1_bound(np.eye(3), np.ones(2), 10, noise(0.0), 2)

    def test_delta_range_checked(self):
        with pytest.raises(ValueError):
            bounds.theorem1_bound(np.eye(2), np.ones(2), 10, noise(0.0), 2, delta=1.5)


class TestBreakdownThreshold:
    def test_identity_formula(self):
        for n in (4, 10):
            got = bounds.breakdown_threshold(np.eye(n), n, 3)
            assert got == pytest.approx(1.0 / (n * (1.0 + 2.0**-4)))

    def test_hundred_points_two_qubits(self):
        got = bounds.breakdown_threshold(np.eye(100), 100, 2)
        assert got == pytest.approx(1.0 / 112.5)
        assert got == pytest.approx(8.888888888888889e-3)

    def test_doubling_n_halves_threshold(self):
        a = bounds.breakdown_threshold(np.eye(10), 10, 2)
        b = bounds.breakdown_threshold(np.eye(10), 20, 2)
        assert b == pytest.approx(a / 2)

    def test_breakdown_consistency_with_c2(self):
        # c2 collapses to zero whenever p exceeds the threshold
        n, num_qubits, delta = 30, 2, 0.05
        threshold = bounds.breakdown_threshold(np.eye(n), n, num_qubits)
        for m in (10, 100, 10**4):
            for scale in (1.0 + 1e-12, 1.1, 2.0, 10.0):
                p = min(threshold * scale, 1.0)
                c2 = bounds.c2_constant(n, m, p, 1.0, num_qubits, delta)
                assert c2 == 0.0, (m, scale)


class TestMonotonicity:
    def test_term_noise_monotone_on_grid(self):
        delta, c_q, num_qubits = 0.05, 1.0, 2
        ms = (10, 50, 100, 1000, 10**4)
        ns = (5, 20, 50, 100, 200)
        ps = (0.0, 0.01, 0.05, 0.1, 0.2, 0.3)

        def term_noise(n, m, p):
            c2 = bounds.c2_constant(n, m, p, c_q, num_qubits, delta)
            return math.inf if c2 == 0.0 else math.sqrt(n / (c2 * math.sqrt(m)))

        for n in ns:
            for p in ps:
                vals = [term_noise(n, m, p) for m in ms]
                assert all(b <= a * (1 + 1e-12) for a, b in zip(vals, vals[1:]))
        for m in ms:
            for p in ps:
                vals = [term_noise(n, m, p) for n in ns]
                assert all(b >= a * (1 - 1e-12) for a, b in zip(vals, vals[1:]))
        for n in ns:
            for m in ms:
                vals = [term_noise(n, m, p) for p in ps]
                assert all(b >= a * (1 - 1e-12) for a, b in zip(vals, vals[1:]))

    def test_cubic_shot_budget_keeps_ratio_bounded(self):
        # at m = n^3 and p = 0 the noise/ideal ratio stays below a small
        # constant (computed: 2.61 at n=5, decreasing in n)
        delta, c_q = 0.05, 1.0
        for n in range(5, 201):
            c2 = bounds.c2_constant(n, n**3, 0.0, c_q, 2, delta)
            ratio = math.sqrt(n / (c2 * math.sqrt(float(n) ** 3)))  # term_ideal = 1
            assert ratio <= 5.0, (n, ratio)


class TestSaturationDiagnostic:
    def test_equal_matrices_are_zero(self):
        rng = np.random.default_rng(0)
        x = rng.uniform(-1, 1, size=(6, 2))
        q = kernels.gram_ideal(x).matrix
        report = bounds.saturation_diagnostic(q, q, ridge=0.1)
        assert report.s2 == 0.0
        assert report.s_frob == 0.0
        assert report.lower_ok

    def test_diagonal_perturbation_closed_form(self):
        # inverses differ by eps * I on n = 4: s_frob = 2 eps, s2 = eps
        eps = 0.25
        q = np.eye(4)
        w = np.eye(4) / (1.0 + eps)
        report = bounds.saturation_diagnostic(q, w, ridge=0.0)
        assert report.s2 == pytest.approx(eps, rel=1e-12)
        assert report.s_frob == pytest.approx(2 * eps, rel=1e-12)
        assert report.lower_ok
        assert report.eps_mean == pytest.approx(eps / 4, rel=1e-12)

    def test_norm_relation_random(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            x = rng.uniform(-1, 1, size=(int(rng.integers(2, 12)), 2))
            q = kernels.gram_ideal(x)
            qt = kernels.apply_noise(q, noise(0.05), True)
            w = kernels.sample_shots(qt, 50, int(rng.integers(0, 1000)))
            report = bounds.saturation_diagnostic(q.matrix, w.matrix, ridge=2.0)
            assert report.lower_ok

    def test_error_grows_with_pool_size(self):
        # median over 20 seeds of s2 is nondecreasing across n; ridge 2.0
        # keeps every indefinite estimate invertible (worst lambda_min over
        # this sweep is about -1.06)
        medians = []
        for n in (5, 50, 100, 200):
            vals = []
            for seed in range(20):
                ds = datasets.generate_synthetic(n, 2, seed=seed)
                q = kernels.gram_ideal(ds.features)
                qt = kernels.apply_noise(q, noise(0.05), True)
                w = kernels.sample_shots(qt, 100, seed)
                vals.append(bounds.saturation_diagnostic(q.matrix, w.matrix, 2.0).s2)
            medians.append(float(np.median(vals)))
        assert all(b >= a for a, b in zip(medians, medians[1:])), medians


class TestHoeffding:
    def test_degenerate_probabilities_never_violate(self):
        for q in (0.0, 1.0):
            report = bounds.hoeffding_violation_test(q, 20, 0.1, 2000, seed=1)
            assert report.empirical_rate == 0.0
            assert report.passed

    def test_impossible_gap(self):
        report = bounds.hoeffding_violation_test(0.5, 10, 2.0, 2000, seed=2)
        assert report.empirical_rate == 0.0
        assert report.passed

    def test_fair_coin_hundred_shots(self):
        report = bounds.hoeffding_violation_test(0.5, 100, 0.2, 10**4, seed=3)
        assert report.bound == pytest.approx(2 * math.exp(-2.0))
        assert report.passed

    def test_minimum_trials_enforced(self):
        with pytest.raises(ValueError):
            bounds.hoeffding_violation_test(0.5, 10, 0.1, 10, seed=0)

    def test_invalid_probability(self):
        with pytest.raises(ValueError):
            bounds.hoeffding_violation_test(1.5, 10, 0.1, 2000, seed=0)
