import numpy as np
import pytest

from qksim import qsim

from oracles import (
    fidelity_density_trace,
    state_matrix_chain,
)


class TestFeatureState:
    def test_zero_angles_single_qubit(self):
        # zero phases make both walls cancel: H H |0> = |0>
        state = qsim.feature_state(np.array([0.0]))
        assert np.allclose(state, [1.0, 0.0], atol=1e-15)

    def test_zero_angles_two_qubits(self):
        state = qsim.feature_state(np.zeros(2))
        expect = np.zeros(4)
        expect[0] = 1.0
        assert np.allclose(state, expect, atol=1e-15)

    def test_matches_matrix_chain_oracle(self):
        rng = np.random.default_rng(21)
        for num_qubits in (1, 2, 3):
            for _ in range(25):
                x = rng.uniform(-2.5, 2.5, size=num_qubits)
                got = qsim.feature_state(x)
                want = state_matrix_chain(x)
                assert np.max(np.abs(got - want)) <= 1e-12

    def test_quarter_turn_single_qubit(self):
        got = qsim.feature_state(np.array([np.pi / 4]))
        want = state_matrix_chain(np.array([np.pi / 4]))
        assert np.max(np.abs(got - want)) <= 1e-12

    def test_normalized_for_random_inputs(self):
        rng = np.random.default_rng(5)
        for num_qubits in (1, 4, 7):
            x = rng.uniform(-3, 3, size=num_qubits)
            state = qsim.feature_state(x)
            assert abs(np.sum(np.abs(state) ** 2) - 1.0) <= 1e-12

    def test_dimension_limits(self):
        with pytest.raises(ValueError):
            qsim.feature_state(np.zeros(0))
        with pytest.raises(ValueError):
            qsim.feature_state(np.zeros(qsim.MAX_QUBITS + 1))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            qsim.feature_state(np.array([np.nan, 1.0]))

    def test_batch_agrees_with_single(self):
        rng = np.random.default_rng(31)
        x = rng.uniform(-1, 1, size=(6, 3))
        batch = qsim.feature_states(x)
        for k, row in enumerate(x):
            assert np.allclose(batch[k], qsim.feature_state(row), atol=1e-14)


class TestFidelity:
    def test_self_fidelity(self):
        rng = np.random.default_rng(4)
        x = rng.uniform(-1, 1, size=3)
        assert qsim.fidelity(x, x) == pytest.approx(1.0, abs=1e-12)

    def test_zero_vectors(self):
        assert qsim.fidelity(np.zeros(2), np.zeros(2)) == pytest.approx(1.0)

    def test_symmetric(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            x1, x2 = rng.uniform(-2, 2, size=(2, 3))
            assert abs(qsim.fidelity(x1, x2) - qsim.fidelity(x2, x1)) <= 1e-12

    def test_matches_density_trace_oracle(self):
        rng = np.random.default_rng(12)
        for num_qubits in (1, 2, 3):
            for _ in range(15):
                x1, x2 = rng.uniform(-2, 2, size=(2, num_qubits))
                got = qsim.fidelity(x1, x2)
                want = fidelity_density_trace(x1, x2)
                assert abs(got - want) <= 1e-10
                assert 0.0 <= got <= 1.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            qsim.fidelity(np.zeros(2), np.zeros(3))


class TestDepolarize:
    def test_p_zero_is_identity_map(self):
        rho = qsim.density_matrix(np.array([0.3, -0.7]))
        assert np.allclose(qsim.depolarize(rho, 0.0), rho)

    def test_p_one_is_maximally_mixed(self):
        rho = qsim.density_matrix(np.array([0.3, -0.7]))
        assert np.allclose(qsim.depolarize(rho, 1.0), np.eye(4) / 4)

    def test_half_mix_single_qubit(self):
        rho = np.diag([1.0, 0.0]).astype(complex)
        out = qsim.depolarize(rho, 0.5)
        assert np.allclose(out, np.diag([0.75, 0.25]))

    def test_output_is_valid_state(self):
        rho = qsim.density_matrix(np.array([1.0, 2.0]))
        out = qsim.depolarize(rho, 0.3)
        qsim.check_density_matrix(out)

    def test_rate_out_of_range(self):
        rho = np.diag([1.0, 0.0]).astype(complex)
        with pytest.raises(ValueError):
            qsim.depolarize(rho, 1.5)


class TestNoiseFolding:
    def test_zero_rate_exact(self):
        unitaries = qsim.random_unitaries(2, 4, seed=0)
        report = qsim.verify_noise_folding(unitaries, 0.0, seed=0)
        assert report.folded_rate == 0.0
        assert report.max_abs_diff <= 1e-12
        assert report.passed

    def test_single_layer_is_definitionally_equal(self):
        unitaries = qsim.random_unitaries(1, 1, seed=3)
        report = qsim.verify_noise_folding(unitaries, 0.2, seed=3)
        assert report.folded_rate == pytest.approx(0.2)
        assert report.passed

    def test_eight_layers(self):
        unitaries = qsim.random_unitaries(2, 8, seed=7)
        report = qsim.verify_noise_folding(unitaries, 0.001, seed=7)
        assert report.folded_rate == pytest.approx(1.0 - 0.999**8)
        assert report.passed

    def test_full_grid(self):
        # every (layers, rate) cell across 20 seeds
        for layers in (1, 2, 4, 8):
            for rate in (0.0, 0.001, 0.05, 0.3):
                for seed in range(20):
                    unitaries = qsim.random_unitaries(2, layers, seed=seed)
                    report = qsim.verify_noise_folding(unitaries, rate, seed=seed)
                    assert report.passed, (layers, rate, seed, report.max_abs_diff)

    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError):
            qsim.verify_noise_folding([np.ones((2, 2))], 0.1, seed=0)

    def test_unitaries_are_unitary(self):
        for u in qsim.random_unitaries(3, 5, seed=11):
            assert np.max(np.abs(u.conj().T @ u - np.eye(8))) <= 1e-10
