import numpy as np
import pytest

from qksim import linalg


def random_symmetric(rng, dim):
    a = rng.normal(size=(dim, dim))
    return linalg.sym_matrix((a + a.T) / 2)


class TestSymMatrix:
    def test_mirrors_upper_triangle(self):
        a = np.array([[1.0, 2.0], [99.0, 3.0]])
        s = linalg.sym_matrix(a)
        assert s[1, 0] == s[0, 1] == 2.0

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            linalg.sym_matrix(np.zeros((2, 3)))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            linalg.sym_matrix(np.array([[1.0, np.nan], [np.nan, 1.0]]))


class TestEigSym:
    def test_already_diagonal(self):
        dec = linalg.eig_sym(np.diag([2.0, -1.0]))
        assert np.allclose(dec.eigenvalues, [2.0, -1.0])
        assert np.allclose(dec.eigenvectors, np.eye(2))

    def test_identity(self):
        dec = linalg.eig_sym(np.eye(3))
        assert np.allclose(dec.eigenvalues, [1.0, 1.0, 1.0])

    def test_two_by_two_offdiagonal(self):
        # hand-solved characteristic polynomial: lambda^2 - 1 = 0
        dec = linalg.eig_sym(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert np.allclose(dec.eigenvalues, [1.0, -1.0], atol=1e-12)
        r = 1.0 / np.sqrt(2.0)
        assert np.allclose(dec.eigenvectors[:, 0], [r, r], atol=1e-12)
        assert np.allclose(dec.eigenvectors[:, 1], [r, -r], atol=1e-12)

    def test_sign_convention_first_nonzero_nonnegative(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            dec = linalg.eig_sym(random_symmetric(rng, 5))
            for k in range(5):
                col = dec.eigenvectors[:, k]
                nz = np.nonzero(np.abs(col) > 1e-12)[0]
                assert col[nz[0]] >= 0

    def test_reconstruction_and_orthonormality_random(self):
        # 1000 seeded random symmetric matrices, dims 2..32
        rng = np.random.default_rng(2024)
        for trial in range(1000):
            dim = int(rng.integers(2, 33))
            m = random_symmetric(rng, dim)
            dec = linalg.eig_sym(m)
            v = dec.eigenvectors
            assert np.max(np.abs(v.T @ v - np.eye(dim))) <= 1e-10
            recon_err = np.linalg.norm(dec.reconstruct() - m, "fro")
            assert recon_err <= 1e-8 * max(1.0, np.linalg.norm(m, "fro"))
            assert np.all(np.diff(dec.eigenvalues) <= 1e-12)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            linalg.eig_sym(np.array([[np.inf, 0.0], [0.0, 1.0]]))


class TestMatSqrtPsd:
    def test_identity(self):
        assert np.allclose(linalg.mat_sqrt_psd(np.eye(4)), np.eye(4))

    def test_diagonal(self):
        assert np.allclose(linalg.mat_sqrt_psd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))

    def test_random_psd_squares_back(self):
        rng = np.random.default_rng(11)
        b = rng.normal(size=(3, 3))
        a = linalg.sym_matrix(b.T @ b)
        s = linalg.mat_sqrt_psd(a)
        assert np.linalg.norm(s @ s - a, "fro") <= 1e-7 * max(1.0, np.linalg.norm(a, "fro"))

    def test_rejects_indefinite(self):
        with pytest.raises(linalg.NotPSDError):
            linalg.mat_sqrt_psd(np.diag([1.0, -0.5]))

    def test_clamps_tiny_negative(self):
        m = np.diag([1.0, -1e-12])
        s = linalg.mat_sqrt_psd(m)
        assert s[1, 1] == 0.0


class TestInvRidge:
    def test_identity_no_ridge(self):
        assert np.allclose(linalg.inv_ridge(np.eye(2), 0.0), np.eye(2))

    def test_diagonal(self):
        out = linalg.inv_ridge(np.diag([2.0, 4.0]), 0.0)
        assert np.allclose(out, np.diag([0.5, 0.25]))

    def test_ridge_shifts_spectrum(self):
        # 1/(1+1.5) and 1/(-0.5+1.5)
        out = linalg.inv_ridge(np.diag([1.0, -0.5]), 1.5)
        assert np.allclose(out, np.diag([0.4, 1.0]))

    def test_residual_contract(self):
        rng = np.random.default_rng(3)
        m = random_symmetric(rng, 8)
        ridge = abs(float(np.min(np.linalg.eigvalsh(m)))) + 1.0
        out = linalg.inv_ridge(m, ridge)
        resid = (m + ridge * np.eye(8)) @ out - np.eye(8)
        assert np.max(np.abs(resid)) <= 1e-7

    def test_eigenvalues_commute_with_eigenbasis(self):
        rng = np.random.default_rng(5)
        m = random_symmetric(rng, 6)
        ridge = abs(float(np.min(np.linalg.eigvalsh(m)))) + 0.5
        lam = np.linalg.eigvalsh(m)
        lam_inv = np.sort(1.0 / (lam + ridge))
        got = np.sort(np.linalg.eigvalsh(linalg.inv_ridge(m, ridge)))
        assert np.max(np.abs(got - lam_inv)) <= 1e-9

    def test_singular_raises(self):
        with pytest.raises(linalg.SingularMatrixError):
            linalg.inv_ridge(np.diag([1.0, 0.0]), 0.0)

    def test_negative_ridge_rejected(self):
        with pytest.raises(ValueError):
            linalg.inv_ridge(np.eye(2), -0.1)


class TestNorms:
    def test_diag_example(self):
        m = np.diag([3.0, -4.0])
        assert linalg.spectral_norm(m) == pytest.approx(4.0)
        assert linalg.frobenius_norm(m) == pytest.approx(5.0)

    def test_zero(self):
        z = np.zeros((3, 3))
        assert linalg.spectral_norm(z) == 0.0
        assert linalg.frobenius_norm(z) == 0.0

    def test_identity(self):
        for n in (1, 4, 9):
            assert linalg.spectral_norm(np.eye(n)) == pytest.approx(1.0)
            assert linalg.frobenius_norm(np.eye(n)) == pytest.approx(np.sqrt(n))

    def test_norm_sandwich(self):
        # spectral <= frobenius <= sqrt(dim) * spectral
        rng = np.random.default_rng(17)
        for _ in range(200):
            dim = int(rng.integers(1, 16))
            m = random_symmetric(rng, dim)
            s = linalg.spectral_norm(m)
            f = linalg.frobenius_norm(m)
            assert s <= f + 1e-12
            assert f <= np.sqrt(dim) * s + 1e-12


class TestInversePerturbation:
    def test_equal_matrices(self):
        report = linalg.inverse_perturbation_check(np.eye(3), np.eye(3))
        assert report.applicable
        assert report.lhs == 0.0
        assert report.rhs == 0.0
        assert report.passed

    def test_hand_example(self):
        # lhs = 1 - 1/1.1, rhs = 0.1 / 0.9
        report = linalg.inverse_perturbation_check(np.eye(2), np.diag([1.1, 1.0]))
        assert report.applicable
        assert report.lhs == pytest.approx(1.0 - 1.0 / 1.1, abs=1e-12)
        assert report.rhs == pytest.approx(0.1 / 0.9, abs=1e-12)
        assert report.passed

    def test_random_pairs_never_violate(self):
        # 1000 seeded (A, A + E) pairs with small E: the inequality is a
        # theorem, so every applicable pair must pass
        rng = np.random.default_rng(99)
        applicable = 0
        for _ in range(1000):
            dim = int(rng.integers(2, 9))
            base = random_symmetric(rng, dim) + np.eye(dim) * (dim + 1)
            pert = random_symmetric(rng, dim) * 0.05
            report = linalg.inverse_perturbation_check(base, base + pert)
            assert report.passed
            applicable += report.applicable
        assert applicable > 900

    def test_inapplicable_when_perturbation_large(self):
        report = linalg.inverse_perturbation_check(np.eye(2), np.diag([5.0, 1.0]))
        assert not report.applicable
        assert report.passed

    def test_singular_input_raises(self):
        with pytest.raises(linalg.SingularMatrixError):
            linalg.inverse_perturbation_check(np.diag([1.0, 0.0]), np.eye(2))


class TestMatrixCsv:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(1)
        m = random_symmetric(rng, 5)
        path = tmp_path / "m.csv"
        linalg.save_matrix_csv(m, path)
        back = linalg.load_matrix_csv(path)
        assert np.array_equal(m, back)
