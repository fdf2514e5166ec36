"""Dense symmetric linear algebra with explicit numerical contracts.

All matrices handled here are real, symmetric ``numpy`` arrays.  The
eigendecomposition is delegated to LAPACK (``numpy.linalg.eigh``) and
re-exposed with a fixed ordering and sign convention so that every
downstream consumer sees deterministic output:

* eigenvalues sorted descending,
* eigenvector columns scaled so their first nonzero component is >= 0.

Ordering among exactly equal eigenvalues is unspecified; consumers must
not depend on it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Relative clamp for nearly-PSD inputs: eigenvalues in
# [-PSD_CLAMP_REL * lambda_max, 0) are treated as zero.
PSD_CLAMP_REL = 1e-9

# (lambda_min + ridge) below this is a singular system.
SINGULAR_TOL = 1e-14


class SingularMatrixError(ValueError):
    """Matrix (plus ridge) is singular or indefinite beyond tolerance."""


class NotPSDError(ValueError):
    """Matrix has negative eigenvalues beyond the PSD clamp tolerance."""


def as_matrix(m: np.ndarray | object) -> np.ndarray:
    """Accept a bare array or anything exposing a ``.matrix`` attribute."""
    inner = getattr(m, "matrix", m)
    return np.asarray(inner, dtype=float)


def sym_matrix(entries: np.ndarray) -> np.ndarray:
    """Build a symmetric matrix by mirroring the upper triangle.

    Rejects non-square or non-finite input.  The result satisfies
    ``entries[i, j] == entries[j, i]`` exactly.
    """
    a = np.asarray(entries, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise ValueError("matrix dimension must be >= 1")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    upper = np.triu(a)
    return upper + np.triu(a, 1).T


def check_symmetric(m: np.ndarray | object, name: str = "matrix") -> np.ndarray:
    """Validate a symmetric matrix with finite entries; returns float64 view."""
    a = as_matrix(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    if not np.array_equal(a, a.T):
        # tolerate roundoff-level asymmetry from upstream float arithmetic
        if np.max(np.abs(a - a.T)) > 1e-12 * max(1.0, np.max(np.abs(a))):
            raise ValueError(f"{name} is not symmetric")
    return a


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues sorted descending; column k of ``eigenvectors`` pairs with
    ``eigenvalues[k]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return sym_matrix(v @ np.diag(self.eigenvalues) @ v.T)


def _fix_column_signs(v: np.ndarray) -> np.ndarray:
    """Flip eigenvector columns so the first nonzero component is >= 0."""
    v = v.copy()
    for k in range(v.shape[1]):
        col = v[:, k]
        nz = np.nonzero(np.abs(col) > 1e-12)[0]
        if nz.size and col[nz[0]] < 0:
            v[:, k] = -col
    return v


def eig_sym(m: np.ndarray | object) -> EigenDecomposition:
    """Spectral decomposition of a symmetric matrix.

    Deterministic for a fixed input: descending eigenvalue order plus the
    column sign convention above.
    """
    a = check_symmetric(m)
    vals, vecs = np.linalg.eigh(a)
    order = np.argsort(vals)[::-1]
    return EigenDecomposition(
        eigenvalues=np.ascontiguousarray(vals[order]),
        eigenvectors=_fix_column_signs(vecs[:, order]),
    )


def mat_sqrt_psd(m: np.ndarray | object) -> np.ndarray:
    """Symmetric square root of a PSD matrix.

    Eigenvalues in ``[-1e-9 * lambda_max, 0)`` are clamped to zero;
    anything below that raises :class:`NotPSDError`.
    """
    dec = eig_sym(m)
    lam = dec.eigenvalues
    lam_max = max(float(lam[0]), 0.0)
    if float(lam[-1]) < -PSD_CLAMP_REL * lam_max:
        raise NotPSDError(
            f"matrix is not PSD: lambda_min={lam[-1]:.3e}, lambda_max={lam[0]:.3e}"
        )
    root = np.sqrt(np.clip(lam, 0.0, None))
    v = dec.eigenvectors
    return sym_matrix(v @ np.diag(root) @ v.T)


def inv_ridge(m: np.ndarray | object, ridge: float = 0.0) -> np.ndarray:
    """Inverse of ``m + ridge * I`` through the eigendecomposition.

    Raises :class:`SingularMatrixError` when ``lambda_min + ridge`` is not
    safely positive.
    """
    if ridge < 0:
        raise ValueError(f"ridge must be nonnegative, got {ridge}")
    dec = eig_sym(m)
    shifted = dec.eigenvalues + ridge
    if float(shifted[-1]) <= SINGULAR_TOL:
        raise SingularMatrixError(
            f"singular system: lambda_min + ridge = {shifted[-1]:.3e}"
        )
    v = dec.eigenvectors
    return sym_matrix(v @ np.diag(1.0 / shifted) @ v.T)


def spectral_norm(m: np.ndarray | object) -> float:
    """Largest eigenvalue magnitude of a symmetric matrix."""
    a = check_symmetric(m)
    return float(np.max(np.abs(np.linalg.eigvalsh(a))))


def frobenius_norm(m: np.ndarray | object) -> float:
    a = check_symmetric(m)
    return float(np.linalg.norm(a, "fro"))


@dataclass(frozen=True)
class InversePerturbationReport:
    """Result of checking the inverse-perturbation inequality on a pair.

    ``lhs`` is the spectral norm of the inverse difference, ``rhs`` the
    bound built from the base inverse and the raw perturbation.  When the
    perturbation is too large for the inequality to apply, ``applicable``
    is False and ``passed`` is vacuously True.
    """

    applicable: bool
    lhs: float
    rhs: float
    passed: bool


def _inv_nonsingular(m: np.ndarray, name: str) -> np.ndarray:
    """Inverse of a symmetric matrix that may be indefinite but not singular."""
    dec = eig_sym(m)
    lam = dec.eigenvalues
    if np.min(np.abs(lam)) <= SINGULAR_TOL * max(1.0, float(np.max(np.abs(lam)))):
        raise SingularMatrixError(f"{name} is singular within tolerance")
    v = dec.eigenvectors
    return sym_matrix(v @ np.diag(1.0 / lam) @ v.T)


def inverse_perturbation_check(
    a: np.ndarray | object, b: np.ndarray | object
) -> InversePerturbationReport:
    """Verify ``||A^-1 - B^-1|| <= ||A^-1||^2 ||A-B|| / (1 - ||A^-1 (A-B)||)``.

    Both matrices must be nonsingular (definiteness is not required);
    norms are spectral.  Applies only when ``||A^-1 (A - B)|| < 1``.
    """
    am = check_symmetric(a, "A")
    bm = check_symmetric(b, "B")
    if am.shape != bm.shape:
        raise ValueError(f"shape mismatch: {am.shape} vs {bm.shape}")
    a_inv = _inv_nonsingular(am, "A")
    b_inv = _inv_nonsingular(bm, "B")
    diff = am - bm
    coupling = float(np.linalg.norm(a_inv @ diff, 2))
    if coupling >= 1.0:
        return InversePerturbationReport(
            applicable=False, lhs=float("nan"), rhs=float("nan"), passed=True
        )
    lhs = float(np.linalg.norm(a_inv - b_inv, 2))
    rhs = spectral_norm(a_inv) ** 2 * float(np.linalg.norm(diff, 2)) / (1.0 - coupling)
    return InversePerturbationReport(
        applicable=True, lhs=lhs, rhs=rhs, passed=lhs <= rhs * (1.0 + 1e-9)
    )


def save_matrix_csv(m: np.ndarray | object, path) -> None:
    """One row per line, comma-separated, 17 significant digits."""
    a = as_matrix(m)
    with open(path, "w", encoding="utf-8") as fh:
        for row in np.atleast_2d(a):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def load_matrix_csv(path) -> np.ndarray:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append([float(tok) for tok in line.split(",")])
    if not rows:
        raise ValueError(f"empty matrix file: {path}")
    return np.asarray(rows, dtype=float)
