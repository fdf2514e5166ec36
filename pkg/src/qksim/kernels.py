"""Kernel matrix construction: ideal, noisy-expectation, shot-sampled, RBF.

The pipeline mirrors the physical estimation chain.  The ideal Gram matrix
holds pairwise state fidelities.  Depolarization acts on the measurement
output of the inversion test, which for an effective rate ``p`` turns an
entry ``q`` into ``(1 - p) * q + p * c_N`` where ``c_N`` is the mixing
constant (``2^-N`` for the uniform outcome of the maximally mixed state;
``2^-(N+1)`` reproduces the constant used by the generalization-bound
checks).  Finite measurement budgets replace each expectation with a
Bernoulli mean of ``m`` draws.

All sampling is keyed per entry through :mod:`qksim.rng`, so Gram entries
may be produced in any order with identical results.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import linalg, qsim
from .rng import EntryStreams

# provenance tags
IDEAL = "ideal"
NOISY_EXPECTATION = "noisy-expectation"
SHOT_SAMPLED = "shot-sampled"
RBF = "classical-RBF"
CALIBRATED_PREFIX = "calibrated:"

# mixing-constant variants
MIX_INVERSE_DIM = "inverse-dim"  # 2^-N, the inversion-test output
MIX_HALF_INVERSE_DIM = "half-inverse-dim"  # 2^-(N+1), bound-side constant

INF_SHOTS = math.inf


def parse_shots(value) -> float | int:
    """Accept a positive integer or the "inf" sentinel."""
    if value in ("inf", INF_SHOTS):
        return INF_SHOTS
    m = int(value)
    if m < 1:
        raise ValueError(f"shot count must be >= 1, got {value}")
    return m


@dataclass(frozen=True)
class NoiseModel:
    """Per-layer depolarization folded across the circuit depth.

    ``rate_per_layer`` is the depolarization rate applied after each of
    the ``layers`` unitary layers; the effective end-of-circuit rate is
    ``1 - (1 - rate_per_layer)^layers``.
    """

    rate_per_layer: float
    layers: int = 8
    mixing: str = MIX_INVERSE_DIM

    def __post_init__(self):
        if not 0.0 <= self.rate_per_layer <= 1.0:
            raise ValueError(
                f"rate_per_layer must be in [0, 1], got {self.rate_per_layer}"
            )
        if self.layers < 1:
            raise ValueError(f"layers must be >= 1, got {self.layers}")
        if self.mixing not in (MIX_INVERSE_DIM, MIX_HALF_INVERSE_DIM):
            raise ValueError(f"unknown mixing variant: {self.mixing!r}")

    @property
    def rate(self) -> float:
        """Effective depolarization rate p."""
        return 1.0 - (1.0 - self.rate_per_layer) ** self.layers

    def mixing_constant(self, num_qubits: int) -> float:
        if self.mixing == MIX_INVERSE_DIM:
            return 2.0 ** (-num_qubits)
        return 2.0 ** (-(num_qubits + 1))


@dataclass
class KernelMatrix:
    """A symmetric kernel matrix plus its provenance and build parameters."""

    matrix: np.ndarray
    provenance: str
    params: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def gram_ideal(x_rows: np.ndarray) -> KernelMatrix:
    """Ideal fidelity Gram matrix of the encoded feature rows.

    PSD by construction (Gram of explicit states), unit diagonal,
    entries in [0, 1].
    """
    x = np.atleast_2d(np.asarray(x_rows, dtype=float))
    states = qsim.feature_states(x)
    overlap = states @ states.conj().T
    g = np.abs(overlap) ** 2
    g = np.clip((g + g.T) / 2.0, 0.0, 1.0)
    np.fill_diagonal(g, 1.0)
    return KernelMatrix(
        matrix=g, provenance=IDEAL, params={"num_qubits": x.shape[1]}
    )


def apply_noise(
    q: KernelMatrix, noise: NoiseModel, fix_diagonal: bool = True
) -> KernelMatrix:
    """Depolarized expectation of every kernel entry.

    With ``fix_diagonal`` the diagonal stays pinned at the analytic
    self-fidelity 1; otherwise it is mixed like any other entry.
    """
    if q.provenance != IDEAL:
        raise ValueError(f"apply_noise expects an ideal kernel, got {q.provenance!r}")
    num_qubits = q.params["num_qubits"]
    p = noise.rate
    c = noise.mixing_constant(num_qubits)
    mixed = (1.0 - p) * q.matrix + p * c
    if fix_diagonal:
        np.fill_diagonal(mixed, 1.0)
    params = dict(q.params)
    params.update(
        p_tilde=noise.rate_per_layer,
        layers=noise.layers,
        p=p,
        mixing=noise.mixing,
        fix_diagonal=fix_diagonal,
    )
    if noise.mixing == MIX_HALF_INVERSE_DIM:
        params["entry_bound_ok"] = bool(
            entrywise_noise_bound_ok(q.matrix, mixed, p, num_qubits)
        )
    return KernelMatrix(matrix=mixed, provenance=NOISY_EXPECTATION, params=params)


def entrywise_noise_bound_ok(
    q: np.ndarray, q_noisy: np.ndarray, p: float, num_qubits: int
) -> bool:
    """Check |q - q_noisy| <= p * (q + 2^-(N+1)) on every off-diagonal entry."""
    bound = p * (q + 2.0 ** (-(num_qubits + 1)))
    gap = np.abs(q - q_noisy)
    off = ~np.eye(q.shape[0], dtype=bool)
    return bool(np.all(gap[off] <= bound[off] + 1e-12))


def sample_shots(qt: KernelMatrix, m, seed: int) -> KernelMatrix:
    """Bernoulli-mean estimate of each entry from ``m`` measurement shots.

    Entry (i, j), i <= j, is the mean of ``m`` draws from the stream keyed
    by ``(seed, "shots", i, j)``; the lower triangle mirrors it.  When the
    diagonal was pinned upstream it stays exactly 1.  The ``inf`` sentinel
    bypasses sampling and returns the expectation unchanged.
    """
    if qt.provenance != NOISY_EXPECTATION:
        raise ValueError(
            f"sample_shots expects a noisy-expectation kernel, got {qt.provenance!r}"
        )
    probs = qt.matrix
    if np.min(probs) < 0.0 or np.max(probs) > 1.0:
        raise ValueError("kernel entries must be probabilities in [0, 1]")
    m = parse_shots(m)
    params = dict(qt.params)
    params.update(shots="inf" if m is INF_SHOTS else int(m), seed=seed)
    if m is INF_SHOTS:
        return KernelMatrix(
            matrix=probs.copy(), provenance=qt.provenance, params=params
        )
    n = qt.dim
    fixed_diag = bool(qt.params.get("fix_diagonal", False))
    w = np.empty_like(probs)
    streams = EntryStreams(seed, "shots")
    for i in range(n):
        start = i if not fixed_diag else i + 1
        for j in range(start, n):
            w[i, j] = w[j, i] = streams.at(i, j).binomial(int(m), probs[i, j]) / m
    if fixed_diag:
        np.fill_diagonal(w, 1.0)
    return KernelMatrix(matrix=w, provenance=SHOT_SAMPLED, params=params)


def rbf_gram(x_rows: np.ndarray, gamma: float) -> KernelMatrix:
    """Gaussian kernel K_ij = exp(-gamma * ||x_i - x_j||^2)."""
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    x = np.atleast_2d(np.asarray(x_rows, dtype=float))
    k = np.exp(-gamma * _sq_dists(x, x))
    k = (k + k.T) / 2.0
    np.fill_diagonal(k, 1.0)
    return KernelMatrix(matrix=k, provenance=RBF, params={"gamma": gamma})


def rbf_cross(x_train: np.ndarray, x_test: np.ndarray, gamma: float) -> np.ndarray:
    """(n_test, n_train) Gaussian cross-kernel."""
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    xtr = np.atleast_2d(np.asarray(x_train, dtype=float))
    xte = np.atleast_2d(np.asarray(x_test, dtype=float))
    if xtr.shape[1] != xte.shape[1]:
        raise ValueError(
            f"feature width mismatch: train {xtr.shape[1]}, test {xte.shape[1]}"
        )
    return np.exp(-gamma * _sq_dists(xte, xtr))


def _sq_dists(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aa = np.sum(a**2, axis=1)[:, None]
    bb = np.sum(b**2, axis=1)[None, :]
    return np.clip(aa + bb - 2.0 * (a @ b.T), 0.0, None)


def quantum_cross(
    x_train: np.ndarray,
    x_test: np.ndarray,
    noise: NoiseModel | None = None,
    m=INF_SHOTS,
    seed: int = 0,
) -> np.ndarray:
    """(n_test, n_train) kernel through the same fidelity/noise/shot pipeline.

    Entry (t, i) uses the stream keyed by ``(seed, "cross", t, i)``.
    """
    xtr = np.atleast_2d(np.asarray(x_train, dtype=float))
    xte = np.atleast_2d(np.asarray(x_test, dtype=float))
    if xtr.shape[1] != xte.shape[1]:
        raise ValueError(
            f"feature width mismatch: train {xtr.shape[1]}, test {xte.shape[1]}"
        )
    states_tr = qsim.feature_states(xtr)
    states_te = qsim.feature_states(xte)
    fid = np.clip(np.abs(states_te @ states_tr.conj().T) ** 2, 0.0, 1.0)
    if noise is not None and noise.rate > 0.0:
        p = noise.rate
        fid = (1.0 - p) * fid + p * noise.mixing_constant(xtr.shape[1])
    m = parse_shots(m)
    if m is INF_SHOTS:
        return fid
    out = np.empty_like(fid)
    streams = EntryStreams(seed, "cross")
    for t in range(fid.shape[0]):
        for i in range(fid.shape[1]):
            out[t, i] = streams.at(t, i).binomial(int(m), fid[t, i]) / m
    return out


def geometric_difference(
    k: KernelMatrix | np.ndarray,
    q: KernelMatrix | np.ndarray,
    y: np.ndarray,
    ridge: float = 0.0,
) -> float:
    """Complexity ratio (y' K^-1 y) / (y' Q^-1 y) at the given ridge."""
    km = linalg.as_matrix(k)
    qm = linalg.as_matrix(q)
    y = np.asarray(y, dtype=float)
    if km.shape != qm.shape or km.shape[0] != y.shape[0]:
        raise ValueError("kernel/label dimension mismatch")
    num = float(y @ linalg.inv_ridge(km, ridge) @ y)
    den = float(y @ linalg.inv_ridge(qm, ridge) @ y)
    return num / den


def save_kernel(kernel: KernelMatrix, path) -> None:
    """Matrix as CSV plus a JSON sidecar with provenance and parameters."""
    path = Path(path)
    linalg.save_matrix_csv(kernel.matrix, path)
    sidecar = {"provenance": kernel.provenance, "params": kernel.params}
    path.with_suffix(path.suffix + ".json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def load_kernel(path) -> KernelMatrix:
    path = Path(path)
    matrix = linalg.load_matrix_csv(path)
    sidecar_path = path.with_suffix(path.suffix + ".json")
    provenance, params = IDEAL, {}
    if sidecar_path.exists():
        sidecar = json.loads(sidecar_path.read_text(encoding="utf-8"))
        provenance = sidecar.get("provenance", IDEAL)
        params = sidecar.get("params", {})
    return KernelMatrix(matrix=matrix, provenance=provenance, params=params)
