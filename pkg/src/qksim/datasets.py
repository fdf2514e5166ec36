"""Data supply: CSV ingestion, PCA, synthetic generation, engineered labels.

The label-engineering step rewrites the labels of a pooled dataset so
that the quantum kernel's complexity ratio against a classical reference
kernel is maximized.  Working on the pooled (train + test) kernel
matrices is deliberate: the construction shapes kernel geometry, not
per-split label assignments.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import linalg
from .rng import stream


@dataclass
class Dataset:
    """Feature matrix with +/-1 labels and an optional train/test split."""

    features: np.ndarray
    labels: np.ndarray
    train_indices: np.ndarray | None = None
    test_indices: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def train(self) -> tuple[np.ndarray, np.ndarray]:
        if self.train_indices is None:
            raise ValueError("dataset has no split")
        return self.features[self.train_indices], self.labels[self.train_indices]

    def test(self) -> tuple[np.ndarray, np.ndarray]:
        if self.test_indices is None:
            raise ValueError("dataset has no split")
        return self.features[self.test_indices], self.labels[self.test_indices]


def _parse_label(token: str, line_no: int) -> int:
    try:
        value = float(token)
    except ValueError as exc:
        raise ValueError(f"line {line_no}: label {token!r} is not numeric") from exc
    if value in (-1.0, 1.0):
        return int(value)
    if value == 0.0:  # 0/1 labels remap to -1/+1
        return -1
    raise ValueError(f"line {line_no}: unknown label value {token!r}")


def load_csv(path) -> Dataset:
    """Read a dataset with header ``f0,...,f{d-1},label``.

    Labels must parse to +/-1; 0/1 labels are remapped to -1/+1.  Errors
    carry the offending line number.
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        cols = header.split(",") if header else []
        if len(cols) < 2 or cols[-1] != "label" or cols[:-1] != [
            f"f{k}" for k in range(len(cols) - 1)
        ]:
            raise ValueError(
                f"{path}: header must be 'f0,...,f{{d-1}},label', got {header!r}"
            )
        d = len(cols) - 1
        feats: list[list[float]] = []
        labels: list[int] = []
        for line_no, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            tokens = line.split(",")
            if len(tokens) != d + 1:
                raise ValueError(
                    f"line {line_no}: expected {d + 1} fields, got {len(tokens)}"
                )
            try:
                feats.append([float(tok) for tok in tokens[:-1]])
            except ValueError as exc:
                raise ValueError(f"line {line_no}: malformed feature value") from exc
            labels.append(_parse_label(tokens[-1], line_no))
    if not feats:
        raise ValueError(f"{path}: no data rows")
    return Dataset(
        features=np.asarray(feats, dtype=float),
        labels=np.asarray(labels, dtype=int),
    )


def save_csv(ds: Dataset, path, meta: dict | None = None) -> None:
    """Write features and labels; 17 significant digits round-trip exactly.

    A JSON sidecar records provenance when ``meta`` is given.
    """
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join([f"f{k}" for k in range(ds.dim)] + ["label"]) + "\n")
        for row, label in zip(ds.features, ds.labels):
            fh.write(
                ",".join(f"{v:.17g}" for v in row) + f",{int(label)}\n"
            )
    if meta is not None:
        path.with_suffix(path.suffix + ".json").write_text(
            json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )


def pca(features: np.ndarray, target_dim: int) -> np.ndarray:
    """Project centered features onto the top eigenvectors of the covariance.

    Output columns are ordered by explained variance (descending) and
    inherit the deterministic eigenvector sign convention.
    """
    x = np.atleast_2d(np.asarray(features, dtype=float))
    n, d = x.shape
    if target_dim < 1 or target_dim > min(n, d):
        raise ValueError(
            f"target_dim must be in [1, {min(n, d)}], got {target_dim}"
        )
    centered = x - np.mean(x, axis=0)
    cov = linalg.sym_matrix(centered.T @ centered / max(n - 1, 1))
    dec = linalg.eig_sym(cov)
    rank = int(np.sum(dec.eigenvalues > 1e-12 * max(float(dec.eigenvalues[0]), 1e-30)))
    if target_dim > rank:
        raise ValueError(
            f"data rank is {rank}, cannot extract {target_dim} components"
        )
    return centered @ dec.eigenvectors[:, :target_dim]


def generate_synthetic(n: int, d: int, seed: int) -> Dataset:
    """Uniform features on [-1, 1]^d with placeholder +1 labels."""
    if n < 2 or d < 1:
        raise ValueError(f"need n >= 2 and d >= 1, got n={n}, d={d}")
    g = stream(seed, "synthetic")
    feats = g.uniform(-1.0, 1.0, size=(n, d))
    return Dataset(features=feats, labels=np.ones(n, dtype=int))


def relabel_for_advantage(
    q_all: np.ndarray | object,
    k_all: np.ndarray | object,
    ridge: float = 0.0,
    invert_classical: bool = True,
) -> np.ndarray:
    """Engineer +/-1 labels that favor the quantum kernel.

    Takes the top eigenvector ``v`` of ``sqrt(Q) K^-1 sqrt(Q)`` (the
    continuous maximizer of the complexity ratio), forms the score vector
    ``sqrt(Q) v``, and thresholds at its median: strictly above -> +1,
    otherwise -1.  ``invert_classical=False`` uses ``sqrt(Q) K sqrt(Q)``
    instead, which swaps the eigenvector for the one of the literal
    product form.

    The output is balanced: the +1/-1 counts differ by at most one.  When
    median ties would break the balance, tied entries are promoted to +1
    in score order (index order among exact ties).
    """
    qm = linalg.check_symmetric(q_all, "quantum kernel")
    km = linalg.check_symmetric(k_all, "classical kernel")
    if qm.shape != km.shape:
        raise ValueError(f"kernel shape mismatch: {qm.shape} vs {km.shape}")
    root_q = linalg.mat_sqrt_psd(qm)
    middle = linalg.inv_ridge(km, ridge) if invert_classical else km
    core = linalg.sym_matrix(root_q @ middle @ root_q)
    v = linalg.eig_sym(core).eigenvectors[:, 0]
    scores = root_q @ v

    n = scores.shape[0]
    med = float(np.median(scores))
    labels = np.where(scores > med, 1, -1).astype(int)
    want_plus = n // 2
    short = want_plus - int(np.sum(labels == 1))
    if short > 0:
        # degenerate ties at the median: promote the largest scores first
        candidates = [i for i in range(n) if labels[i] == -1]
        candidates.sort(key=lambda i: (-scores[i], i))
        for i in candidates[:short]:
            labels[i] = 1
    return labels


def split(ds: Dataset, n_train: int, n_test: int, seed: int) -> Dataset:
    """Seeded permutation split into disjoint train/test index sets."""
    if n_train < 0 or n_test < 0 or n_train + n_test > ds.n:
        raise ValueError(
            f"cannot draw {n_train}+{n_test} rows from a pool of {ds.n}"
        )
    perm = stream(seed, "split").permutation(ds.n)
    return Dataset(
        features=ds.features,
        labels=ds.labels,
        train_indices=np.sort(perm[:n_train]),
        test_indices=np.sort(perm[n_train : n_train + n_test]),
    )
