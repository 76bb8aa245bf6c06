"""Class rebalancing for training folds: random under/over-sampling and SMOTE."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from ..errors import DataError
from ._util import as_dense, check_binary

METHODS = ("none", "under", "over", "smote")


def _split(y):
    counts = np.bincount(y, minlength=2)
    minority = int(np.argmin(counts)) if counts[0] != counts[1] else 1
    return minority, 1 - minority, counts


def nearest_neighbors(P: np.ndarray, k: int) -> np.ndarray:
    """Indices of the ``k`` nearest other rows of ``P`` (Euclidean, ties by index)."""
    sq = np.sum(P * P, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (P @ P.T)
    np.fill_diagonal(d2, np.inf)
    return np.argsort(d2, axis=1, kind="stable")[:, :k]


def smote(X_min: np.ndarray, n_new: int, k: int, rng: np.random.Generator) -> np.ndarray:
    if len(X_min) < 2:
        raise DataError("SMOTE needs at least 2 minority instances")
    k = min(k, len(X_min) - 1)
    nn = nearest_neighbors(X_min, k)
    base = rng.integers(0, len(X_min), size=n_new)
    pick = nn[base, rng.integers(0, k, size=n_new)]
    u = rng.random(n_new)[:, None]
    return X_min[base] + u * (X_min[pick] - X_min[base])


def resample(X, y, method: str, seed: int, k: int = 5):
    """Return ``(X', y')`` with both classes the same size.

    Original rows keep their labels; under-sampling returns a subset of the
    input rows (in original order); over-sampling and SMOTE append rows.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}")
    y = check_binary(y)
    if method == "none":
        return X, y
    rng = np.random.default_rng(seed)
    minority, majority, counts = _split(y)
    n_min, n_maj = counts[minority], counts[majority]
    if n_min == n_maj:
        return X, y
    idx_min = np.nonzero(y == minority)[0]
    idx_maj = np.nonzero(y == majority)[0]
    if method == "under":
        keep = np.sort(np.concatenate([idx_min, rng.choice(idx_maj, size=n_min, replace=False)]))
        return X[keep], y[keep]
    if method == "over":
        extra = rng.choice(idx_min, size=n_maj - n_min, replace=True)
        rows = np.concatenate([np.arange(len(y)), extra])
        return X[rows], y[rows]
    if k < 1:
        raise ValueError("k must be >= 1")
    dense = as_dense(X)
    synth = smote(dense[idx_min], n_maj - n_min, k, rng)
    X_out = np.vstack([dense, synth])
    y_out = np.concatenate([y, np.full(len(synth), minority, dtype=np.int64)])
    if sp.issparse(X):
        X_out = sp.csr_matrix(X_out)
    return X_out, y_out
