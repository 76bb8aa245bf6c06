"""Feature ranking: Pearson correlation, logistic-regression weights and
random-forest importance, top-k cuts and a Borda merge of the three."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .errors import ConvergenceError, DegenerateDatasetError, UsageError
from .learn.forest import RandomForest

EVALUATORS = ("CoAE-PC", "ClAE-LR", "ClAE-RF")
SELECTOR_ALIASES = {"pc": "CoAE-PC", "lr": "ClAE-LR", "rf": "ClAE-RF"}


@dataclass(frozen=True)
class FeatureScores:
    evaluator: str
    scores: np.ndarray
    fingerprint: str = ""

    def __post_init__(self):
        if self.evaluator not in EVALUATORS:
            raise ValueError(f"unknown evaluator {self.evaluator!r}")
        if not np.all(np.isfinite(self.scores)):
            raise ValueError("feature scores must be finite")

    def __len__(self):
        return len(self.scores)


def _check_y(y) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64).ravel()
    if len(np.unique(y)) < 2:
        raise DegenerateDatasetError("feature scoring needs both classes present")
    return y


def _columns(X, chunk: int = 2048):
    """Yield ``(start, dense column block)`` without densifying all of ``X``."""
    n_cols = X.shape[1]
    for start in range(0, n_cols, chunk):
        block = X[:, start:start + chunk]
        yield start, (block.toarray() if sp.issparse(block) else np.asarray(block, dtype=np.float64))


def pearson_scores(X, y, fingerprint: str = "") -> FeatureScores:
    """``|r|`` between each column and the 0/1 label; constant columns score 0."""
    y = _check_y(y)
    yc = y - y.mean()
    y_norm = np.sqrt(yc @ yc)
    out = np.zeros(X.shape[1])
    for start, block in _columns(X):
        xc = block - block.mean(axis=0)
        x_norm = np.sqrt(np.einsum("ij,ij->j", xc, xc))
        cov = yc @ xc
        with np.errstate(invalid="ignore", divide="ignore"):
            r = np.abs(cov) / (x_norm * y_norm)
        # relative threshold: float residue of a constant column is not variance
        const = x_norm <= 1e-12 * np.maximum(1.0, np.abs(block).max(axis=0)) * np.sqrt(len(y))
        r[const] = 0.0
        out[start:start + block.shape[1]] = np.clip(np.nan_to_num(r), 0.0, 1.0)
    return FeatureScores("CoAE-PC", out, fingerprint)


def standardize(X) -> np.ndarray:
    X = X.toarray() if sp.issparse(X) else np.asarray(X, dtype=np.float64)
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    Z = np.zeros_like(X)
    ok = sd > 0
    Z[:, ok] = (X[:, ok] - mu[ok]) / sd[ok]
    return Z


def _logistic_loss(Z, s, w, b, lam):
    """Mean logistic loss + (lam/2)|w|^2 and its gradient; ``s`` in {-1, +1}."""
    margin = s * (Z @ w + b)
    loss = np.mean(np.logaddexp(0.0, -margin)) + 0.5 * lam * (w @ w)
    sig = -s * np.exp(-np.logaddexp(0.0, margin)) / len(s)  # d loss / d score
    gw = Z.T @ sig + lam * w
    gb = sig.sum()
    return loss, gw, gb


def fit_logistic(Z, y, l2_strength: float = 0.01, max_iter: int = 10_000, tol: float = 1e-8):
    """L2-regularized logistic regression by gradient descent.

    Steps start from the Barzilai-Borwein estimate and are shortened by
    Armijo backtracking. The intercept is not penalized.
    """
    s = np.where(np.asarray(y) > 0, 1.0, -1.0)
    n, m = Z.shape
    w = np.zeros(m)
    b = 0.0
    loss, gw, gb = _logistic_loss(Z, s, w, b, l2_strength)
    step = 1.0
    prev = None
    for it in range(max_iter):
        gnorm = np.sqrt(gw @ gw + gb * gb)
        if gnorm < tol:
            return w, b, it
        if prev is not None:
            dw, db = w - prev[0], b - prev[1]
            dgw, dgb = gw - prev[2], gb - prev[3]
            sy = dw @ dgw + db * dgb
            if sy > 0:
                step = (dw @ dw + db * db) / sy
        prev = (w, b, gw, gb)
        while True:
            w_new, b_new = w - step * gw, b - step * gb
            loss_new, gw_new, gb_new = _logistic_loss(Z, s, w_new, b_new, l2_strength)
            if loss_new <= loss - 1e-4 * step * gnorm * gnorm or step < 1e-20:
                break
            step *= 0.5
        w, b, loss, gw, gb = w_new, b_new, loss_new, gw_new, gb_new
    raise ConvergenceError(
        f"logistic regression did not reach gradient norm {tol} in {max_iter} iterations",
        iterations=max_iter,
        residual=float(np.sqrt(gw @ gw + gb * gb)),
    )


def lr_importance(X, y, l2_strength: float = 0.01, fingerprint: str = "", max_iter: int = 10_000) -> FeatureScores:
    y = _check_y(y)
    w, _, _ = fit_logistic(standardize(X), y, l2_strength, max_iter=max_iter)
    return FeatureScores("ClAE-LR", np.abs(w), fingerprint)


def rf_importance(X, y, n_trees: int = 100, seed: int = 0, fingerprint: str = "", n_jobs: int = 1) -> FeatureScores:
    y = _check_y(y).astype(np.int64)
    rf = RandomForest(n_trees=n_trees, seed=seed, n_jobs=n_jobs).fit(X, y)
    return FeatureScores("ClAE-RF", rf.feature_importances_.copy(), fingerprint)


def score_features(selector: str, X, y, seed: int = 0, fingerprint: str = "", n_jobs: int = 1, **kw) -> FeatureScores:
    name = SELECTOR_ALIASES.get(selector, selector)
    if name == "CoAE-PC":
        return pearson_scores(X, y, fingerprint)
    if name == "ClAE-LR":
        return lr_importance(X, y, fingerprint=fingerprint, **kw)
    if name == "ClAE-RF":
        return rf_importance(X, y, seed=seed, fingerprint=fingerprint, n_jobs=n_jobs, **kw)
    raise UsageError(f"unknown selector {selector!r}; choose pc, lr or rf")


def top_k(scores, k: int) -> list[int]:
    """Indices of the ``k`` best scores, best first; ties keep the lower index."""
    s = np.asarray(getattr(scores, "scores", scores), dtype=np.float64)
    if not 1 <= k <= len(s):
        raise UsageError(f"k must be in 1..{len(s)}, got {k}")
    order = np.lexsort((np.arange(len(s)), -s))
    return order[:k].tolist()


def ranks(scores) -> np.ndarray:
    """1-based rank of every feature under the ``top_k`` ordering."""
    s = np.asarray(getattr(scores, "scores", scores), dtype=np.float64)
    order = np.lexsort((np.arange(len(s)), -s))
    r = np.empty(len(s), dtype=np.int64)
    r[order] = np.arange(1, len(s) + 1)
    return r


@dataclass(frozen=True)
class CombinedFeature:
    index: int
    name: str
    family: str
    points: int
    evaluator_ranks: dict
    common: bool


def combined_top(score_sets: Sequence[FeatureScores], space, k: int = 16) -> list[CombinedFeature]:
    """Borda merge: each evaluator gives ``|space| - rank`` points per feature.

    ``common`` marks features inside every evaluator's own top ``k``.
    """
    if not score_sets:
        raise UsageError("combined_top needs at least one score set")
    m = len(space)
    fps = {fs.fingerprint for fs in score_sets}
    if any(len(fs) != m for fs in score_sets) or len(fps) > 1 or (fps and next(iter(fps)) not in ("", space.fingerprint)):
        raise UsageError("score sets were computed on different feature spaces")
    k = min(k, m)
    rank_sets = [ranks(fs) for fs in score_sets]
    points = sum(m - r for r in rank_sets)
    order = np.lexsort((np.arange(m), -points))[:k]
    tops = [set(top_k(fs, k)) for fs in score_sets]
    out = []
    for j in order:
        j = int(j)
        out.append(
            CombinedFeature(
                index=j,
                name=space.names[j],
                family=space.families[j],
                points=int(points[j]),
                evaluator_ranks={fs.evaluator: int(r[j]) for fs, r in zip(score_sets, rank_sets)},
                common=all(j in t for t in tops),
            )
        )
    return out


def format_scores(scores: FeatureScores, space) -> str:
    """CSV of every feature: name, family, score, rank."""
    r = ranks(scores)
    lines = ["name,family,score,rank"]
    for j in np.argsort(r, kind="stable"):
        lines.append(f"{_csv(space.names[j])},{space.families[j]},{scores.scores[j]:.10g},{r[j]}")
    return "\n".join(lines) + "\n"


def _csv(text: str) -> str:
    if any(c in text for c in ',"\n'):
        return '"' + text.replace('"', '""') + '"'
    return text
