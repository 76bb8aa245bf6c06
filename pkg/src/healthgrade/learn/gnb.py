"""Gaussian naive Bayes."""

from __future__ import annotations

import numpy as np
from scipy.special import logsumexp

from ._util import as_dense, check_binary

VAR_FLOOR_RATIO = 1e-9


class GaussianNB:
    """Per-class Gaussian likelihoods with independent features.

    Variances are floored at ``1e-9 * max feature variance`` (``1e-9`` when
    every feature is constant), so constant columns cannot divide by zero.
    """

    algorithm = "GNB"

    def __init__(self):
        self.class_prior_ = None
        self.theta_ = None
        self.var_ = None
        self.epsilon_ = None

    def fit(self, X, y):
        X = as_dense(X)
        y = check_binary(y)
        max_var = float(np.var(X, axis=0).max()) if X.shape[1] else 0.0
        self.epsilon_ = VAR_FLOOR_RATIO * max_var if max_var > 0 else VAR_FLOOR_RATIO
        self.theta_ = np.vstack([X[y == c].mean(axis=0) for c in (0, 1)])
        self.var_ = np.vstack([X[y == c].var(axis=0) for c in (0, 1)]) + self.epsilon_
        self.class_prior_ = np.array([np.mean(y == 0), np.mean(y == 1)])
        return self

    def joint_log_likelihood(self, X) -> np.ndarray:
        X = as_dense(X)
        out = np.empty((X.shape[0], 2))
        for c in (0, 1):
            norm = -0.5 * np.sum(np.log(2.0 * np.pi * self.var_[c]))
            sq = -0.5 * np.sum((X - self.theta_[c]) ** 2 / self.var_[c], axis=1)
            out[:, c] = np.log(self.class_prior_[c]) + norm + sq
        return out

    def predict_proba(self, X) -> np.ndarray:
        jll = self.joint_log_likelihood(X)
        return np.exp(jll - logsumexp(jll, axis=1, keepdims=True))

    def decision_scores(self, X) -> np.ndarray:
        """Posterior probability of Satisfactory."""
        return self.predict_proba(X)[:, 1]

    def predict(self, X) -> np.ndarray:
        return (self.decision_scores(X) > 0.5).astype(np.int64)

    def normalized_scores(self, X) -> np.ndarray:
        return self.decision_scores(X)

    def get_state(self):
        arrays = {
            "prior": self.class_prior_, "theta": self.theta_, "var": self.var_,
        }
        return {"epsilon": self.epsilon_}, arrays

    @classmethod
    def from_state(cls, header, arrays):
        m = cls()
        m.epsilon_ = header["epsilon"]
        m.class_prior_, m.theta_, m.var_ = arrays["prior"], arrays["theta"], arrays["var"]
        return m
