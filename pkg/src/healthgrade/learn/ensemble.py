"""Majority vote over naive Bayes, random forest and SVM."""

from __future__ import annotations

import numpy as np

from .forest import RandomForest
from .gnb import GaussianNB
from .svm import SVM


class MajorityVote:
    algorithm = "ENSEMBLE"

    def __init__(self, members=None):
        self.members = members if members is not None else [GaussianNB(), RandomForest(), SVM()]
        if len(self.members) % 2 == 0:
            raise ValueError("an odd number of members keeps binary votes tie-free")

    def fit(self, X, y):
        for m in self.members:
            m.fit(X, y)
        return self

    def member_votes(self, X) -> np.ndarray:
        return np.vstack([m.predict(X) for m in self.members])

    def predict(self, X) -> np.ndarray:
        votes = self.member_votes(X)
        return (2 * votes.sum(axis=0) > len(self.members)).astype(np.int64)

    def decision_scores(self, X) -> np.ndarray:
        """Mean of the members' scores, each mapped to [0, 1]."""
        return np.mean([m.normalized_scores(X) for m in self.members], axis=0)

    normalized_scores = decision_scores
