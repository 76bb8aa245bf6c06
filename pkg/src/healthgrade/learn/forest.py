"""Random forest of Gini-split CART trees."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ._util import as_dense, check_binary


def _n_candidates(rule, m: int) -> int:
    if rule == "sqrt":
        k = int(math.sqrt(m))
    elif rule == "log2":
        k = int(math.log2(m)) if m > 1 else 1
    elif rule in (None, "all"):
        k = m
    elif isinstance(rule, float):
        k = int(rule * m)
    else:
        k = int(rule)
    return min(max(k, 1), m)


def _best_split(Xn: np.ndarray, yn: np.ndarray):
    """Lowest weighted child Gini over all thresholds of all columns in ``Xn``.

    Returns ``(column, threshold, child_impurity)`` or ``None`` when every
    column is constant.
    """
    n = len(yn)
    order = np.argsort(Xn, axis=0, kind="stable")
    xs = np.take_along_axis(Xn, order, axis=0)
    ys = yn[order]
    pos_left = np.cumsum(ys, axis=0)[:-1]  # split after row i: left holds rows 0..i
    n_left = np.arange(1, n)[:, None]
    n_right = n - n_left
    pos_total = pos_left[-1:] + ys[-1:]
    pos_right = pos_total - pos_left
    p_l = pos_left / n_left
    p_r = pos_right / n_right
    gini = (n_left * 2 * p_l * (1 - p_l) + n_right * 2 * p_r * (1 - p_r)) / n
    valid = xs[1:] > xs[:-1]
    if not valid.any():
        return None
    gini = np.where(valid, gini, np.inf)
    flat = int(np.argmin(gini.T))  # column-major so ties favour earlier candidates
    col, row = divmod(flat, n - 1)
    lo, hi = xs[row, col], xs[row + 1, col]
    thr = (lo + hi) / 2.0
    if not thr < hi:  # adjacent floats
        thr = lo
    return col, float(thr), float(gini[row, col])


def _gini(y: np.ndarray) -> float:
    if len(y) == 0:
        return 0.0
    p = y.mean()
    return 2.0 * p * (1.0 - p)


class DecisionTree:
    """Array-backed binary tree; leaves have ``feature == -1``."""

    def __init__(self, feature, threshold, left, right, count0, count1):
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        self.count0 = count0
        self.count1 = count1

    @classmethod
    def grow(cls, X, y, rng: np.random.Generator, max_features, importances: np.ndarray):
        n_total, m = X.shape
        k = _n_candidates(max_features, m)
        feature, threshold, left, right, c0, c1 = [], [], [], [], [], []

        def new_node(idx):
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            ones = int(y[idx].sum())
            c0.append(len(idx) - ones)
            c1.append(ones)
            return len(feature) - 1

        root = new_node(np.arange(n_total))
        stack = [(root, np.arange(n_total))]
        while stack:
            node, idx = stack.pop()
            yn = y[idx]
            if len(idx) < 2 or yn.min() == yn.max():
                continue
            perm = rng.permutation(m)
            found = None
            # draw further candidates when the first batch is all constant
            for start in range(0, m, k):
                cand = perm[start:start + k]
                res = _best_split(X[np.ix_(idx, cand)], yn)
                if res is not None:
                    found = (int(cand[res[0]]), res[1], res[2])
                    break
            if found is None:
                continue
            f, thr, child_gini = found
            go_left = X[idx, f] <= thr
            importances[f] += len(idx) / n_total * (_gini(yn) - child_gini)
            feature[node], threshold[node] = f, thr
            li, ri = idx[go_left], idx[~go_left]
            left[node] = new_node(li)
            right[node] = new_node(ri)
            stack.append((right[node], ri))
            stack.append((left[node], li))
        return cls(
            np.asarray(feature, dtype=np.int64),
            np.asarray(threshold, dtype=np.float64),
            np.asarray(left, dtype=np.int64),
            np.asarray(right, dtype=np.int64),
            np.asarray(c0, dtype=np.int64),
            np.asarray(c1, dtype=np.int64),
        )

    def leaves(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature[node] >= 0
        while active.any():
            rows = np.nonzero(active)[0]
            nd = node[rows]
            go_left = X[rows, self.feature[nd]] <= self.threshold[nd]
            node[rows] = np.where(go_left, self.left[nd], self.right[nd])
            active = self.feature[node] >= 0
        return node

    def vote(self, X: np.ndarray) -> np.ndarray:
        """Leaf majority class; an even leaf votes NotSatisfactory."""
        leaf = self.leaves(X)
        return (self.count1[leaf] > self.count0[leaf]).astype(np.int64)

    @property
    def n_nodes(self) -> int:
        return len(self.feature)


class RandomForest:
    """Bagged Gini trees grown to purity with random candidate features per node.

    Tree ``t`` draws from ``np.random.default_rng(seed + t)``, so the forest is
    identical whatever ``n_jobs`` is.
    """

    algorithm = "RF"

    def __init__(self, n_trees: int = 100, max_features="sqrt", seed: int = 0, n_jobs: int = 1):
        if n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        self.n_trees = n_trees
        self.max_features = max_features
        self.seed = seed
        self.n_jobs = n_jobs
        self.trees: list[DecisionTree] = []
        self.feature_importances_ = None

    def _grow_one(self, t: int, X, y):
        rng = np.random.default_rng(self.seed + t)
        n = X.shape[0]
        boot = rng.integers(0, n, size=n)
        imp = np.zeros(X.shape[1])
        tree = DecisionTree.grow(X[boot], y[boot], rng, self.max_features, imp)
        return tree, imp

    def fit(self, X, y):
        X = as_dense(X)
        y = check_binary(y)
        if self.n_jobs and self.n_jobs > 1:
            with ThreadPoolExecutor(self.n_jobs) as pool:
                results = list(pool.map(lambda t: self._grow_one(t, X, y), range(self.n_trees)))
        else:
            results = [self._grow_one(t, X, y) for t in range(self.n_trees)]
        self.trees = [r[0] for r in results]
        imp = np.mean([r[1] for r in results], axis=0)
        total = imp.sum()
        self.feature_importances_ = imp / total if total > 0 else imp
        return self

    def decision_scores(self, X) -> np.ndarray:
        """Fraction of trees voting Satisfactory."""
        X = as_dense(X)
        votes = np.zeros(X.shape[0])
        for tree in self.trees:
            votes += tree.vote(X)
        return votes / len(self.trees)

    def predict(self, X) -> np.ndarray:
        # exactly half the trees is a tie and goes to NotSatisfactory
        return (self.decision_scores(X) > 0.5).astype(np.int64)

    def normalized_scores(self, X) -> np.ndarray:
        return self.decision_scores(X)

    def get_state(self):
        sizes = [t.n_nodes for t in self.trees]
        cat = lambda attr: np.concatenate([getattr(t, attr) for t in self.trees])  # noqa: E731
        header = {
            "n_trees": self.n_trees,
            "max_features": self.max_features,
            "seed": self.seed,
        }
        arrays = {
            "sizes": np.asarray(sizes, dtype=np.int64),
            "feature": cat("feature"),
            "threshold": cat("threshold"),
            "left": cat("left"),
            "right": cat("right"),
            "count0": cat("count0"),
            "count1": cat("count1"),
            "importances": self.feature_importances_,
        }
        return header, arrays

    @classmethod
    def from_state(cls, header, arrays):
        rf = cls(header["n_trees"], header["max_features"], header["seed"])
        bounds = np.concatenate([[0], np.cumsum(arrays["sizes"])])
        rf.trees = [
            DecisionTree(*(arrays[a][lo:hi] for a in ("feature", "threshold", "left", "right", "count0", "count1")))
            for lo, hi in zip(bounds[:-1], bounds[1:])
        ]
        rf.feature_importances_ = arrays["importances"]
        return rf
