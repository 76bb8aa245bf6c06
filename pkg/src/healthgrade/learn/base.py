"""Training configuration, the fingerprinted ``Model`` wrapper and persistence."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..errors import ArtifactError, FingerprintMismatchError
from ..persist import read_blob, write_blob
from .ensemble import MajorityVote
from .forest import RandomForest
from .gnb import GaussianNB
from .svm import SVM

ALGORITHMS = ("GNB", "RF", "SVM", "ENSEMBLE")
MODEL_MAGIC = b"HGML"


@dataclass(frozen=True)
class TrainConfig:
    algorithm: str = "SVM"
    rf_n_trees: int = 100
    rf_max_features: str = "sqrt"
    svm_c: float = 1.0
    svm_kernel_degree: int = 1
    svm_tol: float = 1e-3
    svm_max_iter: int = 1_000_000
    smote_k: int = 5
    seed: int = 0
    n_jobs: int = 1

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.rf_n_trees < 1:
            raise ValueError("rf_n_trees must be >= 1")
        if self.svm_c <= 0:
            raise ValueError("svm_c must be positive")
        if self.svm_kernel_degree < 1:
            raise ValueError("svm_kernel_degree must be >= 1")
        if self.smote_k < 1:
            raise ValueError("smote_k must be >= 1")

    def build(self, algorithm: str | None = None):
        algo = algorithm or self.algorithm
        if algo == "GNB":
            return GaussianNB()
        if algo == "RF":
            return RandomForest(self.rf_n_trees, self.rf_max_features, self.seed, self.n_jobs)
        if algo == "SVM":
            return SVM(self.svm_c, self.svm_kernel_degree, self.svm_tol, self.svm_max_iter)
        return MajorityVote([self.build("GNB"), self.build("RF"), self.build("SVM")])


class Model:
    """A fitted estimator bound to the feature space it was trained in."""

    def __init__(self, algorithm: str, estimator, fingerprint: str, feature_names=(), config: TrainConfig | None = None,
                 extra: dict | None = None):
        self.algorithm = algorithm
        self.extra = dict(extra or {})
        self.estimator = estimator
        self.fingerprint = fingerprint
        self.feature_names = tuple(feature_names)
        self.config = config

    def _check(self, fingerprint):
        if fingerprint is not None and fingerprint != self.fingerprint:
            raise FingerprintMismatchError(
                "feature vectors come from a different feature space than the model"
            )

    def _unwrap(self, X, fingerprint):
        if hasattr(X, "space") and hasattr(X, "X"):
            fingerprint = X.fingerprint
            X = X.X
        self._check(fingerprint)
        return X

    def predict(self, X, fingerprint=None) -> np.ndarray:
        return self.estimator.predict(self._unwrap(X, fingerprint))

    def score(self, X, fingerprint=None) -> np.ndarray:
        return self.estimator.decision_scores(self._unwrap(X, fingerprint))


def train(X, y, config: TrainConfig, fingerprint: str = "", feature_names=()) -> Model:
    if hasattr(X, "space") and hasattr(X, "X"):
        fingerprint = fingerprint or X.fingerprint
        feature_names = feature_names or X.space.names
        X = X.X
    est = config.build().fit(X, y)
    return Model(config.algorithm, est, fingerprint, feature_names, config)


def _flatten(est, prefix=""):
    if isinstance(est, MajorityVote):
        header, arrays = {"members": [m.algorithm for m in est.members]}, {}
        for i, m in enumerate(est.members):
            h, a = _flatten(m, f"{prefix}m{i}.")
            header[f"m{i}"] = h
            arrays.update(a)
        return header, arrays
    h, a = est.get_state()
    return h, {prefix + k: v for k, v in a.items()}


def _unflatten(algorithm, header, arrays, prefix=""):
    if algorithm == "ENSEMBLE":
        members = [
            _unflatten(algo, header[f"m{i}"], arrays, f"{prefix}m{i}.")
            for i, algo in enumerate(header["members"])
        ]
        return MajorityVote(members)
    cls = {"GNB": GaussianNB, "RF": RandomForest, "SVM": SVM}[algorithm]
    own = {k[len(prefix):]: v for k, v in arrays.items() if k.startswith(prefix) and "." not in k[len(prefix):]}
    return cls.from_state(header, own)


def save_model(path, model: Model) -> None:
    params, arrays = _flatten(model.estimator)
    header = {
        "kind": "healthgrade-model",
        "algorithm": model.algorithm,
        "fingerprint": model.fingerprint,
        "feature_names": list(model.feature_names),
        "config": asdict(model.config) if model.config else None,
        "params": params,
        "extra": model.extra,
    }
    write_blob(path, MODEL_MAGIC, header, arrays)


def load_model(path, expected_fingerprint: str | None = None) -> Model:
    header, arrays = read_blob(path, MODEL_MAGIC)
    if header.get("kind") != "healthgrade-model":
        raise ArtifactError(f"{path}: not a model file")
    if expected_fingerprint is not None and header["fingerprint"] != expected_fingerprint:
        raise FingerprintMismatchError(
            f"{path}: model was trained on feature space {header['fingerprint'][:12]}, "
            f"artifacts describe {expected_fingerprint[:12]}"
        )
    est = _unflatten(header["algorithm"], header["params"], arrays)
    cfg = TrainConfig(**header["config"]) if header.get("config") else None
    return Model(header["algorithm"], est, header["fingerprint"], header["feature_names"], cfg, header.get("extra"))
