"""Cross-validation, weighted metrics, ROC analysis and experiment runs.

Fold results are pooled: one confusion matrix and one ROC curve are built
from all held-out predictions rather than averaging per-fold metrics.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import BinaryDataset
from .errors import DataError, DegenerateDatasetError, UsageError
from .featurize.space import FeatureMatrix, Featurizer, ProcessedDoc
from .learn.base import TrainConfig, train
from .learn.resample import METHODS as BALANCING
from .select import SELECTOR_ALIASES, score_features, top_k

log = logging.getLogger(__name__)

SWEEP_SIZES = (1000, 2000, 3000, 4000, 5000, 10000, "all")
CLASSIFIERS = {"svm": "SVM", "gnb": "GNB", "rf": "RF", "ensemble": "ENSEMBLE"}
REPORT_COLUMNS = ("criterion", "selector", "classifier", "size", "balancing", "WP", "WR", "WF", "AUC", "seconds")


def stratified_kfold(y, k: int = 10, seed: int = 0) -> list[np.ndarray]:
    """Split indices into ``k`` folds with per-class counts within one of each other.

    Each class is shuffled, the shuffled class lists are concatenated and
    position ``p`` goes to fold ``p mod k``.
    """
    y = np.asarray(y)
    if k < 2:
        raise UsageError("k must be at least 2")
    rng = np.random.default_rng(seed)
    order = []
    for c in np.unique(y):
        idx = np.nonzero(y == c)[0]
        if len(idx) < k:
            raise DegenerateDatasetError(f"class {c!r} has {len(idx)} instances, fewer than k={k}")
        order.append(rng.permutation(idx))
    flat = np.concatenate(order) if order else np.array([], dtype=np.int64)
    folds = [np.sort(flat[np.arange(len(flat)) % k == f]) for f in range(k)]
    return folds


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with Satisfactory as the positive class."""

    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @classmethod
    def from_predictions(cls, y_true, y_pred) -> "ConfusionMatrix":
        t = np.asarray(y_true, dtype=bool)
        p = np.asarray(y_pred, dtype=bool)
        return cls(int(np.sum(t & p)), int(np.sum(~t & p)), int(np.sum(~t & ~p)), int(np.sum(t & ~p)))

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(self.tp + other.tp, self.fp + other.fp, self.tn + other.tn, self.fn + other.fn)

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total if self.total else 0.0

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


def _ratio(a: int, b: int) -> float:
    return a / b if b else 0.0


def class_metrics(cm: ConfusionMatrix) -> dict[str, tuple[float, float, float]]:
    """Per-class (precision, recall, F1); any 0/0 is 0."""
    out = {}
    for name, hit, false_pos, miss in (("S", cm.tp, cm.fp, cm.fn), ("NS", cm.tn, cm.fn, cm.fp)):
        p = _ratio(hit, hit + false_pos)
        r = _ratio(hit, hit + miss)
        f = 2 * p * r / (p + r) if p + r > 0 else 0.0
        out[name] = (p, r, f)
    return out


def weighted_prf(cm: ConfusionMatrix) -> tuple[float, float, float]:
    """Class-size weighted precision, recall and F1 (weights are true class sizes).

    Computed on exact rationals and rounded once, so WR equals accuracy exactly.
    """
    if cm.total == 0:
        raise DataError("cannot compute metrics on an empty confusion matrix")

    def q(a, b):
        return Fraction(a, b) if b else Fraction(0)

    n_s, n_ns = cm.tp + cm.fn, cm.tn + cm.fp
    out = [Fraction(0)] * 3
    for hit, false_pos, size in ((cm.tp, cm.fp, n_s), (cm.tn, cm.fn, n_ns)):
        p, r = q(hit, hit + false_pos), q(hit, size)
        f = 2 * p * r / (p + r) if p + r else Fraction(0)
        out = [o + m * size for o, m in zip(out, (p, r, f))]
    return tuple(float(o / cm.total) for o in out)  # type: ignore[return-value]


def roc_curve(scores, y_true) -> tuple[list[tuple[float, float]], float]:
    """ROC points from (0, 0) to (1, 1), one per distinct score, and trapezoid AUC."""
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(y_true).astype(bool)
    if not np.all(np.isfinite(s)):
        raise DataError("scores must be finite")
    n_pos, n_neg = int(y.sum()), int((~y).sum())
    if n_pos == 0 or n_neg == 0:
        raise DegenerateDatasetError("ROC needs both classes present")
    order = np.argsort(-s, kind="stable")
    s, y = s[order], y[order]
    # last index of every run of tied scores
    ends = np.r_[np.nonzero(np.diff(s))[0], len(s) - 1]
    tps = np.cumsum(y)[ends]
    fps = (ends + 1) - tps
    tpr = np.r_[0, tps] / n_pos
    fpr = np.r_[0, fps] / n_neg
    auc = float(np.sum((fpr[1:] - fpr[:-1]) * (tpr[1:] + tpr[:-1]) / 2.0))
    return list(zip(fpr.tolist(), tpr.tolist())), auc


@dataclass(frozen=True)
class ExperimentConfig:
    criterion: int
    selector: str = "pc"
    classifier: str = "svm"
    feature_size: int | str = 1000
    balancing: str = "none"
    seed: int = 0
    k_folds: int = 10
    n_jobs: int = 1
    train: TrainConfig | None = None

    def __post_init__(self):
        if self.selector not in SELECTOR_ALIASES:
            raise UsageError(f"selector must be one of {sorted(SELECTOR_ALIASES)}")
        if self.classifier not in CLASSIFIERS:
            raise UsageError(f"classifier must be one of {sorted(CLASSIFIERS)}")
        if self.balancing not in BALANCING:
            raise UsageError(f"balancing must be one of {BALANCING}")
        if self.feature_size != "all" and (not isinstance(self.feature_size, int) or self.feature_size < 1):
            raise UsageError(f"feature size must be a positive integer or 'all', got {self.feature_size!r}")

    def train_config(self) -> TrainConfig:
        base = self.train or TrainConfig(seed=self.seed, n_jobs=self.n_jobs)
        return TrainConfig(**{**base.__dict__, "algorithm": CLASSIFIERS[self.classifier]})


@dataclass
class EvaluationReport:
    criterion: int
    selector: str
    classifier: str
    feature_size: int | str
    balancing: str
    confusion: ConfusionMatrix
    fold_confusions: list[ConfusionMatrix]
    effective_sizes: list[int]
    wp: float
    wr: float
    wf: float
    roc: list[tuple[float, float]]
    auc: float
    seconds: float
    ids: list[str] = field(default_factory=list)
    scores: list[float] = field(default_factory=list)

    def row(self) -> dict:
        return {
            "criterion": self.criterion,
            "selector": SELECTOR_ALIASES[self.selector],
            "classifier": CLASSIFIERS[self.classifier],
            "size": self.feature_size,
            "balancing": self.balancing,
            "WP": f"{self.wp:.4f}",
            "WR": f"{self.wr:.4f}",
            "WF": f"{self.wf:.4f}",
            "AUC": f"{self.auc:.4f}",
            "seconds": f"{self.seconds:.2f}",
        }

    @property
    def key(self) -> str:
        return f"c{self.criterion}_{self.selector}_{self.classifier}_{self.feature_size}_{self.balancing}"


@dataclass
class _Fold:
    test: np.ndarray
    train_matrix: FeatureMatrix
    test_matrix: FeatureMatrix
    y_train: np.ndarray
    order: list[int] | None  # selector ranking over all features; None when not needed


class DocCache:
    """Processed documents by article id, so folds and sweeps reuse them."""

    def __init__(self, featurizer: Featurizer):
        self.featurizer = featurizer
        self._docs: dict[str, ProcessedDoc] = {}

    def get(self, articles) -> list[ProcessedDoc]:
        missing = [a for a in articles if a.id not in self._docs]
        for a, d in zip(missing, self.featurizer.process(missing)):
            self._docs[a.id] = d
        return [self._docs[a.id] for a in articles]


def _prepare_fold(docs, y, test, featurizer, selector, need_order, seed, n_jobs) -> _Fold:
    train_idx = np.setdiff1d(np.arange(len(y)), test)
    train_docs = [docs[i] for i in train_idx]
    fitted, M_train = featurizer.fit_transform(train_docs)
    M_test = fitted.transform([docs[i] for i in test])
    order = None
    if need_order:
        scores = score_features(selector, M_train.X, y[train_idx], seed=seed, n_jobs=n_jobs)
        order = top_k(scores, len(scores))
    return _Fold(test, M_train, M_test, y[train_idx], order)


def _evaluate_size(folds: list[_Fold], y, cfg: ExperimentConfig, size, n_items, ids) -> EvaluationReport:
    start = time.perf_counter()
    tcfg = cfg.train_config()
    pooled_scores = np.zeros(n_items)
    pooled_pred = np.zeros(n_items, dtype=np.int64)
    fold_cms, sizes = [], []
    for f, fold in enumerate(folds):
        m = len(fold.train_matrix.space)
        if size == "all":
            cols = list(range(m))
        else:
            k = min(int(size), m)  # sizes beyond the fitted space keep every feature
            cols = fold.order[:k]
        sizes.append(len(cols))
        Xtr = fold.train_matrix.subset(cols)
        Xte = fold.test_matrix.subset(cols)
        X_fit, y_fit = Xtr.X, fold.y_train
        if cfg.balancing != "none":
            from .learn.resample import resample

            X_fit, y_fit = resample(X_fit, y_fit, cfg.balancing, seed=cfg.seed + f, k=tcfg.smote_k)
        model = train(X_fit, y_fit, tcfg, fingerprint=Xtr.fingerprint, feature_names=Xtr.space.names)
        pooled_scores[fold.test] = model.score(Xte)
        pooled_pred[fold.test] = model.predict(Xte)
        fold_cms.append(ConfusionMatrix.from_predictions(y[fold.test], pooled_pred[fold.test]))
    cm = ConfusionMatrix.from_predictions(y, pooled_pred)
    wp, wr, wf = weighted_prf(cm)
    roc, auc = roc_curve(pooled_scores, y)
    elapsed = time.perf_counter() - start
    return EvaluationReport(
        criterion=cfg.criterion, selector=cfg.selector, classifier=cfg.classifier,
        feature_size=size, balancing=cfg.balancing, confusion=cm, fold_confusions=fold_cms,
        effective_sizes=sizes, wp=wp, wr=wr, wf=wf, roc=roc, auc=auc, seconds=elapsed,
        ids=list(ids), scores=pooled_scores.tolist(),
    )


def run_sweep(
    dataset: BinaryDataset,
    cfg: ExperimentConfig,
    sizes: Sequence[int | str],
    featurizer: Featurizer | None = None,
    cache: DocCache | None = None,
) -> list[EvaluationReport]:
    """Evaluate several feature sizes on shared folds.

    Per fold, every feature family and the selector are fitted on the
    training split only; the test split is transformed with those fits.
    """
    if cfg.criterion != dataset.criterion:
        raise UsageError("experiment criterion differs from the dataset's")
    featurizer = featurizer or (cache.featurizer if cache else Featurizer())
    cache = cache or DocCache(featurizer)
    t0 = time.perf_counter()
    docs = cache.get(dataset.articles)
    y = np.asarray(dataset.y, dtype=np.int64)
    splits = stratified_kfold(y, cfg.k_folds, cfg.seed)
    need_order = any(s != "all" for s in sizes)
    prep = lambda test: _prepare_fold(  # noqa: E731
        docs, y, test, featurizer, cfg.selector, need_order, cfg.seed, cfg.n_jobs
    )
    if cfg.n_jobs > 1:
        with ThreadPoolExecutor(cfg.n_jobs) as pool:
            folds = list(pool.map(prep, splits))
    else:
        folds = [prep(t) for t in splits]
    setup = time.perf_counter() - t0
    reports = []
    for size in sizes:
        rep = _evaluate_size(folds, y, cfg, size, len(y), dataset.ids)
        # featurization/selection time is shared; charge it to every size
        rep.seconds += setup
        reports.append(rep)
        log.info("criterion %s %s/%s size=%s: WF=%.4f AUC=%.4f", cfg.criterion, cfg.selector, cfg.classifier, size, rep.wf, rep.auc)
    return reports


def run_experiment(dataset: BinaryDataset, cfg: ExperimentConfig, featurizer=None, cache=None) -> EvaluationReport:
    return run_sweep(dataset, cfg, [cfg.feature_size], featurizer, cache)[0]


def format_report(reports: Sequence[EvaluationReport]) -> str:
    lines = [
        "# aggregation: pooled confusion matrix and pooled ROC over all folds",
        ",".join(REPORT_COLUMNS),
    ]
    for rep in reports:
        row = rep.row()
        lines.append(",".join(str(row[c]) for c in REPORT_COLUMNS))
    return "\n".join(lines) + "\n"


def write_roc(path, report: EvaluationReport) -> None:
    lines = ["fpr,tpr"] + [f"{x:.10g},{y:.10g}" for x, y in report.roc]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

