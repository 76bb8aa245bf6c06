"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v`` (about a minute on four
cores; the end-to-end criteria dominate).
"""

import random
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from healthgrade.corpus import filter_for_criterion
from healthgrade.errors import DataError
from healthgrade.evaluation import (
    ConfusionMatrix,
    DocCache,
    ExperimentConfig,
    roc_curve,
    run_sweep,
    stratified_kfold,
    weighted_prf,
)
from healthgrade.featurize.space import Featurizer
from healthgrade.featurize.tfidf import fit_tfidf, tfidf_vector
from healthgrade.learn import SVM, GaussianNB, RandomForest, kkt_violation, resample
from healthgrade.learn.svm import poly_kernel
from healthgrade.preprocess import normalize_words
from healthgrade.select import combined_top, score_features
from healthgrade.synth import planted_feature_names
from oracles import brute_tfidf, definitional_prf, fold_counts, gaussian_boundary, k_nearest, on_segment

E2E_CRITERION = 1
E2E_WORKERS = 4


def verdict(capsys, n, ok, detail):
    with capsys.disabled():
        print(f"\nAC{n:<2} {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


# 1


def _random_corpus(rng):
    vocab = [f"t{i}" for i in range(rng.randint(1, 30))]
    n_docs = rng.randint(3, 20)
    return [[rng.choice(vocab) for _ in range(rng.randint(1, 12))] for _ in range(n_docs)]


def test_ac1_tfidf_oracle(capsys):
    start = time.perf_counter()
    rng = random.Random(1)
    worst, compared = 0.0, 0
    for _ in range(100):
        docs = _random_corpus(rng)
        keep, want = brute_tfidf(docs)
        compared += 1
        if not keep:
            # both routes must agree the pruned vocabulary is empty
            with pytest.raises(DataError):
                fit_tfidf(docs)
            continue
        model = fit_tfidf(docs)
        assert list(model.terms) == keep
        for d, w in zip(docs, want):
            got = {model.terms[j]: v for j, v in tfidf_vector(model, d).items()}
            assert got.keys() == w.keys()
            for t in got:
                worst = max(worst, abs(got[t] - w[t]))
    # boundary cases: df 2 vs 3, df ratio exactly 0.90
    b1 = fit_tfidf([["x", "y"], ["x", "y"], ["y"], ["z"], ["z"], ["q"]])
    b2 = fit_tfidf([["nine", "ten", f"u{i}"] for i in range(9)] + [["ten", "u9"]])
    edges = "x" not in b1.terms and "y" in b1.terms and "nine" in b2.terms and "ten" not in b2.terms
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-12 and edges and elapsed < 10 and compared == 100
    verdict(capsys, 1, ok, f"TF-IDF oracle: {compared} corpora, max |diff| {worst:.2e}, "
                           f"boundaries exact={edges}, {elapsed:.2f}s")


# 2


def test_ac2_weighted_metrics(capsys):
    rng = random.Random(2)
    worst, wr_exact = 0.0, True
    for _ in range(1000):
        t = [rng.randint(0, 1000) for _ in range(4)]
        if sum(t) == 0:
            t[0] = 1
        got = weighted_prf(ConfusionMatrix(*t))
        want = definitional_prf(*t)
        worst = max(worst, max(abs(g - float(w)) for g, w in zip(got, want)))
        wr_exact &= got[1] == float(Fraction(t[0] + t[2], sum(t)))
    ok = worst <= 1e-12 and wr_exact
    verdict(capsys, 2, ok, f"weighted P/R/F: 1000 matrices, max |diff| {worst:.2e}, WR == accuracy: {wr_exact}")


# 3


def test_ac3_stratified_folds(capsys):
    rng = random.Random(3)
    partitions, spread = True, 0
    for i in range(500):
        n1, n0 = rng.randint(10, 200), rng.randint(10, 200)
        y = [1] * n1 + [0] * n0
        rng.shuffle(y)
        folds = stratified_kfold(y, 10, seed=i)
        partitions &= sorted(np.concatenate(folds).tolist()) == list(range(len(y)))
        for c in (0, 1):
            counts = [f[c] for f in fold_counts(folds, y)]
            spread = max(spread, max(counts) - min(counts))
    ok = partitions and spread <= 1
    verdict(capsys, 3, ok, f"stratified 10-fold: 500 label sets, partitions={partitions}, max per-class spread {spread}")


# 4


def test_ac4_smote_geometry(capsys):
    rng = np.random.default_rng(4)
    balanced, members, n_synth = True, True, 0
    for i in range(200):
        n_min = int(rng.integers(2, 15))
        n_maj = int(rng.integers(n_min + 1, 60))
        d = int(rng.integers(1, 5))
        X = rng.normal(size=(n_min + n_maj, d))
        y = np.array([0] * n_min + [1] * n_maj)
        Xr, yr = resample(X, y, "smote", seed=i, k=5)
        balanced &= np.bincount(yr).tolist() == [n_maj, n_maj]
        mins = X[:n_min].tolist()
        k = min(5, n_min - 1)
        nbrs = [k_nearest(mins, j, k)[0] for j in range(n_min)]
        for p in Xr[len(y):]:
            n_synth += 1
            members &= any(on_segment(p, mins[j], mins[q], tol=1e-9) for j in range(n_min) for q in nbrs[j])
    ok = balanced and members
    verdict(capsys, 4, ok, f"SMOTE: 200 sets, balanced={balanced}, {n_synth} synthetic points on segments={members}")


# 5


def test_ac5_smo(capsys):
    start = time.perf_counter()
    rng = np.random.default_rng(5)
    X = rng.normal(size=(200, 10))
    w = rng.normal(size=10)
    w /= np.linalg.norm(w)
    y = (X @ w > 0).astype(int)
    X += np.outer(np.where(y == 1, 0.5, -0.5), w)  # margin 1 between the classes
    m = SVM().fit(X, y)
    acc = float(np.mean(m.predict(X) == y))
    Z = (X - m.mean_) / m.std_
    kkt = kkt_violation(m.alpha_, np.where(y == 1, 1.0, -1.0), poly_kernel(Z, Z, 1, m.gamma_), m.b_, m.C)
    Xx = np.array([[1, 1], [-1, -1], [1, -1], [-1, 1]] * 10, dtype=float)
    yx = np.array([1, 1, 0, 0] * 10)
    lin = float(np.mean(SVM(degree=1).fit(Xx, yx).predict(Xx) == yx))
    quad = float(np.mean(SVM(degree=2).fit(Xx, yx).predict(Xx) == yx))
    elapsed = time.perf_counter() - start
    ok = acc == 1.0 and kkt < 1e-3 and quad == 1.0 and lin <= 0.75 and elapsed < 30
    verdict(capsys, 5, ok, f"SMO: separable acc {acc}, KKT {kkt:.1e}; XOR deg1 {lin}, deg2 {quad}; {elapsed:.2f}s")


# 6


def test_ac6_gnb_closed_form(capsys):
    rng = np.random.default_rng(6)
    X = np.concatenate([rng.normal(0.0, 1.0, 400), rng.normal(3.0, 2.0, 600)])[:, None]
    y = np.repeat([0, 1], [400, 600])
    m = GaussianNB().fit(X, y)
    roots = gaussian_boundary(m.theta_[0, 0], m.var_[0, 0], m.theta_[1, 0], m.var_[1, 0],
                              m.class_prior_[0], m.class_prior_[1])
    analytic = [r for r in roots if m.theta_[0, 0] < r < m.theta_[1, 0]][0]
    # locate the predicted boundary by bisection on the decision
    lo, hi = float(m.theta_[0, 0]), float(m.theta_[1, 0])
    for _ in range(200):
        mid = (lo + hi) / 2
        if m.predict(np.array([[mid]]))[0] == 0:
            lo = mid
        else:
            hi = mid
    gap = abs((lo + hi) / 2 - analytic)
    grid = np.linspace(-10, 15, 2001)[:, None]
    sums = m.predict_proba(grid).sum(axis=1)
    worst = float(np.max(np.abs(sums - 1.0)))
    ok = gap <= 1e-6 and worst <= 1e-12
    verdict(capsys, 6, ok, f"GNB: boundary {analytic:.6f}, |predicted - analytic| {gap:.1e}, posterior sum err {worst:.1e}")


# 7


def test_ac7_random_forest(capsys):
    rng = np.random.default_rng(7)
    X = rng.normal(size=(300, 8))
    y = (X[:, 0] + 0.5 * X[:, 1] > 0).astype(int)
    a = RandomForest(100, seed=11, n_jobs=1).fit(X, y)
    b = RandomForest(100, seed=11, n_jobs=4).fit(X, y)
    same = np.array_equal(a.decision_scores(X), b.decision_scores(X)) and np.array_equal(
        a.feature_importances_, b.feature_importances_)
    acc = float(np.mean(a.predict(X) == y))
    Xs = np.vstack([rng.normal(-3, 1, size=(100, 3)), rng.normal(3, 1, size=(100, 3))])
    ys = np.repeat([0, 1], 100)
    auc = roc_curve(RandomForest(100, seed=0).fit(Xs, ys).decision_scores(Xs), ys)[1]
    ok = same and acc >= 0.95 and auc == 1.0
    verdict(capsys, 7, ok, f"RF: identical across 1/4 threads={same}, training acc {acc:.3f}, separable AUC {auc}")


# 8, 9


@pytest.fixture(scope="module")
def e2e(planted):
    arts, labels, _ = planted
    ds = filter_for_criterion(arts, labels, E2E_CRITERION)
    cfg = ExperimentConfig(criterion=E2E_CRITERION, selector="pc", classifier="svm", feature_size=1000,
                           seed=0, k_folds=10, n_jobs=E2E_WORKERS)
    start = time.perf_counter()
    top, full = run_sweep(ds, cfg, [1000, "all"])
    return top, full, time.perf_counter() - start, len(ds)


@pytest.mark.slow
def test_ac8_end_to_end(capsys, e2e):
    top, full, elapsed, n = e2e
    ok = top.wf >= 0.85 and elapsed < 300
    verdict(capsys, 8, ok, f"planted corpus, criterion {E2E_CRITERION} ({n} instances), Pearson top-1000 + SVM, "
                           f"10-fold: WF {top.wf:.4f} (AUC {top.auc:.4f}); sweep of 1000 and all took {elapsed:.1f}s")


@pytest.mark.slow
def test_ac9_selection_efficacy(capsys, e2e):
    top, full, _, _ = e2e
    ok = top.wf >= full.wf - 0.01
    verdict(capsys, 9, ok, f"WF top-1000 {top.wf:.4f} vs all {full.wf:.4f} "
                           f"({full.effective_sizes[0]} features in fold 1)")


# 10


def test_ac10_explain_fidelity(capsys, planted):
    arts, labels, _ = planted
    ds = filter_for_criterion(arts, labels, E2E_CRITERION)
    featurizer = Featurizer()
    fitted, M = featurizer.fit_transform(DocCache(featurizer).get(ds.articles))
    y = np.asarray(ds.y)
    sets = [score_features(s, M.X, y, seed=0, fingerprint=M.fingerprint, n_jobs=E2E_WORKERS) for s in ("pc", "lr", "rf")]
    top = combined_top(sets, M.space, 16)

    def norm(w):
        out = normalize_words(w, featurizer.pipeline)
        return out[0] if out else ""

    signal = planted_feature_names(E2E_CRITERION, norm, fitted.lexicon)
    hits = [f.name for f in top if f.name in signal]
    money = "LEX:Money" in [f.name for f in top]
    ok = len(hits) >= 12 and money
    verdict(capsys, 10, ok, f"combined top-16: {len(hits)}/16 planted, LEX:Money surfaced={money}; "
                            f"first three {[f.name for f in top[:3]]}")


# 11


def test_ac11_roc(capsys):
    perfect = roc_curve([0.9, 0.8, 0.7, 0.2, 0.1], [1, 1, 1, 0, 0])[1]
    rng = np.random.default_rng(11)
    s = rng.random(10_000)
    yy = rng.integers(0, 2, 10_000)
    null = roc_curve(s, yy)[1]
    base = roc_curve(s, yy)
    invariant = all(roc_curve(f(s), yy) == base for f in (lambda v: 3 * v + 1, np.exp, np.sqrt, lambda v: v ** 3))
    ok = perfect == 1.0 and abs(null - 0.5) <= 0.03 and invariant
    verdict(capsys, 11, ok, f"ROC: perfect AUC {perfect}, random AUC {null:.4f}, monotone-invariant={invariant}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
