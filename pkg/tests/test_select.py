import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import assume, given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from healthgrade.errors import DegenerateDatasetError, UsageError
from healthgrade.featurize.space import FeatureSpace
from healthgrade.select import (
    FeatureScores,
    combined_top,
    format_scores,
    lr_importance,
    pearson_scores,
    ranks,
    rf_importance,
    score_features,
    top_k,
)


def _space(m):
    return FeatureSpace(tuple(f"f{i}" for i in range(m)), ("TFIDF",) * m)


def test_pearson_identity_feature():
    y = np.array([0, 1, 0, 1, 1])
    X = np.column_stack([y, np.ones(5)])
    s = pearson_scores(X, y).scores
    assert s[0] == pytest.approx(1.0, abs=1e-12)
    assert s[1] == 0.0


def test_pearson_sparse_matches_dense():
    rng = np.random.default_rng(0)
    X = rng.random((30, 5)) * (rng.random((30, 5)) > 0.5)
    y = rng.integers(0, 2, 30)
    y[:2] = [0, 1]
    a = pearson_scores(X, y).scores
    b = pearson_scores(sp.csr_matrix(X), y).scores
    assert np.allclose(a, b, atol=1e-12)


def test_pearson_against_numpy():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(40, 4))
    y = (X[:, 0] + rng.normal(size=40) > 0).astype(int)
    want = [abs(np.corrcoef(X[:, j], y)[0, 1]) for j in range(4)]
    assert np.allclose(pearson_scores(X, y).scores, want, atol=1e-12)


def test_single_class_rejected():
    with pytest.raises(DegenerateDatasetError):
        pearson_scores(np.ones((4, 2)), [1, 1, 1, 1])


cols = hnp.arrays(np.float64, st.integers(6, 20), elements=st.floats(-100, 100, allow_nan=False))


@given(cols, st.floats(0.01, 50), st.floats(-50, 50), st.randoms(use_true_random=False))
def test_pearson_affine_invariant(x, a, b, rnd):
    assume(np.ptp(x) > 1e-3)
    y = np.array([rnd.randint(0, 1) for _ in x])
    y[0], y[1] = 0, 1
    s1 = pearson_scores(x[:, None], y).scores[0]
    s2 = pearson_scores((a * x + b)[:, None], y).scores[0]
    assert 0.0 <= s1 <= 1.0
    assert s1 == pytest.approx(s2, abs=1e-6)


def _separable(n=60, seed=0):
    rng = np.random.default_rng(seed)
    y = np.repeat([0, 1], n // 2)
    sep = np.where(y == 1, 1.0, -1.0) + rng.normal(0, 0.1, n)
    noise = rng.normal(size=n)
    return np.column_stack([sep, noise, np.zeros(n), sep]), y


def test_lr_separating_feature_wins():
    X, y = _separable()
    s = lr_importance(X[:, :2], y).scores
    assert s[0] > s[1]


def test_lr_zero_column_and_duplicates():
    X, y = _separable()
    s = lr_importance(X, y).scores
    assert s[2] == 0.0
    assert s[0] == pytest.approx(s[3], rel=1e-9)


def test_rf_importance_normalized_and_deterministic():
    X, y = _separable()
    a = rf_importance(X, y, n_trees=20, seed=3).scores
    b = rf_importance(X, y, n_trees=20, seed=3).scores
    assert np.array_equal(a, b)
    assert a.sum() == pytest.approx(1.0)
    assert a[2] == 0.0


def test_score_features_aliases():
    X, y = _separable()
    assert score_features("pc", X, y).evaluator == "CoAE-PC"
    with pytest.raises(UsageError):
        score_features("chi2", X, y)


def test_top_k_example():
    assert top_k([0.1, 0.9, 0.5], 2) == [1, 2]


def test_top_k_ties_lower_index():
    assert top_k([0.5, 0.5, 0.5], 2) == [0, 1]


@pytest.mark.parametrize("k", [0, 4])
def test_top_k_bounds(k):
    with pytest.raises(UsageError):
        top_k([0.1, 0.2, 0.3], k)


@given(st.lists(st.floats(0, 1), min_size=2, max_size=30), st.data())
def test_top_k_monotone(scores, data):
    k = data.draw(st.integers(1, len(scores) - 1))
    assert set(top_k(scores, k)) <= set(top_k(scores, k + 1))
    r = ranks(scores)
    assert sorted(r.tolist()) == list(range(1, len(scores) + 1))


def _fs(name, scores):
    return FeatureScores(name, np.asarray(scores, dtype=float))


def test_combined_identical_lists():
    rng = np.random.default_rng(0)
    s = rng.random(40)
    sets = [_fs(e, s) for e in ("CoAE-PC", "ClAE-LR", "ClAE-RF")]
    out = combined_top(sets, _space(40), k=16)
    assert [c.index for c in out] == top_k(s, 16)
    assert all(c.common for c in out)


def test_combined_shared_first():
    sets = [
        _fs("CoAE-PC", [0.9, 0.1, 0.5, 0.3]),
        _fs("ClAE-LR", [5.0, 4.0, 0.0, 1.0]),
        _fs("ClAE-RF", [0.4, 0.3, 0.2, 0.1]),
    ]
    out = combined_top(sets, _space(4), k=2)
    assert out[0].index == 0
    assert out[0].evaluator_ranks == {"CoAE-PC": 1, "ClAE-LR": 1, "ClAE-RF": 1}


def test_combined_space_mismatch():
    with pytest.raises(UsageError):
        combined_top([_fs("CoAE-PC", [0.1, 0.2])], _space(3))


def test_scores_must_be_finite():
    with pytest.raises(ValueError):
        _fs("CoAE-PC", [np.nan])


def test_format_scores_header():
    text = format_scores(_fs("CoAE-PC", [0.2, 0.7]), _space(2))
    lines = text.splitlines()
    assert lines[0] == "name,family,score,rank"
    assert lines[1].startswith("f1,TFIDF,0.7,1")
