"""Independent reference implementations used to cross-check the package.

Each oracle is written from the definition, in the slowest obvious way, and
shares no code with ``healthgrade``.
"""

import math
from fractions import Fraction
from itertools import product


def brute_tfidf(docs, min_df=3, max_df_ratio=Fraction(9, 10), max_features=4000):
    """Return ``(terms, rows)`` where ``rows[d][t]`` is the TF-IDF weight."""
    n = len(docs)
    vocab = sorted({t for d in docs for t in d})
    df = {t: sum(1 for d in docs if t in d) for t in vocab}
    cf = {t: sum(d.count(t) for d in docs) for t in vocab}
    keep = [t for t in vocab if df[t] >= min_df and Fraction(df[t]) <= max_df_ratio * n]
    keep = sorted(keep, key=lambda t: (-cf[t], t))[:max_features]
    rows = []
    for d in docs:
        row = {}
        for t in keep:
            c = d.count(t)
            if c:
                row[t] = (c / len(d)) * (1.0 + math.log(n / df[t]))
        rows.append(row)
    return keep, rows


def brute_cosine(a: dict, b: dict) -> float:
    keys = set(a) | set(b)
    dot = sum(a.get(k, 0.0) * b.get(k, 0.0) for k in keys)
    na = math.sqrt(sum(v * v for v in a.values()))
    nb = math.sqrt(sum(v * v for v in b.values()))
    return 0.0 if na == 0 or nb == 0 else dot / (na * nb)


def definitional_prf(tp, fp, tn, fn):
    """Weighted P/R/F from per-class metrics, exact rationals throughout."""
    classes = [
        # (true positives for this class, predicted as this class, actually this class)
        (tp, tp + fp, tp + fn),
        (tn, tn + fn, tn + fp),
    ]
    total = tp + fp + tn + fn
    wp = wr = wf = Fraction(0)
    for hits, predicted, actual in classes:
        p = Fraction(hits, predicted) if predicted else Fraction(0)
        r = Fraction(hits, actual) if actual else Fraction(0)
        f = (2 * p * r) / (p + r) if (p + r) != 0 else Fraction(0)
        wp += p * actual
        wr += r * actual
        wf += f * actual
    return wp / total, wr / total, wf / total


def rank_auc(scores, labels) -> float:
    """P(random positive outscores random negative), ties count one half."""
    pos = [s for s, y in zip(scores, labels) if y]
    neg = [s for s, y in zip(scores, labels) if not y]
    wins = 0.0
    for p, q in product(pos, neg):
        wins += 1.0 if p > q else 0.5 if p == q else 0.0
    return wins / (len(pos) * len(neg))


def gaussian_boundary(mu0, var0, mu1, var1, prior0, prior1):
    """Points where the two weighted Gaussian densities are equal."""
    # log N(x; mu1, var1) + log p1 = log N(x; mu0, var0) + log p0, a quadratic in x
    a = 1 / (2 * var0) - 1 / (2 * var1)
    b = mu1 / var1 - mu0 / var0
    c = (mu0 ** 2) / (2 * var0) - (mu1 ** 2) / (2 * var1) + math.log(prior1 / prior0) \
        - 0.5 * math.log(var1 / var0)
    if abs(a) < 1e-15:
        return [-c / b]
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    r = math.sqrt(disc)
    return sorted({(-b - r) / (2 * a), (-b + r) / (2 * a)})


def on_segment(p, x, z, tol=1e-9) -> bool:
    """Whether ``p = x + u (z - x)`` for some ``u`` in [0, 1], within ``tol``."""
    d = [zi - xi for xi, zi in zip(x, z)]
    dd = sum(v * v for v in d)
    if dd == 0:
        return all(abs(pi - xi) <= tol for pi, xi in zip(p, x))
    u = sum((pi - xi) * di for pi, xi, di in zip(p, x, d)) / dd
    if u < -tol or u > 1 + tol:
        return False
    return all(abs(pi - (xi + u * di)) <= tol for pi, xi, di in zip(p, x, d))


def k_nearest(points, i, k):
    """Indices of the k nearest other points to ``points[i]`` by Euclidean distance."""
    dists = []
    for j, q in enumerate(points):
        if j != i:
            dists.append((sum((a - b) ** 2 for a, b in zip(points[i], q)), j))
    dists.sort()
    return [j for _, j in dists[:k]], dists


def fold_counts(folds, y):
    """Per-fold count of each class."""
    classes = sorted(set(y))
    return [{c: sum(1 for i in f if y[i] == c) for c in classes} for f in folds]
