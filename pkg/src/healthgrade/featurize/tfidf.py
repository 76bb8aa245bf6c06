"""Unigram TF-IDF with document-frequency pruning and a frequency cap."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..errors import DataError


@dataclass(frozen=True)
class TfidfModel:
    terms: tuple[str, ...]
    df: tuple[int, ...]
    n_docs: int
    min_df: int = 3
    max_df_ratio: float = 0.90
    max_features: int = 4000
    log_base: float = math.e

    def __post_init__(self):
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(self.terms)})

    @property
    def index(self) -> dict[str, int]:
        return self._index  # type: ignore[attr-defined]

    def __len__(self):
        return len(self.terms)

    def idf(self, term: str) -> float:
        return _idf(self.n_docs, self.df[self.index[term]], self.log_base)

    def idf_vector(self) -> list[float]:
        return [_idf(self.n_docs, d, self.log_base) for d in self.df]

    def to_dict(self) -> dict:
        return {
            "terms": list(self.terms),
            "df": list(self.df),
            "n_docs": self.n_docs,
            "min_df": self.min_df,
            "max_df_ratio": self.max_df_ratio,
            "max_features": self.max_features,
            "log_base": self.log_base,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TfidfModel":
        return cls(
            terms=tuple(d["terms"]),
            df=tuple(d["df"]),
            n_docs=d["n_docs"],
            min_df=d["min_df"],
            max_df_ratio=d["max_df_ratio"],
            max_features=d["max_features"],
            log_base=d["log_base"],
        )


def _idf(n_docs: int, df: int, base: float) -> float:
    if base == math.e:
        return 1.0 + math.log(n_docs / df)
    return 1.0 + math.log(n_docs / df, base)


def max_df_count(n_docs: int, ratio: float) -> int:
    """Largest document frequency a term may have and still be kept."""
    # Fraction(str(.)) keeps 0.9 * 100 from landing on 90.00000000000001
    return math.floor(Fraction(str(ratio)) * n_docs)


def fit_tfidf(
    docs: Sequence[Sequence[str]],
    min_df: int = 3,
    max_df_ratio: float = 0.90,
    max_features: int = 4000,
    log_base: float = math.e,
) -> TfidfModel:
    """Select the vocabulary.

    Terms appearing in fewer than ``min_df`` documents or in more than
    ``max_df_ratio`` of them are dropped. The survivors are ranked by total
    corpus frequency (ties: lexicographic) and cut at ``max_features``.
    """
    if len(docs) < 3:
        raise DataError(f"TF-IDF needs at least 3 documents, got {len(docs)}")
    n = len(docs)
    df: Counter = Counter()
    cf: Counter = Counter()
    for doc in docs:
        cf.update(doc)
        df.update(set(doc))
    ceiling = max_df_count(n, max_df_ratio)
    kept = [t for t, d in df.items() if min_df <= d <= ceiling]
    kept.sort(key=lambda t: (-cf[t], t))
    kept = kept[:max_features]
    if not kept:
        raise DataError("TF-IDF vocabulary is empty after document-frequency filtering")
    return TfidfModel(
        terms=tuple(kept),
        df=tuple(df[t] for t in kept),
        n_docs=n,
        min_df=min_df,
        max_df_ratio=max_df_ratio,
        max_features=max_features,
        log_base=log_base,
    )


def term_frequencies(doc: Sequence[str]) -> dict[str, float]:
    """Count of each term divided by the document length."""
    if not doc:
        return {}
    total = len(doc)
    return {t: c / total for t, c in Counter(doc).items()}


def tfidf_vector(model: TfidfModel, doc: Sequence[str]) -> dict[int, float]:
    """Sparse TF-IDF weights keyed by vocabulary index; OOV tokens are ignored."""
    out = {}
    idx = model.index
    for term, tf in term_frequencies(doc).items():
        j = idx.get(term)
        if j is not None:
            out[j] = tf * _idf(model.n_docs, model.df[j], model.log_base)
    return out


def cosine(u: dict[int, float], v: dict[int, float]) -> float:
    if not u or not v:
        return 0.0
    if len(u) > len(v):
        u, v = v, u
    dot = sum(w * v.get(j, 0.0) for j, w in u.items())
    su = sum(w * w for w in u.values())
    sv = sum(w * w for w in v.values())
    if su == 0.0 or sv == 0.0:
        return 0.0
    # sqrt(s*s) == s exactly, so identical inputs give exactly 1; clamp the rest
    denom = math.sqrt(su * sv)
    if denom == 0.0 or math.isinf(denom):  # product under/overflowed
        denom = math.sqrt(su) * math.sqrt(sv)
    return min(1.0, max(0.0, dot / denom))


def headline_body_similarity(title_tokens, body_tokens, model: TfidfModel) -> float:
    return cosine(tfidf_vector(model, title_tokens), tfidf_vector(model, body_tokens))
