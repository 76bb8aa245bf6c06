"""Tag-count and word+tag count features."""

from __future__ import annotations

from collections import Counter
from typing import Iterable, Sequence


def posword_key(word: str, tag: str) -> str:
    return f"{word.lower()}_{tag}"


def pos_features(tagged: Sequence[tuple[str, str]], tagset: Sequence[str]):
    """Return ``(tag_counts, posword_counts)``.

    ``tag_counts`` is a list aligned with ``tagset``; ``posword_counts`` maps
    ``word_TAG`` keys to counts. Tags outside the tagset raise ``ValueError``.
    """
    index = {t: i for i, t in enumerate(tagset)}
    tag_counts = [0] * len(tagset)
    words: Counter = Counter()
    for word, tag in tagged:
        j = index.get(tag)
        if j is None:
            raise ValueError(f"tag {tag!r} is not in the tagset")
        tag_counts[j] += 1
        words[posword_key(word, tag)] += 1
    return tag_counts, dict(words)


def fit_posword_vocab(tagged_docs: Iterable[Sequence[tuple[str, str]]], cap: int = 50_000) -> tuple[str, ...]:
    """Keys seen in training, most frequent first (ties lexicographic), cut at ``cap``."""
    freq: Counter = Counter()
    for doc in tagged_docs:
        freq.update(posword_key(w, t) for w, t in doc)
    keys = sorted(freq, key=lambda k: (-freq[k], k))
    return tuple(keys[:cap])
