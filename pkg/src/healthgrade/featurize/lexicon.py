"""Category-lexicon word counting (LIWC-style percent-of-words scores).

Lexicon files hold one ``category<TAB>pattern`` entry per line. A pattern
ending in ``*`` matches any token with that prefix; otherwise the token must
match exactly. Categories keep the order of their first appearance.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

STRUCTURAL = ("WC", "WPS", "Sixltr")


@dataclass(frozen=True)
class CategoryLexicon:
    categories: tuple[tuple[str, tuple[str, ...]], ...]

    def __post_init__(self):
        names = [name for name, _ in self.categories]
        if len(set(names)) != len(names):
            raise ValueError("category names must be unique")
        for name, patterns in self.categories:
            if not patterns:
                raise ValueError(f"category {name!r} has no patterns")
            if name in STRUCTURAL:
                raise ValueError(f"category name {name!r} clashes with a structural feature")
        exact: dict[str, list[int]] = {}
        prefixes: list[tuple[str, int]] = []
        for i, (_, patterns) in enumerate(self.categories):
            for p in patterns:
                if p.endswith("*"):
                    prefixes.append((p[:-1], i))
                else:
                    exact.setdefault(p, []).append(i)
        object.__setattr__(self, "_exact", exact)
        object.__setattr__(self, "_prefixes", tuple(prefixes))

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.categories]

    def feature_names(self) -> list[str]:
        return self.names + list(STRUCTURAL)

    def match(self, token: str) -> set[int]:
        hits = set(self._exact.get(token, ()))  # type: ignore[attr-defined]
        for prefix, i in self._prefixes:  # type: ignore[attr-defined]
            if token.startswith(prefix):
                hits.add(i)
        return hits

    @classmethod
    def from_text(cls, text: str) -> "CategoryLexicon":
        cats: dict[str, list[str]] = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip() or line.startswith("#"):
                continue
            name, sep, pattern = line.partition("\t")
            if not sep or not pattern.strip():
                raise ValueError(f"lexicon line {lineno}: expected 'category<TAB>pattern'")
            cats.setdefault(name.strip(), []).append(pattern.strip().lower())
        return cls(tuple((n, tuple(p)) for n, p in cats.items()))

    @classmethod
    def load(cls, path=None) -> "CategoryLexicon":
        if path is None:
            text = resources.files("healthgrade.data").joinpath("lexicon.tsv").read_text("utf-8")
        else:
            text = Path(path).read_text(encoding="utf-8")
        return cls.from_text(text)

    def to_dict(self) -> dict:
        return {"categories": [[n, list(p)] for n, p in self.categories]}

    @classmethod
    def from_dict(cls, d: dict) -> "CategoryLexicon":
        return cls(tuple((n, tuple(p)) for n, p in d["categories"]))


def lexicon_features(
    tokens: Sequence[str], lexicon: CategoryLexicon, n_sentences: int | None = None
) -> list[float]:
    """One percent-of-words value per category, then WC, WPS and Sixltr.

    WPS is ``WC / n_sentences`` when a sentence count is supplied (the
    cleaned tokens no longer carry sentence boundaries), else WC itself.
    """
    n_cat = len(lexicon.categories)
    wc = len(tokens)
    if wc == 0:
        return [0.0] * (n_cat + len(STRUCTURAL))
    counts = [0] * n_cat
    long_words = 0
    for tok in tokens:
        for i in lexicon.match(tok):
            counts[i] += 1
        if len(tok) > 6:
            long_words += 1
    wps = wc / n_sentences if n_sentences else float(wc)
    return [100.0 * c / wc for c in counts] + [float(wc), wps, 100.0 * long_words / wc]
