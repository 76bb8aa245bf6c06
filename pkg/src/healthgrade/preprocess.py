"""Text cleaning: contraction expansion, noise removal, word normalization.

Every function here is a pure function of its inputs and the
:class:`PipelineConfig`, so documents can be processed in any order or in
parallel.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Mapping

from nltk.stem import PorterStemmer

from .corpus import Article

log = logging.getLogger(__name__)

NORMALIZERS = ("stem", "lemma-then-stem")

# Irregular forms Porter cannot reach on its own.
LEMMA_EXCEPTIONS = {
    "children": "child",
    "women": "woman",
    "men": "man",
    "people": "person",
    "mice": "mouse",
    "feet": "foot",
    "teeth": "tooth",
    "geese": "goose",
    "lice": "louse",
    "oxen": "ox",
    "data": "datum",
    "criteria": "criterion",
    "phenomena": "phenomenon",
    "analyses": "analysis",
    "diagnoses": "diagnosis",
    "prognoses": "prognosis",
    "theses": "thesis",
    "bacteria": "bacterium",
    "ran": "run",
    "went": "go",
    "gone": "go",
    "took": "take",
    "taken": "take",
    "found": "find",
    "made": "make",
    "gave": "give",
    "given": "give",
    "saw": "see",
    "seen": "see",
    "told": "tell",
    "said": "say",
    "thought": "think",
    "brought": "bring",
    "bought": "buy",
    "paid": "pay",
    "spent": "spend",
    "fell": "fall",
    "fallen": "fall",
    "began": "begin",
    "begun": "begin",
    "grew": "grow",
    "grown": "grow",
    "knew": "know",
    "known": "know",
    "wrote": "write",
    "written": "write",
    "ate": "eat",
    "eaten": "eat",
    "better": "good",
    "best": "good",
    "worse": "bad",
    "worst": "bad",
    "died": "die",
    "dying": "die",
    "lay": "lie",
}

_TAG_RE = re.compile(r"<[^>]*>")
_ENTITY_RE = re.compile(r"&#?\w+;")
_URL_RE = re.compile(r"(?:https?://|ftp://|www\.)\S+", re.IGNORECASE)
_NONWORD_RE = re.compile(r"[\W_]+", re.UNICODE)
_DIGIT_RE = re.compile(r"\d+")
_SPACE_RE = re.compile(r"\s+")


def _data_text(name: str) -> str:
    return resources.files("healthgrade.data").joinpath(name).read_text(encoding="utf-8")


def read_contraction_table(path=None) -> dict[str, str]:
    """Parse ``key<TAB>expansion`` lines; keys are lowercased."""
    text = Path(path).read_text(encoding="utf-8") if path else _data_text("contractions.tsv")
    table = {}
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        key, _, expansion = line.partition("\t")
        if not expansion:
            raise ValueError(f"contraction line without a tab: {line!r}")
        table[key.strip().lower()] = expansion.strip()
    return table


def read_stopwords(path=None) -> frozenset[str]:
    text = Path(path).read_text(encoding="utf-8") if path else _data_text("stopwords.txt")
    return frozenset(
        w.strip().lower() for w in text.splitlines() if w.strip() and not w.startswith("#")
    )


@dataclass(frozen=True)
class PipelineConfig:
    contraction_table: Mapping[str, str] = field(default_factory=read_contraction_table)
    stopword_list: frozenset[str] = field(default_factory=read_stopwords)
    remove_numbers: bool = True
    normalizer: str = "lemma-then-stem"
    keep_title_separately: bool = True

    def __post_init__(self):
        if self.normalizer not in NORMALIZERS:
            raise ValueError(f"normalizer must be one of {NORMALIZERS}, got {self.normalizer!r}")
        bad = [k for k in self.contraction_table if k != k.lower()]
        if bad:
            raise ValueError(f"contraction keys must be lowercase: {bad[:3]}")

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        """Build a config from a JSON file.

        Recognised keys: ``contractions`` and ``stopwords`` (paths),
        ``remove_numbers``, ``normalizer``, ``keep_title_separately``.
        Relative paths resolve against the config file's directory.
        """
        path = Path(path)
        raw = json.loads(path.read_text(encoding="utf-8"))
        kwargs = {}
        base = path.parent
        if raw.get("contractions"):
            kwargs["contraction_table"] = read_contraction_table(base / raw["contractions"])
        if raw.get("stopwords"):
            kwargs["stopword_list"] = read_stopwords(base / raw["stopwords"])
        for key in ("remove_numbers", "normalizer", "keep_title_separately"):
            if key in raw:
                kwargs[key] = raw[key]
        return cls(**kwargs)

    def describe(self) -> dict:
        return {
            "contractions": len(self.contraction_table),
            "stopwords": len(self.stopword_list),
            "remove_numbers": self.remove_numbers,
            "normalizer": self.normalizer,
            "keep_title_separately": self.keep_title_separately,
        }


@lru_cache(maxsize=8)
def _contraction_regex(keys: tuple[str, ...]) -> re.Pattern:
    # longest first so "i'd've" wins over "i'd"
    alts = "|".join(re.escape(k) for k in sorted(keys, key=len, reverse=True))
    return re.compile(rf"(?<![\w'])(?:{alts})(?![\w'])", re.IGNORECASE)


def expand_contractions(text: str, contraction_table: Mapping[str, str]) -> str:
    if not text or not contraction_table:
        return text
    # typographic apostrophes are common in scraped news text
    text = text.replace("’", "'")
    pattern = _contraction_regex(tuple(sorted(contraction_table)))
    return pattern.sub(lambda m: contraction_table[m.group(0).lower()], text)


def remove_noise(text: str, config: PipelineConfig) -> str:
    text = _TAG_RE.sub(" ", text)
    text = _ENTITY_RE.sub(" ", text)
    text = _URL_RE.sub(" ", text)
    text = _NONWORD_RE.sub(" ", text)
    if config.remove_numbers:
        text = _DIGIT_RE.sub(" ", text)
    return _SPACE_RE.sub(" ", text).strip().lower()


_stemmer = PorterStemmer()


@lru_cache(maxsize=200_000)
def _normalize_token(token: str, normalizer: str) -> str:
    # Porter is not idempotent ("agreed" -> "agre" -> "agr"), so iterate to a
    # fixed point; if it cycles, pick the smallest member so any start point
    # in the cycle lands on the same form.
    seen = []
    cur = token
    while cur not in seen:
        seen.append(cur)
        if normalizer == "lemma-then-stem":
            cur = LEMMA_EXCEPTIONS.get(cur, cur)
        cur = _stemmer.stem(cur)
    cycle = seen[seen.index(cur):]
    return min(cycle)


def normalize_words(text: str, config: PipelineConfig) -> list[str]:
    stop = config.stopword_list
    out = []
    for tok in text.split():
        if tok in stop:
            continue
        norm = _normalize_token(tok, config.normalizer)
        if norm and norm not in stop:
            out.append(norm)
    return out


def clean_text(text: str, config: PipelineConfig) -> list[str]:
    text = expand_contractions(text, config.contraction_table)
    return normalize_words(remove_noise(text, config), config)


@dataclass(frozen=True)
class CleanDocument:
    article_id: str
    title_tokens: tuple[str, ...]
    body_tokens: tuple[str, ...]
    raw_body_kept: str

    def to_record(self) -> dict:
        return {
            "article_id": self.article_id,
            "title_tokens": list(self.title_tokens),
            "body_tokens": list(self.body_tokens),
        }


def preprocess(article: Article, config: PipelineConfig) -> CleanDocument:
    title = tuple(clean_text(article.title, config))
    body = tuple(clean_text(article.body, config))
    if not config.keep_title_separately:
        body = title + body
    if not body:
        log.warning("article %s: body is empty after cleaning; its features will be zero", article.id)
    return CleanDocument(article.id, title, body, article.body)
