"""Labelled article collections: loading, validation, persistence and
per-criterion binary datasets.

Corpus files are UTF-8 JSON lines. Each line is one record, tagged by
``kind``::

    {"kind": "article", "id": "a1", "title": "...", "body": "...",
     "source_url": "https://example.com/a1", "links": ["https://..."],
     "fetched_at": "2018-03-01"}
    {"kind": "labels", "article_id": "a1",
     "labels": {"1": "S", "2": "NS", ..., "10": "NA"}}

Label tokens are exactly ``S``, ``NS`` and ``NA``.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence
from urllib.parse import urlsplit

from . import CRITERIA
from .errors import CorpusFormatError, DegenerateDatasetError, UsageError

log = logging.getLogger(__name__)


class Label(str, Enum):
    SATISFACTORY = "S"
    NOT_SATISFACTORY = "NS"
    NOT_APPLICABLE = "NA"


def is_absolute_url(url: str) -> bool:
    try:
        parts = urlsplit(url)
    except ValueError:
        return False
    return bool(parts.scheme) and bool(parts.hostname)


@dataclass(frozen=True)
class Article:
    id: str
    title: str
    body: str
    source_url: str
    links: tuple[str, ...] = ()
    fetched_at: str | None = None

    def validate(self) -> None:
        if not self.id:
            raise ValueError("article id is empty")
        if not self.body.strip():
            raise ValueError(f"article {self.id!r} has an empty body")
        if not is_absolute_url(self.source_url):
            raise ValueError(f"article {self.id!r}: source_url is not an absolute URL")
        for link in self.links:
            if not is_absolute_url(link):
                raise ValueError(f"article {self.id!r}: link {link!r} is not an absolute URL")

    def to_record(self) -> dict:
        rec = {
            "kind": "article",
            "id": self.id,
            "title": self.title,
            "body": self.body,
            "source_url": self.source_url,
            "links": list(self.links),
        }
        if self.fetched_at is not None:
            rec["fetched_at"] = self.fetched_at
        return rec


@dataclass(frozen=True)
class CriterionLabels:
    article_id: str
    labels: Mapping[int, Label]

    def __post_init__(self):
        if sorted(self.labels) != list(CRITERIA):
            raise ValueError(
                f"labels for {self.article_id!r} must cover criteria 1..10 exactly"
            )

    def __getitem__(self, criterion: int) -> Label:
        return self.labels[criterion]

    def to_record(self) -> dict:
        return {
            "kind": "labels",
            "article_id": self.article_id,
            "labels": {str(c): self.labels[c].value for c in CRITERIA},
        }


@dataclass(frozen=True)
class BinaryDataset:
    """Articles usable for one criterion; ``y`` is 1 for Satisfactory, 0 otherwise."""

    criterion: int
    articles: tuple[Article, ...]
    y: tuple[int, ...]
    counts: Mapping[str, int] = field(default_factory=dict)

    def __len__(self):
        return len(self.articles)

    @property
    def ids(self) -> list[str]:
        return [a.id for a in self.articles]


def parse_labels(raw, line: int | None = None) -> dict[int, Label]:
    if isinstance(raw, list):
        if len(raw) != 10:
            raise CorpusFormatError("label list must have 10 entries", line)
        raw = {str(i + 1): tok for i, tok in enumerate(raw)}
    if not isinstance(raw, dict):
        raise CorpusFormatError("labels must be an object or a list", line)
    out: dict[int, Label] = {}
    for key, tok in raw.items():
        try:
            crit = int(key)
        except (TypeError, ValueError):
            raise CorpusFormatError(f"bad criterion key {key!r}", line) from None
        if crit not in CRITERIA:
            raise CorpusFormatError(f"criterion {crit} out of range 1..10", line)
        try:
            out[crit] = Label(tok)
        except ValueError:
            raise CorpusFormatError(f"unknown label token {tok!r}", line) from None
    if sorted(out) != list(CRITERIA):
        raise CorpusFormatError("labels must cover criteria 1..10 exactly", line)
    return out


def _article_from_record(rec: dict, line: int | None) -> Article:
    try:
        art = Article(
            id=str(rec["id"]),
            title=str(rec.get("title", "")),
            body=str(rec["body"]),
            source_url=str(rec["source_url"]),
            links=tuple(str(u) for u in rec.get("links", ())),
            fetched_at=rec.get("fetched_at"),
        )
    except KeyError as exc:
        raise CorpusFormatError(f"article record missing field {exc.args[0]!r}", line) from None
    try:
        art.validate()
    except ValueError as exc:
        raise CorpusFormatError(str(exc), line) from None
    return art


def _read_records(path: Path):
    with open(path, encoding="utf-8") as fh:
        for lineno, text in enumerate(fh, start=1):
            if not text.strip():
                continue
            try:
                rec = json.loads(text)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"malformed record: {exc.msg}", lineno) from None
            if not isinstance(rec, dict):
                raise CorpusFormatError("record is not an object", lineno)
            yield lineno, rec


def load_corpus(path) -> tuple[list[Article], list[CriterionLabels]]:
    """Read and validate a corpus file.

    Raises :class:`CorpusFormatError` (with the line number) on malformed
    records, unknown label tokens, duplicate ids and labels that point at
    articles the file does not contain.
    """
    path = Path(path)
    articles: list[Article] = []
    labels: list[CriterionLabels] = []
    seen: set[str] = set()
    label_lines: list[tuple[int, CriterionLabels]] = []
    labelled: set[str] = set()
    for lineno, rec in _read_records(path):
        kind = rec.get("kind")
        if kind == "article":
            art = _article_from_record(rec, lineno)
            if art.id in seen:
                raise CorpusFormatError(f"duplicate article id {art.id!r}", lineno)
            seen.add(art.id)
            articles.append(art)
        elif kind == "labels":
            if "article_id" not in rec or "labels" not in rec:
                raise CorpusFormatError("labels record needs article_id and labels", lineno)
            aid = str(rec["article_id"])
            if aid in labelled:
                raise CorpusFormatError(f"duplicate labels for article {aid!r}", lineno)
            labelled.add(aid)
            label_lines.append((lineno, CriterionLabels(aid, parse_labels(rec["labels"], lineno))))
        else:
            raise CorpusFormatError(f"unknown record kind {kind!r}", lineno)
    for lineno, lab in label_lines:
        if lab.article_id not in seen:
            raise CorpusFormatError(
                f"labels reference unknown article id {lab.article_id!r}", lineno
            )
        labels.append(lab)
    return articles, labels


def save_corpus(path, articles: Sequence[Article], labels: Sequence[CriterionLabels]) -> None:
    """Write articles then label records, one JSON object per line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for art in articles:
            fh.write(json.dumps(art.to_record(), ensure_ascii=False, sort_keys=True) + "\n")
        for lab in labels:
            fh.write(json.dumps(lab.to_record(), ensure_ascii=False, sort_keys=True) + "\n")


def ingest_raw(path) -> tuple[list[Article], list[CriterionLabels]]:
    """Read a raw export where every line is an article with inline ``labels``.

    Files already in corpus format are accepted too.
    """
    path = Path(path)
    articles, labels = [], []
    seen: set[str] = set()
    for lineno, rec in _read_records(path):
        kind = rec.get("kind", "article")
        if kind == "labels":
            labels.append(CriterionLabels(str(rec.get("article_id")), parse_labels(rec.get("labels"), lineno)))
            continue
        art = _article_from_record(rec, lineno)
        if art.id in seen:
            raise CorpusFormatError(f"duplicate article id {art.id!r}", lineno)
        seen.add(art.id)
        articles.append(art)
        if "labels" in rec:
            labels.append(CriterionLabels(art.id, parse_labels(rec["labels"], lineno)))
    for lab in labels:
        if lab.article_id not in seen:
            raise CorpusFormatError(f"labels reference unknown article id {lab.article_id!r}")
    return articles, labels


def filter_for_criterion(
    articles: Sequence[Article], labels: Iterable[CriterionLabels], criterion: int
) -> BinaryDataset:
    """Drop Not Applicable instances and encode the rest as 1 (S) / 0 (NS)."""
    if criterion not in CRITERIA:
        raise UsageError(f"criterion must be in 1..10, got {criterion!r}")
    by_id = {lab.article_id: lab for lab in labels}
    kept, y = [], []
    n_na = 0
    for art in articles:
        lab = by_id.get(art.id)
        if lab is None:
            continue
        tok = lab[criterion]
        if tok is Label.NOT_APPLICABLE:
            n_na += 1
            continue
        kept.append(art)
        y.append(1 if tok is Label.SATISFACTORY else 0)
    n_s = sum(y)
    n_ns = len(y) - n_s
    if n_s < 2 or n_ns < 2:
        raise DegenerateDatasetError(
            f"criterion {criterion}: need at least 2 instances per class, got S={n_s} NS={n_ns}"
        )
    log.info("criterion %d: S=%d NS=%d (dropped NA=%d)", criterion, n_s, n_ns, n_na)
    return BinaryDataset(criterion, tuple(kept), tuple(y), {"S": n_s, "NS": n_ns, "NA": n_na})


def corpus_stats(
    articles: Sequence[Article], labels: Iterable[CriterionLabels]
) -> dict[int, dict[str, int]]:
    """Per-criterion S / NS / NA counts over the labelled articles."""
    table = {c: {"S": 0, "NS": 0, "NA": 0} for c in CRITERIA}
    ids = {a.id for a in articles}
    for lab in labels:
        if lab.article_id not in ids:
            continue
        for c in CRITERIA:
            table[c][lab[c].value] += 1
    return table


def format_stats(table: Mapping[int, Mapping[str, int]]) -> str:
    lines = ["criterion,S,NS,NA"]
    for c in CRITERIA:
        row = table[c]
        lines.append(f"{c},{row['S']},{row['NS']},{row['NA']}")
    return "\n".join(lines)

