"""Heuristic person / organization recognizer over capitalised word runs.

Rules, applied per sentence to runs of capitalised tokens:

* a run opened by an honorific ("Dr.", "Prof.", ...) is a person;
* a run containing an organization suffix ("University", "Inc.", ...) is an
  organization ("of"/"for"/"and" may join capitalised words inside it);
* any other run of two or three title-case words is taken as a person name.

Leading function words ("The", "A", ...) are trimmed from a run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

from .tagger import split_sentences, tokenize

HONORIFICS = frozenset({"dr", "mr", "mrs", "ms", "prof", "sir", "dame", "rev"})
ORG_SUFFIXES = frozenset(
    {
        "university", "inc", "corp", "corporation", "co", "ltd", "llc", "clinic", "hospital",
        "institute", "institutes", "center", "centre", "centers", "foundation", "association",
        "society", "college", "school", "agency", "department", "laboratories", "labs",
        "pharmaceuticals", "group", "council", "organization", "administration",
    }
)
CONNECTORS = frozenset({"of", "for", "and"})
LEADING_FUNCTION_WORDS = frozenset(
    {"the", "a", "an", "this", "that", "these", "those", "it", "its", "he", "she", "they", "we",
     "i", "in", "at", "on", "but", "and", "some", "many", "most", "more", "our", "their", "his", "her"}
)


@dataclass(frozen=True)
class Entity:
    text: str
    label: str  # PER or ORG


class EntityRecognizer(Protocol):
    def recognize(self, text: str) -> list[Entity]: ...


def _bare(tok: str) -> str:
    return tok.rstrip(".").lower()


def _is_cap(tok: str) -> bool:
    return tok[:1].isupper()


class GazetteerRecognizer:
    def __init__(self, honorifics=HONORIFICS, org_suffixes=ORG_SUFFIXES):
        self.honorifics = frozenset(honorifics)
        self.org_suffixes = frozenset(org_suffixes)

    def _runs(self, tokens: list[str]) -> list[list[str]]:
        runs, cur = [], []
        for i, tok in enumerate(tokens):
            if _is_cap(tok):
                cur.append(tok)
                continue
            nxt = tokens[i + 1] if i + 1 < len(tokens) else ""
            joinable = (
                tok in CONNECTORS and cur and _is_cap(nxt)
                and _bare(cur[0]) not in self.honorifics
            )
            if joinable:
                cur.append(tok)
            elif cur:
                runs.append(cur)
                cur = []
        if cur:
            runs.append(cur)
        return runs

    def _classify(self, run: list[str]) -> list[Entity]:
        while run and _bare(run[0]) in LEADING_FUNCTION_WORDS:
            run = run[1:]
        if not run:
            return []
        if _bare(run[0]) in self.honorifics:
            if len(run) < 2:
                return []
            # "Dr. Jane Smith, Mayo Clinic" style runs: honorific + two names, rest is the org
            if len(run) > 3 and any(_bare(t) in self.org_suffixes for t in run[3:]):
                return [Entity(" ".join(run[:3]), "PER"), Entity(" ".join(run[3:]), "ORG")]
            return [Entity(" ".join(run[:4]), "PER")]
        if any(_bare(t) in self.org_suffixes for t in run):
            return [Entity(" ".join(run), "ORG")]
        if 2 <= len(run) <= 3 and all(t.isalpha() and t[1:].islower() for t in run):
            return [Entity(" ".join(run), "PER")]
        return []

    def recognize(self, text: str) -> list[Entity]:
        out = []
        for sent in split_sentences(text):
            for run in self._runs(tokenize(sent)):
                out.extend(self._classify(run))
        return out


def entity_counts(text: str, recognizer: EntityRecognizer) -> tuple[int, int]:
    ents = recognizer.recognize(text)
    return sum(e.label == "PER" for e in ents), sum(e.label == "ORG" for e in ents)


def distinct_ratio(tokens) -> float:
    return len(set(tokens)) / len(tokens) if tokens else 0.0
