"""Part-of-speech tagging: tokenizer, sentence splitter and an averaged
perceptron tagger (greedy left-to-right decoding, Collins-style averaging).

The tagger is behind the small :class:`Tagger` protocol so another
implementation can be dropped in. Weights ship as ``data/tagger.bin``.
"""

from __future__ import annotations

import random
import re
from collections import Counter, defaultdict
from importlib import resources
from typing import Iterable, Protocol, Sequence

import numpy as np

from ..errors import ArtifactError
from ..persist import read_blob, write_blob

# Penn Treebank word-level tags (LS dropped: list markers do not occur in news prose)
TAGSET = (
    "CC", "CD", "DT", "EX", "FW", "IN", "JJ", "JJR", "JJS", "MD", "NN", "NNS",
    "NNP", "NNPS", "PDT", "POS", "PRP", "PRP$", "RB", "RBR", "RBS", "RP", "SYM",
    "TO", "UH", "VB", "VBD", "VBG", "VBN", "VBP", "VBZ", "WDT", "WP", "WP$", "WRB",
)
TAGGER_MAGIC = b"HGPT"

ABBREVIATIONS = frozenset(
    "dr mr mrs ms prof st jr sr inc corp co ltd vs etc e.g i.e jan feb mar apr jun jul aug sep sept oct nov dec no".split()
)

_TOKEN_RE = re.compile(r"[A-Za-z]+(?:[-.][A-Za-z]+)*\.?|'s\b|\d+(?:[.,]\d+)*|[$%&]")
_SENT_BREAK_RE = re.compile(r"(?<=[.!?])[\"')\]]*\s+(?=[\"'(\[]?[A-Z0-9])")


class Tagger(Protocol):
    tagset: tuple[str, ...]

    def tag(self, tokens: Sequence[str]) -> list[tuple[str, str]]: ...


def split_sentences(text: str) -> list[str]:
    """Break on sentence-final punctuation followed by a capitalised word,
    except after a known abbreviation such as "Dr."."""
    parts = _SENT_BREAK_RE.split(text.strip()) if text.strip() else []
    out: list[str] = []
    for part in parts:
        if out:
            last = out[-1].split()[-1].rstrip(".").lower() if out[-1].split() else ""
            if last in ABBREVIATIONS or (len(last) == 1 and last.isalpha()):
                out[-1] = out[-1] + " " + part
                continue
        out.append(part)
    return [s for s in out if s.strip()]


def tokenize(sentence: str) -> list[str]:
    toks = []
    for tok in _TOKEN_RE.findall(sentence):
        # keep the dot on abbreviations ("Dr.") but not on sentence-final words
        if tok.endswith(".") and tok[:-1].lower() not in ABBREVIATIONS and "." not in tok[:-1]:
            tok = tok[:-1]
        toks.append(tok)
    return toks


def _normalize(word: str) -> str:
    if "-" in word and word[0] != "-":
        return "!HYPHEN"
    if word.isdigit() and len(word) == 4:
        return "!YEAR"
    if word[:1].isdigit():
        return "!DIGITS"
    return word.lower()


def _shape(word: str) -> str:
    if word.isupper() and len(word) > 1:
        return "X"
    if word[:1].isupper():
        return "Xx"
    if word[:1].isdigit():
        return "d"
    return "x"


_START = ("-START-", "-START2-")
_END = ("-END-", "-END2-")


def _features(i: int, word: str, context: list[str], shapes: list[str], prev: str, prev2: str) -> list[str]:
    i += len(_START)
    return [
        "bias",
        "i suffix " + word[-3:],
        "i suffix2 " + word[-2:],
        "i pref1 " + word[:1],
        "i shape " + shapes[i],
        "i-1 tag " + prev,
        "i-2 tag " + prev2,
        "i tag+i-2 tag " + prev + " " + prev2,
        "i word " + context[i],
        "i-1 tag+i word " + prev + " " + context[i],
        "i-1 word " + context[i - 1],
        "i-1 suffix " + context[i - 1][-3:],
        "i-2 word " + context[i - 2],
        "i+1 word " + context[i + 1],
        "i+1 suffix " + context[i + 1][-3:],
        "i+2 word " + context[i + 2],
    ]


class PerceptronTagger:
    """Greedy averaged-perceptron tagger.

    ``tagdict`` short-circuits frequent words that were (almost) always seen
    with one tag during training.
    """

    def __init__(self, weights=None, tagdict=None, tagset: Sequence[str] = TAGSET):
        self.tagset = tuple(tagset)
        self.weights: dict[str, dict[str, float]] = weights or {}
        self.tagdict: dict[str, str] = tagdict or {}

    def _predict(self, feats: list[str]) -> str:
        scores: dict[str, float] = defaultdict(float)
        for f in feats:
            w = self.weights.get(f)
            if w:
                for tag, v in w.items():
                    scores[tag] += v
        if not scores:
            return "NN"
        # deterministic tie-break by tag order
        return max(self.tagset, key=lambda t: scores.get(t, 0.0))

    def _context(self, tokens: Sequence[str]):
        context = list(_START) + [_normalize(t) for t in tokens] + list(_END)
        shapes = ["x", "x"] + [_shape(t) for t in tokens] + ["x", "x"]
        return context, shapes

    def tag(self, tokens: Sequence[str]) -> list[tuple[str, str]]:
        prev, prev2 = _START
        context, shapes = self._context(tokens)
        out = []
        for i, word in enumerate(tokens):
            tag = self.tagdict.get(word)
            if tag is None:
                tag = self._predict(_features(i, word, context, shapes, prev, prev2))
            out.append((word, tag))
            prev2, prev = prev, tag
        return out

    def tag_text(self, text: str) -> list[tuple[str, str]]:
        tagged = []
        for sent in split_sentences(text):
            toks = tokenize(sent)
            if toks:
                tagged.extend(self.tag(toks))
        return tagged

    # -- training --------------------------------------------------------
    @classmethod
    def train(
        cls,
        sentences: Iterable[Sequence[tuple[str, str]]],
        n_iter: int = 6,
        seed: int = 0,
        tagset: Sequence[str] = TAGSET,
    ) -> "PerceptronTagger":
        sentences = [list(s) for s in sentences]
        allowed = set(tagset)
        for s in sentences:
            for w, t in s:
                if t not in allowed:
                    raise ValueError(f"tag {t!r} (word {w!r}) is not in the tagset")
        tagger = cls(tagset=tagset)
        tagger.tagdict = _make_tagdict(sentences)
        weights: dict[str, dict[str, float]] = defaultdict(lambda: defaultdict(float))
        totals: dict[tuple[str, str], float] = defaultdict(float)
        stamps: dict[tuple[str, str], int] = defaultdict(int)
        step = 0
        rng = random.Random(seed)
        tagger.weights = weights  # type: ignore[assignment]

        def update(truth, guess, feats):
            for f in feats:
                for tag, delta in ((truth, 1.0), (guess, -1.0)):
                    key = (f, tag)
                    totals[key] += (step - stamps[key]) * weights[f][tag]
                    stamps[key] = step
                    weights[f][tag] += delta

        for _ in range(n_iter):
            for sent in sentences:
                words = [w for w, _ in sent]
                context, shapes = tagger._context(words)
                prev, prev2 = _START
                for i, (word, truth) in enumerate(sent):
                    # learn from every token (the tag dictionary is only an
                    # inference shortcut) so unseen words get useful weights
                    feats = _features(i, word, context, shapes, prev, prev2)
                    guess = tagger._predict(feats)
                    step += 1
                    if guess != truth:
                        update(truth, guess, feats)
                    prev2, prev = prev, guess
            rng.shuffle(sentences)

        averaged: dict[str, dict[str, float]] = {}
        for f, tags in weights.items():
            row = {}
            for tag, w in tags.items():
                key = (f, tag)
                total = totals[key] + (step - stamps[key]) * w
                avg = round(total / max(step, 1), 3)
                if avg:
                    row[tag] = avg
            if row:
                averaged[f] = row
        tagger.weights = averaged
        return tagger

    # -- persistence -----------------------------------------------------
    def save(self, path) -> None:
        feats = sorted(self.weights)
        tag_index = {t: i for i, t in enumerate(self.tagset)}
        ptr = [0]
        tags, vals = [], []
        for f in feats:
            for tag in sorted(self.weights[f], key=tag_index.__getitem__):
                tags.append(tag_index[tag])
                vals.append(self.weights[f][tag])
            ptr.append(len(tags))
        header = {
            "kind": "averaged-perceptron-tagger",
            "tagset": list(self.tagset),
            "features": feats,
            "tagdict": dict(sorted(self.tagdict.items())),
        }
        write_blob(
            path,
            TAGGER_MAGIC,
            header,
            {
                "ptr": np.asarray(ptr, dtype=np.int32),
                "tag": np.asarray(tags, dtype=np.uint8),
                "weight": np.asarray(vals, dtype=np.float32),
            },
        )

    @classmethod
    def load(cls, path=None) -> "PerceptronTagger":
        if path is None:
            path = resources.files("healthgrade.data").joinpath("tagger.bin")
        header, arrays = read_blob(path, TAGGER_MAGIC)
        if header.get("kind") != "averaged-perceptron-tagger":
            raise ArtifactError(f"{path}: not a tagger weight file")
        tagset = tuple(header["tagset"])
        ptr, tag, weight = arrays["ptr"], arrays["tag"], arrays["weight"]
        weights = {}
        for j, f in enumerate(header["features"]):
            lo, hi = ptr[j], ptr[j + 1]
            weights[f] = {tagset[t]: float(w) for t, w in zip(tag[lo:hi], weight[lo:hi])}
        return cls(weights, header["tagdict"], tagset)


def _make_tagdict(sentences, freq_thresh: int = 5, ambiguity_thresh: float = 0.97) -> dict[str, str]:
    counts: dict[str, Counter] = defaultdict(Counter)
    for sent in sentences:
        for word, tag in sent:
            counts[word][tag] += 1
    out = {}
    for word, tc in counts.items():
        tag, mode = max(tc.items(), key=lambda kv: (kv[1], kv[0]))
        n = sum(tc.values())
        if n >= freq_thresh and mode / n >= ambiguity_thresh:
            out[word] = tag
    return out


def read_tagged(text: str) -> list[list[tuple[str, str]]]:
    """Parse ``word/TAG word/TAG ...`` lines, one sentence per line."""
    sents = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        sent = []
        for item in line.split():
            word, sep, tag = item.rpartition("/")
            if not sep or not word:
                raise ValueError(f"tagged line {lineno}: bad item {item!r}")
            sent.append((word, tag))
        sents.append(sent)
    return sents


_default: PerceptronTagger | None = None


def default_tagger() -> PerceptronTagger:
    global _default
    if _default is None:
        _default = PerceptronTagger.load()
    return _default
