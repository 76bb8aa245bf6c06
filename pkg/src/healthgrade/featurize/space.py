"""Named feature space, per-article processing and the fit/transform featurizer.

Column order is always LEX | TFIDF | POSTAG | POSWORD | LINK | RANK | SIM | MISC
and every name carries its family prefix (``TFIDF:cost``, ``POSWORD:cost_NN``).
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from ..corpus import Article
from ..errors import ArtifactError, DataError, FingerprintMismatchError
from ..persist import read_json, sha256_file, write_json
from ..preprocess import PipelineConfig, expand_contractions, preprocess
from .entities import EntityRecognizer, GazetteerRecognizer, distinct_ratio, entity_counts
from .lexicon import CategoryLexicon, lexicon_features
from .links import LinkSummary, RankTable, link_summary, rank_values
from .postag import fit_posword_vocab, pos_features
from .tagger import PerceptronTagger, Tagger, default_tagger, split_sentences, tokenize
from .tfidf import TfidfModel, cosine, fit_tfidf, tfidf_vector

FAMILIES = ("LEX", "TFIDF", "POSTAG", "POSWORD", "LINK", "RANK", "SIM", "MISC")
LINK_NAMES = ("internal", "external")
SIM_NAMES = ("headline_body",)
MISC_NAMES = ("distinct_ratio", "per_count", "org_count")

ARTIFACT_KIND = "healthgrade-featurizer"
ARTIFACT_VERSION = 1

_MARKUP_RE = re.compile(r"<[^>]*>|&#?\w+;")
_URL_RE = re.compile(r"(?:https?://|ftp://|www\.)\S+", re.IGNORECASE)


@dataclass(frozen=True)
class FeatureSpace:
    names: tuple[str, ...]
    families: tuple[str, ...]

    def __post_init__(self):
        if len(self.names) != len(self.families):
            raise ValueError("names and families differ in length")
        if len(set(self.names)) != len(self.names):
            raise ValueError("feature names must be unique")
        bad = set(self.families) - set(FAMILIES)
        if bad:
            raise ValueError(f"unknown families {sorted(bad)}")

    def __len__(self):
        return len(self.names)

    @property
    def fingerprint(self) -> str:
        h = hashlib.sha256()
        for fam, name in zip(self.families, self.names):
            h.update(f"{fam}\t{name}\n".encode("utf-8"))
        return h.hexdigest()

    def family_sizes(self) -> dict[str, int]:
        sizes = dict.fromkeys(FAMILIES, 0)
        for fam in self.families:
            sizes[fam] += 1
        return sizes

    def index_of(self, name: str) -> int:
        return self.names.index(name)

    def subset(self, indices: Sequence[int]) -> "FeatureSpace":
        return FeatureSpace(
            tuple(self.names[i] for i in indices), tuple(self.families[i] for i in indices)
        )

    def manifest(self) -> list[dict]:
        return [{"index": i, "name": n, "family": f} for i, (n, f) in enumerate(zip(self.names, self.families))]

    def to_dict(self) -> dict:
        return {"names": list(self.names), "families": list(self.families)}

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureSpace":
        return cls(tuple(d["names"]), tuple(d["families"]))


@dataclass(frozen=True)
class FeatureMatrix:
    """Sparse rows (one per article) living in ``space``."""

    X: sp.csr_matrix
    space: FeatureSpace
    ids: tuple[str, ...] = ()

    def __post_init__(self):
        if self.X.shape[1] != len(self.space):
            raise ValueError(f"matrix has {self.X.shape[1]} columns, space has {len(self.space)}")

    @property
    def fingerprint(self) -> str:
        return self.space.fingerprint

    def subset(self, indices: Sequence[int]) -> "FeatureMatrix":
        idx = np.asarray(indices, dtype=np.int64)
        return FeatureMatrix(self.X[:, idx].tocsr(), self.space.subset(idx.tolist()), self.ids)

    def rows(self, rows: Sequence[int]) -> "FeatureMatrix":
        rows = np.asarray(rows, dtype=np.int64)
        ids = tuple(self.ids[i] for i in rows) if self.ids else ()
        return FeatureMatrix(self.X[rows].tocsr(), self.space, ids)

    def require(self, fingerprint: str) -> None:
        if fingerprint != self.fingerprint:
            raise FingerprintMismatchError(
                "feature space fingerprint mismatch: the model was trained on a different space"
            )


@dataclass(frozen=True)
class ProcessedDoc:
    """Everything about one article that does not depend on fitted state."""

    article_id: str
    title_tokens: tuple[str, ...]
    body_tokens: tuple[str, ...]
    tagged: tuple[tuple[str, str], ...]
    n_sentences: int
    links: LinkSummary
    per_count: int
    org_count: int


def tagging_text(body: str, pipeline: PipelineConfig) -> str:
    """Body text as the tagger sees it: markup and URLs removed, contractions expanded."""
    text = _URL_RE.sub(" ", _MARKUP_RE.sub(" ", body))
    return expand_contractions(text, pipeline.contraction_table)


def process_article(
    article: Article,
    pipeline: PipelineConfig,
    tagger: Tagger,
    recognizer: EntityRecognizer,
) -> ProcessedDoc:
    clean = preprocess(article, pipeline)
    text = tagging_text(article.body, pipeline)
    sentences = split_sentences(text)
    tagged: list[tuple[str, str]] = []
    for sent in sentences:
        toks = tokenize(sent)
        if toks:
            tagged.extend(tagger.tag(toks))
    per, org = entity_counts(_URL_RE.sub(" ", _MARKUP_RE.sub(" ", article.body)), recognizer)
    return ProcessedDoc(
        article_id=article.id,
        title_tokens=clean.title_tokens,
        body_tokens=clean.body_tokens,
        tagged=tuple(tagged),
        n_sentences=len(sentences),
        links=link_summary(article.source_url, article.links),
        per_count=per,
        org_count=org,
    )


@dataclass(frozen=True)
class FeaturizerSettings:
    min_df: int = 3
    max_df_ratio: float = 0.90
    max_features: int = 4000
    log_base: float = math.e
    posword_cap: int = 50_000

    def to_dict(self) -> dict:
        return {
            "min_df": self.min_df,
            "max_df_ratio": self.max_df_ratio,
            "max_features": self.max_features,
            "log_base": self.log_base,
            "posword_cap": self.posword_cap,
        }


@dataclass(frozen=True)
class FittedFeatures:
    """All fitted family artifacts; ``transform`` maps processed docs to rows."""

    lexicon: CategoryLexicon
    tfidf: TfidfModel
    tagset: tuple[str, ...]
    poswords: tuple[str, ...]
    domains: tuple[str, ...]
    ranks: RankTable
    space: FeatureSpace = field(init=False)

    def __post_init__(self):
        names = (
            [f"LEX:{n}" for n in self.lexicon.feature_names()]
            + [f"TFIDF:{t}" for t in self.tfidf.terms]
            + [f"POSTAG:{t}" for t in self.tagset]
            + [f"POSWORD:{k}" for k in self.poswords]
            + [f"LINK:{n}" for n in LINK_NAMES]
            + [f"RANK:{d}" for d in self.domains]
            + [f"SIM:{n}" for n in SIM_NAMES]
            + [f"MISC:{n}" for n in MISC_NAMES]
        )
        fams = []
        for fam, size in self.family_sizes().items():
            fams.extend([fam] * size)
        object.__setattr__(self, "space", FeatureSpace(tuple(names), tuple(fams)))
        object.__setattr__(self, "_posword_index", {k: i for i, k in enumerate(self.poswords)})

    def family_sizes(self) -> dict[str, int]:
        return {
            "LEX": len(self.lexicon.feature_names()),
            "TFIDF": len(self.tfidf),
            "POSTAG": len(self.tagset),
            "POSWORD": len(self.poswords),
            "LINK": len(LINK_NAMES),
            "RANK": len(self.domains),
            "SIM": len(SIM_NAMES),
            "MISC": len(MISC_NAMES),
        }

    def offsets(self) -> dict[str, int]:
        out, pos = {}, 0
        for fam, size in self.family_sizes().items():
            out[fam] = pos
            pos += size
        return out

    def row(self, doc: ProcessedDoc) -> dict[int, float]:
        off = self.offsets()
        row: dict[int, float] = {}

        def put(j, v):
            if v:
                row[j] = float(v)

        for j, v in enumerate(lexicon_features(doc.body_tokens, self.lexicon, doc.n_sentences)):
            put(off["LEX"] + j, v)
        body_vec = tfidf_vector(self.tfidf, doc.body_tokens)
        for j, v in body_vec.items():
            put(off["TFIDF"] + j, v)
        tag_counts, pw = pos_features(doc.tagged, self.tagset)
        for j, v in enumerate(tag_counts):
            put(off["POSTAG"] + j, v)
        pw_index = self._posword_index  # type: ignore[attr-defined]
        for key, v in pw.items():
            j = pw_index.get(key)
            if j is not None:
                put(off["POSWORD"] + j, v)
        put(off["LINK"], doc.links.internal)
        put(off["LINK"] + 1, doc.links.external)
        for j, v in rank_values(doc.links, self.domains, self.ranks).items():
            put(off["RANK"] + j, v)
        put(off["SIM"], cosine(tfidf_vector(self.tfidf, doc.title_tokens), body_vec))
        put(off["MISC"], distinct_ratio(doc.body_tokens))
        put(off["MISC"] + 1, doc.per_count)
        put(off["MISC"] + 2, doc.org_count)
        return row

    def transform(self, docs: Sequence[ProcessedDoc]) -> FeatureMatrix:
        indptr = [0]
        indices: list[int] = []
        data: list[float] = []
        for doc in docs:
            row = self.row(doc)
            for j in sorted(row):
                indices.append(j)
                data.append(row[j])
            indptr.append(len(indices))
        X = sp.csr_matrix(
            (np.asarray(data, dtype=np.float64), np.asarray(indices, dtype=np.int64), np.asarray(indptr)),
            shape=(len(docs), len(self.space)),
        )
        return FeatureMatrix(X, self.space, tuple(d.article_id for d in docs))

    def to_dict(self) -> dict:
        return {
            "lexicon": self.lexicon.to_dict(),
            "tfidf": self.tfidf.to_dict(),
            "tagset": list(self.tagset),
            "poswords": list(self.poswords),
            "domains": list(self.domains),
            "ranks": self.ranks.to_dict(),
            "family_sizes": self.family_sizes(),
            "fingerprint": self.space.fingerprint,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FittedFeatures":
        fitted = cls(
            lexicon=CategoryLexicon.from_dict(d["lexicon"]),
            tfidf=TfidfModel.from_dict(d["tfidf"]),
            tagset=tuple(d["tagset"]),
            poswords=tuple(d["poswords"]),
            domains=tuple(d["domains"]),
            ranks=RankTable.from_dict(d["ranks"]),
        )
        if "family_sizes" in d and d["family_sizes"] != fitted.family_sizes():
            raise ArtifactError(
                f"family size mismatch: stored {d['family_sizes']}, rebuilt {fitted.family_sizes()}"
            )
        if "fingerprint" in d and d["fingerprint"] != fitted.space.fingerprint:
            raise ArtifactError("feature space fingerprint does not match the stored artifacts")
        return fitted


@dataclass
class Featurizer:
    """Unfitted configuration: text pipeline, resources and fitting settings."""

    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    lexicon: CategoryLexicon = field(default_factory=CategoryLexicon.load)
    ranks: RankTable = field(default_factory=RankTable.load)
    tagger: Tagger = field(default_factory=default_tagger)
    recognizer: EntityRecognizer = field(default_factory=GazetteerRecognizer)
    settings: FeaturizerSettings = field(default_factory=FeaturizerSettings)
    tagger_path: str | None = None

    def process(self, articles: Sequence[Article]) -> list[ProcessedDoc]:
        return [process_article(a, self.pipeline, self.tagger, self.recognizer) for a in articles]

    def fit(self, docs: Sequence[ProcessedDoc]) -> FittedFeatures:
        """Fit every family on ``docs`` (the training split only)."""
        if not docs:
            raise DataError("cannot fit features on an empty document set")
        s = self.settings
        tfidf = fit_tfidf(
            [d.body_tokens for d in docs],
            min_df=s.min_df,
            max_df_ratio=s.max_df_ratio,
            max_features=s.max_features,
            log_base=s.log_base,
        )
        poswords = fit_posword_vocab((d.tagged for d in docs), cap=s.posword_cap)
        domains = sorted({dom for d in docs for dom in d.links.external_domains})
        return FittedFeatures(
            lexicon=self.lexicon,
            tfidf=tfidf,
            tagset=tuple(self.tagger.tagset),
            poswords=poswords,
            domains=tuple(domains),
            ranks=self.ranks,
        )

    def fit_transform(self, docs: Sequence[ProcessedDoc]) -> tuple[FittedFeatures, FeatureMatrix]:
        fitted = self.fit(docs)
        return fitted, fitted.transform(docs)


def assemble(featurizer: Featurizer, fitted: FittedFeatures, articles: Sequence[Article]) -> FeatureMatrix:
    return fitted.transform(featurizer.process(articles))


def save_featurizer(path, featurizer: Featurizer, fitted: FittedFeatures, extra: dict | None = None) -> None:
    """Write a self-contained JSON artifact (text pipeline, resources, fitted state)."""
    p = featurizer.pipeline
    tagger_sha = sha256_file(featurizer.tagger_path) if featurizer.tagger_path else None
    doc = {
        "kind": ARTIFACT_KIND,
        "version": ARTIFACT_VERSION,
        "pipeline": {
            "contractions": dict(sorted(p.contraction_table.items())),
            "stopwords": sorted(p.stopword_list),
            "remove_numbers": p.remove_numbers,
            "normalizer": p.normalizer,
            "keep_title_separately": p.keep_title_separately,
        },
        "settings": featurizer.settings.to_dict(),
        "tagger": {"path": featurizer.tagger_path, "sha256": tagger_sha},
        "fitted": fitted.to_dict(),
    }
    if extra:
        doc["extra"] = extra
    write_json(path, doc)


def load_featurizer(path) -> tuple[Featurizer, FittedFeatures]:
    doc = read_json(path)
    if doc.get("kind") != ARTIFACT_KIND:
        raise ArtifactError(f"{path}: not a featurizer artifact")
    if doc.get("version") != ARTIFACT_VERSION:
        raise ArtifactError(f"{path}: unsupported featurizer artifact version {doc.get('version')}")
    p = doc["pipeline"]
    pipeline = PipelineConfig(
        contraction_table=p["contractions"],
        stopword_list=frozenset(p["stopwords"]),
        remove_numbers=p["remove_numbers"],
        normalizer=p["normalizer"],
        keep_title_separately=p["keep_title_separately"],
    )
    tinfo = doc["tagger"]
    if tinfo["path"]:
        if sha256_file(tinfo["path"]) != tinfo["sha256"]:
            raise ArtifactError(f"tagger weights at {tinfo['path']} changed since fitting")
        tagger: Tagger = PerceptronTagger.load(tinfo["path"])
    else:
        tagger = default_tagger()
    fitted = FittedFeatures.from_dict(doc["fitted"])
    featurizer = Featurizer(
        pipeline=pipeline,
        lexicon=fitted.lexicon,
        ranks=fitted.ranks,
        tagger=tagger,
        settings=FeaturizerSettings(**doc["settings"]),
        tagger_path=tinfo["path"],
    )
    return featurizer, fitted
