"""Command-line interface.

Every command writes a manifest next to its outputs recording the effective
settings and the sha256 of each input and output, so a run can be checked
or repeated later. Option defaults can come from a JSON file (``--config``);
flags given on the command line win.

Exit codes: 0 success, 1 usage error, 2 data error, 3 training error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from importlib import resources
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from . import CRITERIA, __version__
from .corpus import (
    corpus_stats,
    filter_for_criterion,
    format_stats,
    ingest_raw,
    load_corpus,
    save_corpus,
)
from .errors import DataError, FingerprintMismatchError, HealthgradeError, TrainingError, UsageError
from .evaluation import (
    CLASSIFIERS,
    SWEEP_SIZES,
    DocCache,
    ExperimentConfig,
    format_report,
    run_sweep,
    write_roc,
)
from .featurize.lexicon import CategoryLexicon
from .featurize.links import RankTable
from .featurize.space import (
    FeatureMatrix,
    FeatureSpace,
    Featurizer,
    FeaturizerSettings,
    load_featurizer,
    save_featurizer,
)
from .featurize.tagger import PerceptronTagger, default_tagger
from .learn.base import TrainConfig, load_model, save_model, train
from .learn.resample import METHODS as BALANCING
from .learn.resample import resample
from .persist import read_blob, sha256_file, write_blob, write_json
from .preprocess import PipelineConfig, preprocess
from .select import SELECTOR_ALIASES, combined_top, score_features, top_k

log = logging.getLogger("healthgrade")

MATRIX_MAGIC = b"HGFM"
FEATURIZER_FILE = "featurizer.json"
MATRIX_FILE = "features.hgm"
# keys of a --config file that describe the text pipeline rather than options
PIPELINE_KEYS = {"contractions", "stopwords", "remove_numbers", "normalizer", "keep_title_separately"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def demo_corpus_path() -> str:
    return str(resources.files("healthgrade.data").joinpath("demo_corpus.jsonl"))


# ---------------------------------------------------------------- helpers

def parse_sizes(text: str) -> list:
    """``"1000..5000"`` (step 1000), ``"1000..5000/500"``, ``"1000,3000,all"``."""
    out: list = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if part == "all":
            out.append("all")
        elif ".." in part:
            span, _, step = part.partition("/")
            lo, _, hi = span.partition("..")
            try:
                lo_i, hi_i = int(lo), int(hi)
                step_i = int(step) if step else 1000
            except ValueError:
                raise UsageError(f"bad size range {part!r}") from None
            if lo_i < 1 or hi_i < lo_i or step_i < 1:
                raise UsageError(f"bad size range {part!r}")
            out.extend(range(lo_i, hi_i + 1, step_i))
        else:
            try:
                n = int(part)
            except ValueError:
                raise UsageError(f"feature size must be an integer or 'all', got {part!r}") from None
            if n < 1:
                raise UsageError("feature sizes must be positive")
            out.append(n)
    if not out:
        raise UsageError("no feature sizes given")
    return out


def parse_criteria(text) -> list[int]:
    if str(text) == "all":
        return list(CRITERIA)
    try:
        crits = [int(c) for c in str(text).split(",")]
    except ValueError:
        raise UsageError(f"criterion must be 1..10, a comma list or 'all', got {text!r}") from None
    bad = [c for c in crits if c not in CRITERIA]
    if bad:
        raise UsageError(f"criterion must be in 1..10, got {bad[0]}")
    return crits


def _choices(text, allowed, what) -> list[str]:
    items = [t.strip() for t in str(text).split(",") if t.strip()]
    for t in items:
        if t not in allowed:
            raise UsageError(f"unknown {what} {t!r}; choose from {', '.join(sorted(allowed))}")
    if not items:
        raise UsageError(f"no {what} given")
    return items


def _require_file(path, what="input") -> Path:
    p = Path(path)
    if not p.is_file():
        raise DataError(f"{what} not found: {p}")
    return p


def _require_seed(args):
    if args.seed is None:
        raise UsageError("--seed is required for this command")


def _inputs(**paths) -> dict:
    return {k: {"path": str(p), "sha256": sha256_file(p)} for k, p in paths.items() if p is not None}


def write_manifest(path, command: str, settings: dict, inputs: dict, outputs: dict) -> None:
    write_json(path, {
        "command": command,
        "version": __version__,
        "settings": settings,
        "inputs": inputs,
        "outputs": {k: {"path": str(p), "sha256": sha256_file(p)} for k, p in outputs.items()},
    })


def resume_ok(manifest_path: Path, settings: dict, inputs: dict) -> bool:
    """True when a previous run with these inputs and settings is intact.

    Raises DataError when the recorded input hashes differ from the current
    files, since the earlier outputs would then be stale.
    """
    if not manifest_path.is_file():
        return False
    old = json.loads(manifest_path.read_text(encoding="utf-8"))
    for key, now in inputs.items():
        before = old.get("inputs", {}).get(key)
        if before and before["sha256"] != now["sha256"]:
            raise DataError(
                f"cannot resume: {now['path']} changed since the recorded run "
                f"(sha256 {before['sha256'][:12]} -> {now['sha256'][:12]}); rerun without --resume"
            )
    if old.get("settings") != json.loads(json.dumps(settings)) or set(old.get("inputs", {})) != set(inputs):
        return False
    for out in old.get("outputs", {}).values():
        p = Path(out["path"])
        if not p.is_file() or sha256_file(p) != out["sha256"]:
            return False
    return True


def save_matrix(path, M: FeatureMatrix) -> None:
    X = sp.csr_matrix(M.X)
    X.sort_indices()
    header = {
        "ids": list(M.ids),
        "space": M.space.to_dict(),
        "fingerprint": M.fingerprint,
        "shape": list(X.shape),
    }
    arrays = {
        "data": X.data.astype(np.float64),
        "indices": X.indices.astype(np.int64),
        "indptr": X.indptr.astype(np.int64),
    }
    write_blob(path, MATRIX_MAGIC, header, arrays)


def load_matrix(path) -> FeatureMatrix:
    header, arrays = read_blob(path, MATRIX_MAGIC)
    X = sp.csr_matrix((arrays["data"], arrays["indices"], arrays["indptr"]), shape=tuple(header["shape"]))
    return FeatureMatrix(X, FeatureSpace.from_dict(header["space"]), tuple(header["ids"]))


def _pipeline(args) -> PipelineConfig:
    """Text pipeline from ``--pipeline-config``, else from pipeline keys in ``--config``."""
    if getattr(args, "pipeline_config", None):
        return PipelineConfig.from_file(_require_file(args.pipeline_config, "pipeline config"))
    if args.config and PIPELINE_KEYS & set(json.loads(Path(args.config).read_text(encoding="utf-8"))):
        return PipelineConfig.from_file(args.config)
    return PipelineConfig()


def _featurizer_from_args(args) -> Featurizer:
    kw = {"pipeline": _pipeline(args)}
    if getattr(args, "lexicon", None):
        kw["lexicon"] = CategoryLexicon.load(_require_file(args.lexicon, "lexicon"))
    if getattr(args, "ranks", None):
        kw["ranks"] = RankTable.load(_require_file(args.ranks, "rank table"))
    if getattr(args, "tagger", None):
        kw["tagger"] = PerceptronTagger.load(_require_file(args.tagger, "tagger weights"))
        kw["tagger_path"] = str(args.tagger)
    else:
        kw["tagger"] = default_tagger()
    kw["settings"] = FeaturizerSettings(
        min_df=args.min_df, max_df_ratio=args.max_df_ratio, max_features=args.max_features
    )
    return Featurizer(**kw)


def _featurizer_settings(args) -> dict:
    return {
        "pipeline_config": args.pipeline_config,
        "lexicon": args.lexicon,
        "ranks": args.ranks,
        "tagger": args.tagger,
        "min_df": args.min_df,
        "max_df_ratio": args.max_df_ratio,
        "max_features": args.max_features,
    }


def _train_config(args, algorithm="SVM") -> TrainConfig:
    return TrainConfig(
        algorithm=algorithm,
        rf_n_trees=args.rf_trees,
        svm_c=args.svm_c,
        svm_kernel_degree=args.svm_degree,
        smote_k=args.smote_k,
        seed=args.seed if args.seed is not None else 0,
        n_jobs=args.workers,
    )


def _load_articles(path):
    """Articles (and any labels) from a corpus file or a raw export."""
    p = _require_file(path, "article file")
    try:
        return load_corpus(p)
    except DataError:
        return ingest_raw(p)


# ---------------------------------------------------------------- commands

def cmd_synth(args) -> int:
    from .synth import generate_corpus

    _require_seed(args)
    arts, labels, _ = generate_corpus(
        args.n_articles, seed=args.seed, plant_rate=args.plant_rate, noise=args.noise, na_rate=args.na_rate
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_corpus(out, arts, labels)
    settings = {"n_articles": args.n_articles, "seed": args.seed, "plant_rate": args.plant_rate,
                "noise": args.noise, "na_rate": args.na_rate}
    write_manifest(Path(str(out) + ".manifest.json"), "synth", settings, {}, {"corpus": out})
    print(f"wrote {len(arts)} synthetic articles to {out}")
    return 0


def cmd_ingest(args) -> int:
    src = _require_file(args.input)
    arts, labels = ingest_raw(src)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_corpus(out, arts, labels)
    write_manifest(Path(str(out) + ".manifest.json"), "ingest", {}, _inputs(raw=src), {"corpus": out})
    print(format_stats(corpus_stats(arts, labels)).rstrip("\n"))
    print(f"wrote {len(arts)} articles and {len(labels)} label records to {out}")
    return 0


def cmd_preprocess(args) -> int:
    corpus = _require_file(args.corpus, "corpus")
    arts, _ = load_corpus(corpus)
    pipeline = _pipeline(args)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        for art in arts:
            fh.write(json.dumps(preprocess(art, pipeline).to_record(), ensure_ascii=False, sort_keys=True) + "\n")
    inputs = _inputs(corpus=corpus, pipeline_config=args.pipeline_config, config=args.config)
    write_manifest(Path(str(out) + ".manifest.json"), "preprocess", pipeline.describe(), inputs, {"clean": out})
    print(f"wrote {len(arts)} cleaned documents to {out}")
    return 0


def cmd_featurize(args) -> int:
    corpus = _require_file(args.corpus, "corpus")
    adir = Path(args.artifacts)
    fz_path = adir / FEATURIZER_FILE
    out = Path(args.out) if args.out else adir / MATRIX_FILE
    arts, _ = load_corpus(corpus)
    if args.fit:
        settings = _featurizer_settings(args)
        inputs = _inputs(corpus=corpus, pipeline_config=args.pipeline_config, lexicon=args.lexicon,
                         ranks=args.ranks, tagger=args.tagger)
        manifest = adir / "featurize.manifest.json"
        if args.resume and resume_ok(manifest, settings, inputs):
            print(f"{adir}: artifacts are up to date; nothing to do")
            return 0
        featurizer = _featurizer_from_args(args)
        fitted, M = featurizer.fit_transform(featurizer.process(arts))
        adir.mkdir(parents=True, exist_ok=True)
        save_featurizer(fz_path, featurizer, fitted)
        save_matrix(out, M)
        write_manifest(manifest, "featurize", settings, inputs, {"featurizer": fz_path, "matrix": out})
    else:
        if not fz_path.is_file():
            raise DataError(
                f"no fitted featurizer in {adir}; run `healthgrade featurize --fit --artifacts {adir}` first"
            )
        settings = {"artifacts": str(adir)}
        inputs = _inputs(corpus=corpus, featurizer=fz_path)
        manifest = Path(str(out) + ".manifest.json")
        if args.resume and resume_ok(manifest, settings, inputs):
            print(f"{out}: feature matrix is up to date; nothing to do")
            return 0
        featurizer, fitted = load_featurizer(fz_path)
        M = fitted.transform(featurizer.process(arts))
        out.parent.mkdir(parents=True, exist_ok=True)
        save_matrix(out, M)
        write_manifest(manifest, "featurize", settings, inputs, {"matrix": out})
    sizes = ", ".join(f"{k} {v}" for k, v in M.space.family_sizes().items())
    print(f"{M.X.shape[0]} articles x {M.X.shape[1]} features ({sizes}); fingerprint {M.fingerprint[:12]}")
    print(f"wrote {out}")
    return 0


def _grid_settings(args, sizes, crits, selectors, classifiers, balancing) -> dict:
    return {
        "criteria": crits,
        "selectors": selectors,
        "classifiers": classifiers,
        "sizes": sizes,
        "balancing": balancing,
        "seed": args.seed,
        "folds": args.folds,
        "train": {"rf_trees": args.rf_trees, "svm_c": args.svm_c, "svm_degree": args.svm_degree,
                  "smote_k": args.smote_k},
        "featurizer": _featurizer_settings(args),
    }


def cmd_evaluate(args, command="evaluate") -> int:
    _require_seed(args)
    corpus = _require_file(args.corpus or demo_corpus_path(), "corpus")
    crits = parse_criteria(args.criterion)
    sizes = parse_sizes(args.sizes)
    selectors = _choices(args.selector, SELECTOR_ALIASES, "selector")
    classifiers = _choices(args.classifier, CLASSIFIERS, "classifier")
    balancing = _choices(args.balancing, BALANCING, "balancing method")
    out = Path(args.out)
    settings = _grid_settings(args, sizes, crits, selectors, classifiers, balancing)
    inputs = _inputs(corpus=corpus, pipeline_config=args.pipeline_config, lexicon=args.lexicon,
                     ranks=args.ranks, tagger=args.tagger)
    manifest = out / "manifest.json"
    if args.resume and resume_ok(manifest, settings, inputs):
        print(f"{out}: report is up to date; nothing to do")
        return 0

    arts, labels = load_corpus(corpus)
    cache = DocCache(_featurizer_from_args(args))
    train_cfg = _train_config(args)
    reports = []
    for c in crits:
        ds = filter_for_criterion(arts, labels, c)
        for sel in selectors:
            for clf in classifiers:
                for bal in balancing:
                    cfg = ExperimentConfig(
                        criterion=c, selector=sel, classifier=clf, feature_size=sizes[0], balancing=bal,
                        seed=args.seed, k_folds=args.folds, n_jobs=args.workers, train=train_cfg,
                    )
                    reports.extend(run_sweep(ds, cfg, sizes, cache=cache))

    out.mkdir(parents=True, exist_ok=True)
    (out / "roc").mkdir(exist_ok=True)
    report_path = out / "report.csv"
    report_path.write_text(format_report(reports), encoding="utf-8")
    outputs = {"report": report_path}
    for rep in reports:
        p = out / "roc" / f"{rep.key}.csv"
        write_roc(p, rep)
        outputs[f"roc:{rep.key}"] = p
    write_manifest(manifest, command, settings, inputs, outputs)
    _print_report(reports)
    print(f"wrote {report_path} and {len(reports)} ROC files")
    return 0


def _print_report(reports) -> None:
    head = f"{'crit':>4} {'selector':<8} {'clf':<8} {'size':>6} {'balance':<7} {'WP':>6} {'WR':>6} {'WF':>6} {'AUC':>6}"
    print(head)
    for r in reports:
        row = r.row()
        print(f"{r.criterion:>4} {row['selector']:<8} {row['classifier']:<8} {str(r.feature_size):>6} "
              f"{r.balancing:<7} {row['WP']:>6} {row['WR']:>6} {row['WF']:>6} {row['AUC']:>6}")


def cmd_sweep(args) -> int:
    return cmd_evaluate(args, command="sweep")


def cmd_train(args) -> int:
    _require_seed(args)
    corpus = _require_file(args.corpus, "corpus")
    adir = Path(args.artifacts)
    fz_path = adir / FEATURIZER_FILE
    if not fz_path.is_file():
        raise DataError(f"no fitted featurizer in {adir}; run `healthgrade featurize --fit --artifacts {adir}` first")
    featurizer, fitted = load_featurizer(fz_path)
    arts, labels = load_corpus(corpus)
    crits = parse_criteria(args.criterion)
    size = parse_sizes(args.size)[0]
    algorithm = CLASSIFIERS[_choices(args.classifier, CLASSIFIERS, "classifier")[0]]
    models_dir = Path(args.models)
    models_dir.mkdir(parents=True, exist_ok=True)
    cache = DocCache(featurizer)
    outputs = {}
    for c in crits:
        ds = filter_for_criterion(arts, labels, c)
        M = fitted.transform(cache.get(ds.articles))
        y = np.asarray(ds.y)
        if size == "all":
            cols = list(range(len(M.space)))
        else:
            scores = score_features(args.selector, M.X, y, seed=args.seed, n_jobs=args.workers)
            cols = top_k(scores, min(int(size), len(M.space)))
        Ms = M.subset(cols)
        X, yy = resample(Ms.X, y, args.balancing, seed=args.seed, k=args.smote_k) if args.balancing != "none" else (Ms.X, y)
        model = train(X, yy, _train_config(args, algorithm), fingerprint=Ms.fingerprint, feature_names=Ms.space.names)
        model.extra = {"criterion": c, "selector": args.selector, "size": size, "balancing": args.balancing,
                       "space_fingerprint": fitted.space.fingerprint}
        path = models_dir / f"criterion_{c}.hgm"
        save_model(path, model)
        outputs[f"criterion_{c}"] = path
        print(f"criterion {c}: {algorithm} on {len(cols)} features, {len(y)} articles -> {path}")
    settings = {"criteria": crits, "selector": args.selector, "classifier": algorithm, "size": size,
                "balancing": args.balancing, "seed": args.seed}
    write_manifest(models_dir / "manifest.json", "train", settings,
                   _inputs(corpus=corpus, featurizer=fz_path), outputs)
    return 0


def cmd_score(args) -> int:
    adir = Path(args.artifacts)
    fz_path = adir / FEATURIZER_FILE
    if not fz_path.is_file():
        raise DataError(f"no fitted featurizer in {adir}; run `healthgrade featurize --fit --artifacts {adir}` first")
    featurizer, fitted = load_featurizer(fz_path)
    model_paths = sorted(Path(args.models).glob("criterion_*.hgm"), key=lambda p: int(p.stem.split("_")[1]))
    if not model_paths:
        raise DataError(f"no models in {args.models}; run `healthgrade train` first")
    models = []
    for p in model_paths:
        m = load_model(p)
        if m.extra.get("space_fingerprint") != fitted.space.fingerprint:
            raise FingerprintMismatchError(
                f"{p} was trained on a different feature space than the artifacts in {adir}"
            )
        models.append(m)
    arts, _ = _load_articles(args.articles)
    M = fitted.transform(featurizer.process(arts))
    lines = []
    records = []
    for i, art in enumerate(arts):
        lines.append(f"article {art.id}")
        verdicts = {}
        for m in models:
            cols = [M.space.index_of(n) for n in m.feature_names]
            row = M.rows([i]).subset(cols)
            pred = int(m.predict(row)[0])
            score = float(m.score(row)[0])
            label = "Satisfactory" if pred == 1 else "NotSatisfactory"
            c = m.extra["criterion"]
            verdicts[str(c)] = {"label": label, "score": round(score, 6)}
            lines.append(f"  criterion {c:>2}: {label:<16} score {score:.4f}")
        records.append({"article_id": art.id, "verdicts": verdicts})
    print("\n".join(lines))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            for rec in records:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
    return 0


def cmd_explain(args) -> int:
    _require_seed(args)
    corpus = _require_file(args.corpus or demo_corpus_path(), "corpus")
    crits = parse_criteria(args.criterion)
    arts, labels = load_corpus(corpus)
    featurizer = _featurizer_from_args(args)
    cache = DocCache(featurizer)
    blocks, rows = [], ["criterion,rank,feature,family,points,CoAE-PC,ClAE-LR,ClAE-RF,common"]
    for c in crits:
        ds = filter_for_criterion(arts, labels, c)
        fitted, M = featurizer.fit_transform(cache.get(ds.articles))
        y = np.asarray(ds.y)
        sets = [score_features(s, M.X, y, seed=args.seed, fingerprint=M.fingerprint, n_jobs=args.workers)
                for s in ("pc", "lr", "rf")]
        top = combined_top(sets, M.space, args.k)
        blocks.append(f"criterion {c} (S={ds.counts['S']}, NS={ds.counts['NS']}); * = in all three top-{args.k} sets")
        for r, f in enumerate(top, 1):
            er = f.evaluator_ranks
            mark = "*" if f.common else " "
            blocks.append(f"  {r:>2}. {mark} {f.name:<40} {f.family:<8} "
                          f"PC {er['CoAE-PC']:>5}  LR {er['ClAE-LR']:>5}  RF {er['ClAE-RF']:>5}")
            name = '"' + f.name.replace('"', '""') + '"' if "," in f.name or '"' in f.name else f.name
            rows.append(f"{c},{r},{name},{f.family},{f.points},{er['CoAE-PC']},{er['ClAE-LR']},"
                        f"{er['ClAE-RF']},{int(f.common)}")
    print("\n".join(blocks))
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text("\n".join(rows) + "\n", encoding="utf-8")
        settings = {"criteria": crits, "k": args.k, "seed": args.seed, "featurizer": _featurizer_settings(args)}
        write_manifest(Path(str(out) + ".manifest.json"), "explain", settings,
                       _inputs(corpus=corpus), {"explain": out})
    return 0


# ---------------------------------------------------------------- parser

def _add_featurizer_opts(p):
    g = p.add_argument_group("featurization")
    g.add_argument("--pipeline-config", help="JSON text-pipeline settings")
    g.add_argument("--lexicon", help="category lexicon TSV (default: bundled)")
    g.add_argument("--ranks", help="domain rank CSV (default: bundled)")
    g.add_argument("--tagger", help="POS tagger weights (default: bundled)")
    g.add_argument("--min-df", type=int, default=3)
    g.add_argument("--max-df-ratio", type=float, default=0.90)
    g.add_argument("--max-features", type=int, default=4000)


def _add_train_opts(p):
    g = p.add_argument_group("training")
    g.add_argument("--rf-trees", type=int, default=100)
    g.add_argument("--svm-c", type=float, default=1.0)
    g.add_argument("--svm-degree", type=int, default=1)
    g.add_argument("--smote-k", type=int, default=5)


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    def shared(defaults: bool) -> argparse.ArgumentParser:
        # subcommands must not overwrite values given before the command name
        d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
        p = _Parser(add_help=False)
        p.add_argument("--config", default=d(None), help="JSON file of option defaults (flags override it)")
        p.add_argument("--workers", type=int, default=d(1), help="worker threads (results do not depend on it)")
        p.add_argument("-v", "--verbose", action="count", default=d(0))
        return p

    common = shared(False)
    parser = _Parser(prog="healthgrade", description="Grade health news articles on ten quality criteria.",
                     parents=[shared(True)])
    parser.add_argument("--version", action="version", version=f"healthgrade {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    subs = {}

    p = sub.add_parser("ingest", parents=[common], help="validate a raw export and write a corpus file")
    p.add_argument("--in", dest="input", required=True, help="raw export (one JSON article per line)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)
    subs["ingest"] = p

    p = sub.add_parser("preprocess", parents=[common], help="write cleaned token streams")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--pipeline-config")
    p.set_defaults(func=cmd_preprocess)
    subs["preprocess"] = p

    p = sub.add_parser("featurize", parents=[common], help="fit or apply the feature extractor")
    p.add_argument("--corpus", required=True)
    p.add_argument("--artifacts", required=True, help="directory holding the fitted featurizer")
    p.add_argument("--fit", action="store_true", help="fit on the corpus and (re)write the artifacts")
    p.add_argument("--out", help="feature matrix path (default: <artifacts>/features.hgm)")
    p.add_argument("--resume", action="store_true", help="skip when recorded inputs and outputs are unchanged")
    _add_featurizer_opts(p)
    p.set_defaults(func=cmd_featurize)
    subs["featurize"] = p

    for name, func, sizes, sels, help_ in (
        ("evaluate", cmd_evaluate, "1000", "pc", "cross-validate one or more configurations"),
        ("sweep", cmd_sweep, ",".join(map(str, SWEEP_SIZES)), "pc,lr,rf", "evaluate across the feature-size grid"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--corpus", help="corpus file (default: bundled demo corpus)")
        p.add_argument("--criterion", default="1", help="1..10, comma list, or 'all'")
        p.add_argument("--selector", default=sels, help="pc, lr, rf (comma list)")
        p.add_argument("--classifier", default="svm", help="svm, gnb, rf, ensemble (comma list)")
        p.add_argument("--sizes", default=sizes, help="e.g. 1000..5000, 1000,2000,all")
        p.add_argument("--balancing", default="none", help="none, under, over, smote (comma list)")
        p.add_argument("--seed", type=int, help="required")
        p.add_argument("--folds", type=int, default=10)
        p.add_argument("--out", default="reports")
        p.add_argument("--resume", action="store_true")
        _add_featurizer_opts(p)
        _add_train_opts(p)
        p.set_defaults(func=func)
        subs[name] = p

    p = sub.add_parser("train", parents=[common], help="train per-criterion models on the whole corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--artifacts", required=True)
    p.add_argument("--models", required=True, help="output directory for model files")
    p.add_argument("--criterion", default="all")
    p.add_argument("--selector", default="pc", choices=sorted(SELECTOR_ALIASES))
    p.add_argument("--classifier", default="svm")
    p.add_argument("--size", default="1000")
    p.add_argument("--balancing", default="none", choices=list(BALANCING))
    p.add_argument("--seed", type=int)
    _add_train_opts(p)
    p.set_defaults(func=cmd_train)
    subs["train"] = p

    p = sub.add_parser("score", parents=[common], help="grade new articles with trained models")
    p.add_argument("articles")
    p.add_argument("--artifacts", required=True)
    p.add_argument("--models", required=True)
    p.add_argument("--out", help="also write verdicts as JSON lines")
    p.set_defaults(func=cmd_score)
    subs["score"] = p

    p = sub.add_parser("explain", parents=[common], help="most discriminating features per criterion")
    p.add_argument("--corpus", help="corpus file (default: bundled demo corpus)")
    p.add_argument("--criterion", default="all")
    p.add_argument("--k", type=int, default=16)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="also write the table as CSV")
    _add_featurizer_opts(p)
    p.set_defaults(func=cmd_explain)
    subs["explain"] = p

    p = sub.add_parser("synth", parents=[common], help="generate a planted-signal corpus")
    p.add_argument("--n-articles", type=int, default=1000)
    p.add_argument("--seed", type=int)
    p.add_argument("--plant-rate", type=float, default=0.45)
    p.add_argument("--noise", type=float, default=0.10)
    p.add_argument("--na-rate", type=float, default=0.10)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)
    subs["synth"] = p
    return parser, subs


def parse_args(argv=None) -> argparse.Namespace:
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        cfg_path = Path(args.config)
        if not cfg_path.is_file():
            raise DataError(f"config file not found: {cfg_path}")
        try:
            raw = json.loads(cfg_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise UsageError(f"{cfg_path}: invalid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise UsageError(f"{cfg_path}: expected a JSON object")
        # per-command sections override top-level keys
        values = {k: v for k, v in raw.items() if not isinstance(v, dict)}
        values.update(raw.get(args.command, {}))
        sp_ = subs[args.command]
        known = {a.dest for a in sp_._actions}
        values = {k.replace("-", "_"): v for k, v in values.items() if k not in PIPELINE_KEYS}
        unknown = sorted(set(values) - known)
        if unknown:
            raise UsageError(f"{cfg_path}: unknown option(s) for {args.command}: {', '.join(unknown)}")
        sp_.set_defaults(**values)
        args = parser.parse_args(argv)
    return args


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        logging.basicConfig(
            level=logging.WARNING - 10 * min(args.verbose, 2),
            format="%(levelname)s %(name)s: %(message)s",
            stream=sys.stderr,
        )
        if args.workers < 1:
            raise UsageError("--workers must be at least 1")
        return args.func(args)
    except UsageError as exc:
        print(f"healthgrade: error: {exc}", file=sys.stderr)
        return 1
    except (DataError, OSError) as exc:
        print(f"healthgrade: error: {exc}", file=sys.stderr)
        return 2
    except TrainingError as exc:
        print(f"healthgrade: training failed: {exc}", file=sys.stderr)
        return 3
    except HealthgradeError as exc:
        print(f"healthgrade: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # invalid option values rejected by config dataclasses
        print(f"healthgrade: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
