import json

import pytest

from healthgrade.cli import main, parse_criteria, parse_sizes
from healthgrade.corpus import load_corpus
from healthgrade.errors import UsageError


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    p = tmp_path_factory.mktemp("c") / "corpus.jsonl"
    assert main(["synth", "--n-articles", "80", "--seed", "3", "--out", str(p)]) == 0
    return p


@pytest.fixture(scope="module")
def fitted(tmp_path_factory, corpus):
    adir = tmp_path_factory.mktemp("art")
    assert main(["featurize", "--corpus", str(corpus), "--artifacts", str(adir), "--fit"]) == 0
    return adir


FAST = ["--classifier", "gnb", "--folds", "3", "--seed", "0"]


def _report_rows(out):
    lines = (out / "report.csv").read_text().splitlines()
    return lines[2:]


def test_sizes_syntax():
    assert parse_sizes("1000..5000") == [1000, 2000, 3000, 4000, 5000]
    assert parse_sizes("100..300/100") == [100, 200, 300]
    assert parse_sizes("1000,all") == [1000, "all"]
    with pytest.raises(UsageError):
        parse_sizes("5000..1000")


def test_criteria_syntax():
    assert parse_criteria("all") == list(range(1, 11))
    assert parse_criteria("1,3") == [1, 3]
    with pytest.raises(UsageError):
        parse_criteria("11")


def test_evaluate_size_range(tmp_path, corpus):
    out = tmp_path / "r"
    rc = main(["evaluate", "--corpus", str(corpus), "--sizes", "100..500/100", "--out", str(out)] + FAST)
    assert rc == 0
    assert len(_report_rows(out)) == 5
    assert len(list((out / "roc").glob("*.csv"))) == 5
    man = json.loads((out / "manifest.json").read_text())
    assert man["command"] == "evaluate"


def test_evaluate_all_criteria(tmp_path, corpus):
    out = tmp_path / "r"
    rc = main(["evaluate", "--corpus", str(corpus), "--criterion", "all", "--sizes", "50,100", "--out", str(out)] + FAST)
    assert rc == 0
    rows = _report_rows(out)
    assert len(rows) == 20
    assert sorted({r.split(",")[0] for r in rows}, key=int) == [str(c) for c in range(1, 11)]


def test_sweep_defaults_to_three_selectors(tmp_path, corpus):
    out = tmp_path / "s"
    rc = main(["sweep", "--corpus", str(corpus), "--sizes", "100", "--out", str(out)] + FAST)
    assert rc == 0
    sels = [r.split(",")[1] for r in _report_rows(out)]
    assert sels == ["CoAE-PC", "ClAE-LR", "ClAE-RF"]


def test_resume_and_changed_input(tmp_path, corpus, capsys):
    c2 = tmp_path / "c.jsonl"
    c2.write_bytes(corpus.read_bytes())
    out = tmp_path / "r"
    args = ["evaluate", "--corpus", str(c2), "--sizes", "100", "--out", str(out), "--resume"] + FAST
    assert main(args) == 0
    capsys.readouterr()
    assert main(args) == 0
    assert "up to date" in capsys.readouterr().out
    lines = c2.read_text().splitlines()
    c2.write_text("\n".join(lines[:-1]) + "\n")
    assert main(args) == 2
    assert "cannot resume" in capsys.readouterr().err


def test_missing_seed_is_usage_error(corpus, capsys):
    assert main(["evaluate", "--corpus", str(corpus)]) == 1
    assert "--seed" in capsys.readouterr().err


def test_bad_option_value(corpus):
    assert main(["evaluate", "--corpus", str(corpus), "--selector", "chi2", "--seed", "0"]) == 1
    assert main(["evaluate", "--corpus", str(corpus), "--seed", "0", "--sizes", "lots"]) == 1


def test_missing_corpus_is_data_error(tmp_path):
    assert main(["evaluate", "--corpus", str(tmp_path / "nope.jsonl"), "--seed", "0"]) == 2


def test_malformed_corpus(tmp_path, capsys):
    p = tmp_path / "bad.jsonl"
    p.write_text("{not json\n")
    assert main(["ingest", "--in", str(p), "--out", str(tmp_path / "o.jsonl")]) == 2
    assert "line 1" in capsys.readouterr().err


def test_featurize_without_fit(tmp_path, corpus, capsys):
    adir = tmp_path / "empty"
    assert main(["featurize", "--corpus", str(corpus), "--artifacts", str(adir)]) == 2
    assert "featurize --fit" in capsys.readouterr().err


def test_featurize_byte_identical(tmp_path, corpus):
    d = tmp_path / "a"
    args = ["featurize", "--corpus", str(corpus), "--artifacts", str(d), "--fit"]
    assert main(args) == 0
    first = {p.name: p.read_bytes() for p in d.iterdir()}
    assert main(args) == 0
    assert {p.name: p.read_bytes() for p in d.iterdir()} == first


def test_featurize_apply_and_resume(tmp_path, corpus, fitted, capsys):
    out = tmp_path / "m.hgm"
    args = ["featurize", "--corpus", str(corpus), "--artifacts", str(fitted), "--out", str(out), "--resume"]
    assert main(args) == 0
    capsys.readouterr()
    assert main(args) == 0
    assert "up to date" in capsys.readouterr().out


def test_preprocess_output(tmp_path, corpus):
    out = tmp_path / "tok.jsonl"
    assert main(["preprocess", "--corpus", str(corpus), "--out", str(out)]) == 0
    first = json.loads(out.read_text().splitlines()[0])
    assert first["article_id"] == "syn00000" and first["body_tokens"]


def test_ingest_stats(tmp_path, corpus, capsys):
    assert main(["ingest", "--in", str(corpus), "--out", str(tmp_path / "o.jsonl")]) == 0
    assert "criterion" in capsys.readouterr().out


@pytest.fixture(scope="module")
def models(tmp_path_factory, corpus, fitted):
    mdir = tmp_path_factory.mktemp("models")
    rc = main(["train", "--corpus", str(corpus), "--artifacts", str(fitted), "--models", str(mdir),
               "--criterion", "1,2", "--size", "200", "--classifier", "gnb", "--seed", "0"])
    assert rc == 0
    return mdir


def _articles_file(path, bodies):
    recs = [{"id": f"n{i}", "title": "New study", "body": b, "source_url": "https://x.org/a"}
            for i, b in enumerate(bodies)]
    path.write_text("\n".join(json.dumps(r) for r in recs) + "\n")
    return path


def test_score_two_articles_in_order(tmp_path, fitted, models, capsys):
    f = _articles_file(tmp_path / "new.jsonl", ["The drug costs a lot of money.", "Researchers found benefits."])
    out = tmp_path / "v.jsonl"
    assert main(["score", str(f), "--artifacts", str(fitted), "--models", str(models), "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert text.index("article n0") < text.index("article n1")
    assert text.count("criterion") == 4
    recs = [json.loads(x) for x in out.read_text().splitlines()]
    assert [r["article_id"] for r in recs] == ["n0", "n1"]
    assert all(v["label"] in ("Satisfactory", "NotSatisfactory") for r in recs for v in r["verdicts"].values())


def test_score_empty_body_warns(tmp_path, fitted, models, capsys, caplog):
    f = _articles_file(tmp_path / "e.jsonl", ["https://x.org/only-a-link"])
    with caplog.at_level("WARNING"):
        assert main(["score", str(f), "--artifacts", str(fitted), "--models", str(models)]) == 0
    assert "empty" in caplog.text
    out = capsys.readouterr().out
    assert "article n0" in out and out.count("score ") == 2


def test_score_self_consistency(tmp_path, corpus, fitted, models, capsys):
    # confidently scored training articles keep their training label
    out = tmp_path / "v.jsonl"
    assert main(["score", str(corpus), "--artifacts", str(fitted), "--models", str(models), "--out", str(out)]) == 0
    assert capsys.readouterr().out.count("article ") == 80
    _, labels = load_corpus(corpus)
    want = {lab.article_id: lab[1].value for lab in labels}
    hits = total = 0
    for line in out.read_text().splitlines():
        rec = json.loads(line)
        v = rec["verdicts"]["1"]
        if want[rec["article_id"]] == "NA" or 0.05 < v["score"] < 0.95:
            continue
        total += 1
        hits += (v["label"] == "Satisfactory") == (want[rec["article_id"]] == "S")
    assert total >= 20 and hits / total >= 0.95


def test_score_fingerprint_mismatch(tmp_path, corpus, models):
    other = tmp_path / "other"
    c2 = tmp_path / "c2.jsonl"
    main(["synth", "--n-articles", "40", "--seed", "9", "--out", str(c2)])
    assert main(["featurize", "--corpus", str(c2), "--artifacts", str(other), "--fit"]) == 0
    f = _articles_file(tmp_path / "a.jsonl", ["Some text here."])
    assert main(["score", str(f), "--artifacts", str(other), "--models", str(models)]) == 2


def test_explain(tmp_path, corpus, capsys):
    out = tmp_path / "x.csv"
    rc = main(["explain", "--corpus", str(corpus), "--criterion", "1", "--k", "8", "--seed", "0", "--out", str(out)])
    assert rc == 0
    rows = out.read_text().splitlines()
    assert rows[0].startswith("criterion,rank,feature")
    assert len(rows) == 9


def test_config_precedence(tmp_path, corpus):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 0, "evaluate": {"classifier": "gnb", "folds": 3, "sizes": "100,200"}}))
    out = tmp_path / "r"
    rc = main(["--config", str(cfg), "evaluate", "--corpus", str(corpus), "--sizes", "100", "--out", str(out)])
    assert rc == 0
    rows = _report_rows(out)
    assert len(rows) == 1 and ",GNB," in rows[0]


def test_config_unknown_key(tmp_path, corpus):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"colour": "blue"}))
    assert main(["evaluate", "--config", str(cfg), "--corpus", str(corpus), "--seed", "0"]) == 1
