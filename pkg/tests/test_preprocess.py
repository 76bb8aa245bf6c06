import re

import pytest
from hypothesis import given
from hypothesis import strategies as st

from healthgrade.corpus import Article
from healthgrade.preprocess import (
    PipelineConfig,
    clean_text,
    expand_contractions,
    normalize_words,
    preprocess,
    read_contraction_table,
    read_stopwords,
    remove_noise,
)

CFG = PipelineConfig()


def test_shipped_tables_sizes():
    assert 100 <= len(read_contraction_table()) <= 160
    assert 120 <= len(read_stopwords()) <= 200


@pytest.mark.parametrize("text,expected", [
    ("i'd", "I would"),
    ("you've", "you have"),
    ("grand", "grand"),
    ("You've been", "you have been"),
])
def test_expand_contractions(text, expected):
    assert expand_contractions(text, CFG.contraction_table) == expected


def test_contractions_whole_word_only():
    assert expand_contractions("bid'd", {"id'd": "x"}) == "bid'd"


@pytest.mark.parametrize("text,expected", [
    ("<p>Hello!</p>", "hello"),
    ("Costs $4,000 — see https://a.b/c", "costs see"),
    ("", ""),
    ("visit www.example.org today", "visit today"),
    ("a&amp;b", "a b"),
])
def test_remove_noise(text, expected):
    assert remove_noise(text, CFG) == expected


def test_numbers_kept_when_disabled():
    cfg = PipelineConfig(remove_numbers=False)
    assert remove_noise("dose 40 mg", cfg) == "dose 40 mg"


@pytest.mark.parametrize("text,expected", [
    ("connection connected connect", ["connect", "connect", "connect"]),
    ("the a is", []),
    ("studies", ["studi"]),
])
def test_normalize_words(text, expected):
    assert normalize_words(text, CFG) == expected


def test_preprocess_article():
    art = Article("x", "Headline", "I'd RUN!!", "https://a.com/x")
    doc = preprocess(art, CFG)
    assert doc.body_tokens == ("would", "run")
    assert doc.raw_body_kept == "I'd RUN!!"


def test_url_only_body_warns(caplog):
    art = Article("u", "t", "https://a.com/1 http://b.org/2", "https://a.com/x")
    with caplog.at_level("WARNING"):
        doc = preprocess(art, CFG)
    assert doc.body_tokens == ()
    assert "empty" in caplog.text


def test_title_merged_when_not_separate():
    cfg = PipelineConfig(keep_title_separately=False)
    doc = preprocess(Article("x", "Cancer drug", "works well", "https://a.com/x"), cfg)
    assert doc.body_tokens[:2] == doc.title_tokens


def test_bad_normalizer():
    with pytest.raises(ValueError):
        PipelineConfig(normalizer="snowball")


def test_config_from_file(tmp_path):
    (tmp_path / "stop.txt").write_text("drug\n", encoding="utf-8")
    (tmp_path / "p.json").write_text('{"stopwords": "stop.txt", "normalizer": "stem"}', encoding="utf-8")
    cfg = PipelineConfig.from_file(tmp_path / "p.json")
    assert cfg.stopword_list == frozenset({"drug"})
    assert normalize_words("drug trial", cfg) == ["trial"]


words = st.text(alphabet="abcdefghijklmnopqrstuvwxyz'", min_size=1, max_size=12)
texts = st.lists(st.one_of(words, st.sampled_from(["I'd", "<b>", "42", "$", "—", "https://x.io/a", "The", "isn't"])),
                 max_size=25).map(" ".join)


@given(texts)
def test_idempotent(text):
    toks = clean_text(text, CFG)
    assert clean_text(" ".join(toks), CFG) == toks


@given(texts)
def test_tokens_clean(text):
    toks = clean_text(text, CFG)
    for t in toks:
        assert t and t == t.lower()
        assert t not in CFG.stopword_list
        assert re.fullmatch(r"[a-z]+", t), t


@given(texts)
def test_deterministic(text):
    assert clean_text(text, CFG) == clean_text(text, PipelineConfig())


@given(st.lists(st.sampled_from(["cancer", "trial", "patients", "drug", "cost", "risk", "doctor"]), max_size=15))
def test_order_preserved(tokens):
    # none of these are stopwords, so every token survives in order
    out = normalize_words(" ".join(tokens), CFG)
    assert out == [normalize_words(t, CFG)[0] for t in tokens]
