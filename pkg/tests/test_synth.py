import pytest

from healthgrade import CRITERIA
from healthgrade.corpus import Label
from healthgrade.featurize.lexicon import CategoryLexicon
from healthgrade.featurize.tagger import TAGSET
from healthgrade.preprocess import PipelineConfig, normalize_words
from healthgrade.synth import (
    FIRST_NAMES,
    LAST_NAMES,
    NEUTRAL,
    ORG_NAMES,
    ORG_SUFFIXES,
    TEMPLATES,
    generate_corpus,
    planted_feature_names,
    planted_words,
    tagged_sentences,
)

CFG = PipelineConfig()


def norm(word):
    out = normalize_words(word.lower(), CFG)
    return out[0] if out else None


def _neutral_forms():
    forms = set()
    for words in NEUTRAL.values():
        forms |= {norm(w) for w in words}
    for tpl in TEMPLATES:
        for item in tpl.split():
            w = item.rpartition("/")[0]
            if w.isalpha():
                forms.add(norm(w))
    for w in FIRST_NAMES + LAST_NAMES + ORG_NAMES + ORG_SUFFIXES:
        forms.add(norm(w))
    return forms - {None}


def test_same_seed_same_corpus():
    a = generate_corpus(30, seed=4)
    b = generate_corpus(30, seed=4)
    assert a[0] == b[0]
    assert [x.to_record() for x in a[1]] == [x.to_record() for x in b[1]]
    assert generate_corpus(30, seed=5)[0] != a[0]


def test_articles_valid():
    arts, labs, _ = generate_corpus(50, seed=1)
    for a in arts:
        a.validate()
    assert {lab.article_id for lab in labs} == {a.id for a in arts}


def test_planted_words_appear_in_planted_articles():
    arts, _, truth = generate_corpus(60, seed=2)
    for art, plants in zip(arts, truth):
        toks = set(normalize_words(art.body, CFG))
        for c in CRITERIA:
            forms = {norm(w) for w, _ in planted_words(c)}
            assert bool(toks & forms) == plants[c], (art.id, c)


def test_label_noise_and_na_rates():
    _, labs, truth = generate_corpus(1000, seed=0)
    flips = na = total = 0
    for lab, plants in zip(labs, truth):
        for c in CRITERIA:
            v = lab[c]
            total += 1
            if v is Label.NOT_APPLICABLE:
                na += 1
            elif (v is Label.SATISFACTORY) != plants[c]:
                flips += 1
    assert na / total == pytest.approx(0.10, abs=0.02)
    assert flips / (total - na) == pytest.approx(0.10, abs=0.02)


def test_planted_vocab_is_disjoint():
    neutral = _neutral_forms()
    owner = {}
    for c in CRITERIA:
        for w, _ in planted_words(c):
            f = norm(w)
            assert f is not None, w
            assert f not in neutral, (c, w)
            assert owner.setdefault(f, c) == c, (c, w)


def test_planted_tags_in_tagset():
    for c in CRITERIA:
        assert all(t in TAGSET for _, t in planted_words(c))
    for sent in tagged_sentences(5, seed=0):
        assert all(t in TAGSET for _, t in sent)


def test_money_is_planted_for_cost_only():
    lex = CategoryLexicon.load()
    names = planted_feature_names(1, lambda w: norm(w) or "", lex)
    assert "LEX:Money" in names
    for c in CRITERIA[1:]:
        assert "LEX:Money" not in planted_feature_names(c, lambda w: norm(w) or "", lex)
