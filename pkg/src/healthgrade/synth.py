"""Planted-signal corpus generator.

Articles are built from POS-tagged sentence templates filled with a neutral
vocabulary. For every criterion an article is "planted" with some
probability: one or two of its neutral sentences are swapped for sentences
carrying that criterion's signal words, so planted and unplanted articles
have the same length distribution. The criterion label is the plant
indicator, then corrupted by random flips, and a share of labels is set to
NA independently.

The same templates double as training material for the POS tagger.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass

from . import CRITERIA
from .corpus import Article, CriterionLabels, Label

_NOUNS = """study team group report analysis program office center project approach method
    finding sample survey region community population condition therapy treatment drug device
    procedure test scan diet habit school city county week month journal article paper question
    issue trend measure agency board campaign committee database decade detail district effort
    event factor feature framework guideline household image index instrument interview kit
    laboratory leader meeting member model network  panel partner pattern period
    pilot plan platform policy position practice process profile protocol quarter range record
    response review role routine schedule score screen season sector segment series session
    setting signal site skill source stage standard step strategy structure subject summary
    system table target task technique term theme theory timeline tool topic track unit update
    user value variable version view visit volunteer window workshop year zone muscle tissue
    organ liver kidney lung brain bone skin blood gene protein cell enzyme hormone virus vaccine
    infection injury fever cough headache sleep stress mood memory weight diabetes asthma
    allergy arthritis dementia migraine stroke tumor cancer lesion rash ulcer wound nerve joint
    spine muscle eye ear tooth mouth throat stomach gut heart vessel artery vein pulse dose pill
    tablet capsule injection inhaler patch cream drop syringe monitor sensor app website email
    phone letter form chart label leaflet booklet video podcast interviewer author editor
    reporter reader viewer writer speaker teacher student parent child neighbor resident citizen
    worker farmer driver athlete runner swimmer player coach trainer chef baker nurse pharmacist
    dentist surgeon therapist counselor scientist researcher engineer analyst economist
    statistician biologist chemist physicist manager director officer""".split()
_NOUN_PLURAL_IRREGULAR = {"child": "children", "tooth": "teeth", "analysis": "analyses", "diabetes": None,
                          "arthritis": None, "asthma": None, "dementia": None}
_VERBS = """examine measure track monitor review assess explore describe identify confirm evaluate
    consider discuss gather collect analyze share support adjust adopt advise allow attend
    balance calculate capture classify combine compare compile complete conduct connect 
    contact contain continue contribute convert correct count create debate decide define
    deliver design detect determine develop differ discover display document double enable
    encourage enroll ensure establish estimate expand expect explain extend favor finish focus
    follow form gain generate guide handle help host include increase indicate inform inspect
    install interview introduce invite join label list listen locate log manage map match
    mention model move name note notice obtain offer organize outline perform plan point
    predict prepare present produce project prompt propose protect provide publish question
    rank rate reach receive recommend record recruit register relate remain remove repeat
    request require respond restrict return reveal sample schedule screen search select
    separate signal simplify sort start state stress study submit summarize survey suspect
    test trace train transfer translate update use validate verify view visit wait watch
    weigh welcome work""".split()
_ADJECTIVES = """new large small recent early local national common young elderly healthy chronic
    daily similar different initial further current general specific medical clinical public
    regional urban rural annual typical modest brief careful detailed formal average standard
    acute active actual additional adequate adult ample annual apparent appropriate basic
    broad central certain clear close complex consistent constant critical crucial distinct
    dramatic dry early eastern effective efficient elaborate emotional entire essential
    extensive external familiar federal final firm frequent full gradual helpful high
    identical immediate important individual informal inner intense internal key last late
    least likely  linear long low main major manual marginal maximal mental minimal
    mixed mobile moderate monthly moral narrow natural nearby neutral normal northern notable
    numerous obvious occasional official online open optimal oral ordinary organic overall
    partial particular past personal physical plain popular positive practical precise primary
    prior private professional proper quiet rapid real regular reliable remote
    representative respiratory routine safe seasonal secondary separate serious severe sharp
    short significant simple single slight social solid southern special stable steady strict
    strong structural subtle sudden suitable surgical technical temporary thorough total
    traditional uniform unique usual valid various visible vital weekly western whole wide
    written""".split()
_ADVERBS = """recently carefully slowly quickly often usually still largely generally mostly
    currently previously closely regularly briefly clearly directly easily equally exactly
    fairly finally firmly formally frequently fully gradually greatly heavily highly
    initially jointly lately locally mainly mildly normally notably occasionally openly
    partly personally plainly potentially primarily properly  readily really 
    roughly routinely safely separately seriously sharply simply slightly smoothly steadily
    strictly strongly suddenly typically widely""".split()


def _plural(noun):
    if noun in _NOUN_PLURAL_IRREGULAR:
        return _NOUN_PLURAL_IRREGULAR[noun]
    if noun.endswith(("s", "x", "ch", "sh")):
        return noun + "es"
    if noun.endswith("y") and noun[-2] not in "aeiou":
        return noun[:-1] + "ies"
    return noun + "s"


def _past(verb):
    if verb.endswith("e"):
        return verb + "d"
    if verb.endswith("y") and verb[-2] not in "aeiou":
        return verb[:-1] + "ied"
    return verb + "ed"


def _third_person(verb):
    if verb.endswith(("s", "x", "ch", "sh")):
        return verb + "es"
    if verb.endswith("y") and verb[-2] not in "aeiou":
        return verb[:-1] + "ies"
    return verb + "s"


def _unique(words):
    return list(dict.fromkeys(w for w in words if w))


NEUTRAL = {
    "NN": _unique(_NOUNS),
    "NNS": _unique(_plural(n) for n in _NOUNS),
    "JJ": _unique(_ADJECTIVES),
    "VB": _unique(_VERBS),
    "VBD": _unique(_past(v) for v in _VERBS),
    "VBZ": _unique(_third_person(v) for v in _VERBS),
    "VBP": _unique(_VERBS),
    "RB": _unique(_ADVERBS),
    "IN": "in at from among during across with for after before within throughout".split(),
    "CD": "two three four five six 12 24 48 150 300".split(),
}
# passive participles reuse the past-tense forms. Neutral words were chosen so
# that none shares a normalized form with a planted word or hits the Money category.
NEUTRAL["VBN"] = NEUTRAL["VBD"]

TEMPLATES = [
    "The/DT {JJ} {NN} {VBD} the/DT {NN} {IN} {CD} {NNS}",
    "{NNS} {IN} the/DT {NN} {VBD} {RB}",
    "The/DT {NN} was/VBD {VBN} {IN} the/DT {JJ} {NN}",
    "{NNS} will/MD {VB} the/DT {NN} {IN} {CD} {NNS}",
    "The/DT {NN} {VBZ} that/IN {NNS} {VBP} a/DT {JJ} {NN}",
    "A/DT {JJ} {NN} of/IN {NNS} {VBD} {IN} the/DT {NN}",
    "It/PRP is/VBZ {JJ} to/TO {VB} the/DT {NN} {RB}",
    "The/DT {NNS} were/VBD {VBN} by/IN a/DT {NN} {IN} the/DT {NN}",
    "Some/DT {NNS} {VBP} the/DT {JJ} {NN} {IN} {NNS}",
    "The/DT {NN} {IN} the/DT {NN} {VBZ} {JJ} {NNS}",
    "{NNS} could/MD {VB} {JJ} {NNS} {IN} the/DT {NN}",
    "The/DT {JJ} {NNS} {VBD} the/DT {NN} {RB}",
    "Their/PRP$ {NN} has/VBZ been/VBN {VBN} {IN} {CD} {NNS}",
    "The/DT {NN} and/CC the/DT {NN} {VBP} {RB} {JJ}",
]

# Signal words per criterion; disjoint across criteria and from NEUTRAL.
# Only criterion 1's words fall in the Money lexicon category.
PLANTED = {
    1: (
        "cost/NN costs/NNS price/NN dollars/NNS insurance/NN expensive/JJ copay/NN afford/VB reimbursed/VBN "
        "premium/NN premiums/NNS deductible/NN payer/NN payers/NNS billing/NN invoice/NN pricing/NN "
        "overpriced/JJ affordable/JJ costly/JJ pricey/JJ bill/VB charged/VBN subsidized/VBN budget/NN expenditure/NN"
    ),
    2: (
        "reduction/NN percentage/NN absolute/JJ relative/JJ magnitude/NN quantified/VBN halved/VBN reduce/VB "
        "benefits/NNS ratio/NN odds/NNS fraction/NN proportion/NN decrease/NN decline/NN quantify/VB "
        "quadrupled/VBN tripled/VBN fewer/JJ incremental/JJ fractional/JJ hazard/NN baseline/NN denominator/NN"
    ),
    3: (
        "harms/NNS nausea/NN adverse/JJ toxicity/NN complications/NNS bleeding/NN harmful/JJ injure/VB "
        "hospitalized/VBN dizziness/NN fatigue/NN hives/NN insomnia/NN vomiting/NN seizures/NNS overdose/NN "
        "addiction/NN toxic/JJ dangerous/JJ lethal/JJ unsafe/JJ damage/VB poisoned/VBN convulsions/NNS"
    ),
    4: (
        "randomized/VBN placebo/NN observational/JJ limitations/NNS cohort/NN blinded/VBN replicate/VB "
        "rigorous/JJ methodology/NN bias/NN confounders/NNS biases/NNS controlled/JJ retrospective/JJ "
        "prospective/JJ statistical/JJ caveat/NN caveats/NNS anecdote/NN anecdotal/JJ preliminary/JJ "
        "corroborate/VB peer/NN"
    ),
    5: (
        "prevalence/NN exaggerated/VBN overdiagnosis/NN mild/JJ rare/JJ widespread/JJ epidemic/NN inflate/VB "
        "sufferers/NNS incidence/NN overstated/VBN scaremongering/NN alarmist/JJ uncommon/JJ sensational/JJ "
        "hype/NN hyped/VBN mongering/NN overblown/JJ exaggerate/VB pandemic/NN commonplace/JJ underdiagnosed/VBN"
    ),
    6: (
        "independent/JJ expert/NN conflicts/NNS funding/NN consultant/NN unaffiliated/JJ disclose/VB "
        "sponsored/VBN interests/NNS disclosure/NN disclosures/NNS honoraria/NNS stake/NN stakeholder/NN "
        "impartial/JJ partisan/JJ disinterested/JJ financed/VBN bankrolled/VBN lobbyist/NN consultancy/NN "
        "endorse/VB sponsor/NN"
    ),
    7: (
        "alternatives/NNS options/NNS surgery/NN exercise/NN lifestyle/NN existing/JJ conventional/JJ "
        "choose/VB physiotherapy/NN acupuncture/NN counseling/NN naturopathy/NN meditation/NN yoga/NN "
        "chiropractic/JJ holistic/JJ noninvasive/JJ orthodox/JJ substitute/VB switched/VBN rehabilitation/NN "
        "massage/NN homeopathy/NN"
    ),
    8: (
        "availability/NN approved/VBN pharmacies/NNS prescription/NN launch/VB marketed/VBN available/JJ "
        "licensed/JJ supply/NN shortage/NN shortages/NNS backorder/NN pharmacy/NN distributor/NN "
        "retail/JJ purchasable/JJ procurable/JJ stocked/VBN dispensed/VBN rollout/NN formulary/NN "
        "regulator/NN stockpile/VB counter/NN"
    ),
    9: (
        "novelty/NN novel/JJ innovative/JJ pioneered/VBN breakthrough/NN predecessor/NN invent/VB "
        "unprecedented/JJ precursors/NNS innovation/NN invention/NN originality/NN groundbreaking/JJ "
        "revolutionary/JJ inventor/NN patent/NN patented/VBN ingenuity/NN cutting/JJ firstever/JJ "
        "reinvent/VB prototype/NN trailblazer/NN"
    ),
    10: (
        "release/NN statement/NN spokesperson/NN announced/VBN publicist/NN verbatim/JJ promotional/JJ "
        "quote/VB releases/NNS press/NN spin/NN embargo/NN embargoed/VBN newsroom/NN communique/NN "
        "advertorial/NN copied/VBN paraphrased/VBN plagiarized/VBN boilerplate/NN regurgitate/VB "
        "hyperbole/NN publicists/NNS"
    ),
}

HONORIFICS = ["Dr.", "Prof.", "Mr.", "Ms.", "Mrs."]
FIRST_NAMES = ["Jane", "Maria", "David", "Wei", "Amara", "Tom", "Priya", "Lars"]
LAST_NAMES = ["Smith", "Okafor", "Chen", "Garcia", "Novak", "Patel", "Larsen", "Kim"]
ORG_NAMES = ["Mayo", "Stanford", "Harvard", "Cleveland", "Karolinska", "Riverside", "Northfield", "Bayview"]
ORG_SUFFIXES = ["Clinic", "University", "Institute", "Foundation", "Center"]

OUTLETS = [
    "dailyherald.com", "healthwire.net", "medwatchnews.org", "thetimesreport.co.uk",
    "citypost.com", "wellnessdaily.com.au",
]
EXTERNAL_DOMAINS = [
    "nih.gov", "cdc.gov", "who.int", "nejm.org", "thelancet.com", "bmj.com", "nature.com",
    "jamanetwork.com", "mayoclinic.org", "webmd.com", "bbc.co.uk", "reuters.com",
    "nytimes.com", "fda.gov", "sciencedaily.com", "eurekalert.org", "prnewswire.com",
    "healthblogger.example.net", "wellnessfacts.example.org",
]

_SLOT_RE = re.compile(r"\{(\w+\$?)\}")


def planted_words(criterion: int) -> list[tuple[str, str]]:
    return [tuple(item.split("/")) for item in PLANTED[criterion].split()]  # type: ignore[misc]


@dataclass(frozen=True)
class SynthConfig:
    n_articles: int = 1000
    seed: int = 0
    plant_rate: float = 0.45
    noise: float = 0.10
    na_rate: float = 0.10
    min_sentences: int = 14
    max_sentences: int = 20
    entity_rate: float = 0.6
    url_rate: float = 0.2
    plant_sentences: tuple[int, int] = (3, 5)
    plant_words: tuple[int, int] = (2, 3)


def _fill(template: str, rng: random.Random, planted: list[tuple[str, str]] | None = None, n_plant: int = 0):
    """Fill a template's slots; up to ``n_plant`` slots take planted words."""
    items = template.split()
    slots = [i for i, it in enumerate(items) if _SLOT_RE.fullmatch(it)]
    plant_at: dict[int, tuple[str, str]] = {}
    if planted and n_plant:
        by_tag: dict[str, list[tuple[str, str]]] = {}
        for w, t in planted:
            by_tag.setdefault(t, []).append((w, t))
        usable = [i for i in slots if items[i][1:-1] in by_tag]
        rng.shuffle(usable)
        for i in usable[:n_plant]:
            plant_at[i] = rng.choice(by_tag[items[i][1:-1]])
    out = []
    for i, it in enumerate(items):
        if i in plant_at:
            out.append(plant_at[i])
        elif i in slots:
            tag = it[1:-1]
            out.append((rng.choice(NEUTRAL[tag]), tag))
        else:
            w, _, t = it.rpartition("/")
            out.append((w, t))
    return out


def _plantable(template: str, tags: set[str]) -> bool:
    return any(m in tags for m in _SLOT_RE.findall(template))


def _capitalize(sent: list[tuple[str, str]]) -> list[tuple[str, str]]:
    w, t = sent[0]
    return [(w[:1].upper() + w[1:], t)] + sent[1:]


def _entity_sentence(rng: random.Random) -> list[tuple[str, str]]:
    first, last = rng.choice(FIRST_NAMES), rng.choice(LAST_NAMES)
    org = [(rng.choice(ORG_NAMES), "NNP"), (rng.choice(ORG_SUFFIXES), "NNP")]
    if rng.random() < 0.5:
        return [(rng.choice(HONORIFICS), "NNP"), (first, "NNP"), (last, "NNP"), ("of", "IN"), *org,
                (rng.choice(NEUTRAL["VBD"]), "VBD"), ("the", "DT"), (rng.choice(NEUTRAL["NN"]), "NN")]
    return [(first, "NNP"), (last, "NNP"), (rng.choice(NEUTRAL["VBD"]), "VBD"), ("the", "DT"),
            (rng.choice(NEUTRAL["NNS"]), "NNS"), ("at", "IN"), ("the", "DT"), *org]


def _render(sent: list[tuple[str, str]]) -> str:
    return " ".join(w for w, _ in sent) + "."


def _planted_sentence(criterion: int, rng: random.Random, n_words=(1, 2)) -> list[tuple[str, str]]:
    words = planted_words(criterion)
    tags = {t for _, t in words}
    template = rng.choice([t for t in TEMPLATES if _plantable(t, tags)])
    return _capitalize(_fill(template, rng, words, n_plant=rng.randint(*n_words)))


def _neutral_sentence(rng: random.Random) -> list[tuple[str, str]]:
    return _capitalize(_fill(rng.choice(TEMPLATES), rng))


def generate_article(idx: int, rng: random.Random, plants: dict[int, bool], cfg: SynthConfig):
    """Return the article and its tagged sentences (URLs excluded)."""
    n = rng.randint(cfg.min_sentences, cfg.max_sentences)
    sents = [_neutral_sentence(rng) for _ in range(n)]
    planted = []
    for c in CRITERIA:
        if plants[c]:
            planted.extend(
                _planted_sentence(c, rng, cfg.plant_words) for _ in range(rng.randint(*cfg.plant_sentences))
            )
    if rng.random() < cfg.entity_rate:
        planted.append(_entity_sentence(rng))
    while len(planted) > len(sents) - 2:
        sents.append(_neutral_sentence(rng))
    for pos, s in zip(rng.sample(range(len(sents)), len(planted)), planted):
        sents[pos] = s
    outlet = rng.choice(OUTLETS)
    source = f"https://www.{outlet}/health/{idx:05d}"
    links = []
    for _ in range(rng.randint(0, 4)):
        if rng.random() < 0.3:
            host = rng.choice(["www.", "news.", ""]) + outlet
        else:
            host = "www." + rng.choice(EXTERNAL_DOMAINS)
        links.append(f"https://{host}/page/{rng.randint(1, 999)}")
    body = " ".join(_render(s) for s in sents)
    if rng.random() < cfg.url_rate and links:
        body += f" More details are at {links[0]} ."
    title_sent = _capitalize(_fill(rng.choice(TEMPLATES), rng))
    art = Article(
        id=f"syn{idx:05d}",
        title=" ".join(w for w, _ in title_sent),
        body=body,
        source_url=source,
        links=tuple(links),
        fetched_at=f"2018-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}",
    )
    return art, sents + [title_sent]


def generate_corpus(n_articles: int = 1000, seed: int = 0, **kw):
    """Generate ``(articles, labels, plants)``.

    ``plants[i][c]`` is the noise-free ground truth for article ``i`` and
    criterion ``c``.
    """
    cfg = SynthConfig(n_articles=n_articles, seed=seed, **kw)
    rng = random.Random(seed)
    articles, labels, truth = [], [], []
    for i in range(cfg.n_articles):
        plants = {c: rng.random() < cfg.plant_rate for c in CRITERIA}
        art, _ = generate_article(i, rng, plants, cfg)
        lab = {}
        for c in CRITERIA:
            s = plants[c] != (rng.random() < cfg.noise)
            na = rng.random() < cfg.na_rate
            lab[c] = Label.NOT_APPLICABLE if na else (Label.SATISFACTORY if s else Label.NOT_SATISFACTORY)
        articles.append(art)
        labels.append(CriterionLabels(art.id, lab))
        truth.append(plants)
    return articles, labels, truth


def tagged_sentences(n_articles: int = 300, seed: int = 1) -> list[list[tuple[str, str]]]:
    """Tagged sentences from generated articles, for tagger training."""
    # sparse planting here keeps the shipped tagger's training stream fixed
    cfg = SynthConfig(n_articles=n_articles, seed=seed, plant_sentences=(1, 2), plant_words=(1, 2))
    rng = random.Random(seed)
    out = []
    for i in range(n_articles):
        plants = {c: rng.random() < 0.5 for c in CRITERIA}
        _, sents = generate_article(i, rng, plants, cfg)
        out.extend(sents)
    return out


def planted_feature_names(criterion: int, normalize, lexicon=None) -> set[str]:
    """Feature names that carry the planted signal for ``criterion``.

    ``normalize`` maps a lowercase word to its cleaned token form. Lexicon
    categories count when a planted word hits them and no neutral word does.
    """
    words = planted_words(criterion)
    names = {f"TFIDF:{normalize(w.lower())}" for w, _ in words}
    names |= {f"POSWORD:{w.lower()}_{t}" for w, t in words}
    if lexicon is not None:
        neutral_hits = set()
        for tag_words in NEUTRAL.values():
            for w in tag_words:
                neutral_hits |= lexicon.match(normalize(w))
        for w, _ in words:
            for i in lexicon.match(normalize(w.lower())) - neutral_hits:
                names.add(f"LEX:{lexicon.names[i]}")
    return names
