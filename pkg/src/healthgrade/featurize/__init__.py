"""Feature families and the assembled feature space."""

from .lexicon import CategoryLexicon, lexicon_features
from .links import RankTable, link_summary, registered_domain
from .postag import fit_posword_vocab, pos_features
from .space import (
    FAMILIES,
    FeatureMatrix,
    FeatureSpace,
    Featurizer,
    FittedFeatures,
    ProcessedDoc,
    assemble,
    load_featurizer,
    process_article,
    save_featurizer,
)
from .tagger import TAGSET, PerceptronTagger
from .tfidf import TfidfModel, cosine, fit_tfidf, headline_body_similarity, tfidf_vector

__all__ = [
    "FAMILIES", "TAGSET", "CategoryLexicon", "FeatureMatrix", "FeatureSpace", "Featurizer",
    "FittedFeatures", "PerceptronTagger", "ProcessedDoc", "RankTable", "TfidfModel", "assemble",
    "cosine", "fit_posword_vocab", "fit_tfidf", "headline_body_similarity", "lexicon_features",
    "link_summary", "load_featurizer", "pos_features", "process_article", "registered_domain",
    "save_featurizer", "tfidf_vector",
]
