"""Binary classifiers and class rebalancing."""

from .base import ALGORITHMS, Model, TrainConfig, load_model, save_model, train
from .ensemble import MajorityVote
from .forest import RandomForest
from .gnb import GaussianNB
from .resample import resample
from .svm import SVM, kkt_violation

__all__ = [
    "ALGORITHMS", "SVM", "GaussianNB", "MajorityVote", "Model", "RandomForest", "TrainConfig",
    "kkt_violation", "load_model", "resample", "save_model", "train",
]
