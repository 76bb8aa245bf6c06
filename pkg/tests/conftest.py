import os
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", deadline=None, max_examples=200)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def planted():
    """The 1000-article planted-signal corpus used by the end-to-end checks."""
    from healthgrade.synth import generate_corpus

    return generate_corpus(1000, seed=0)


@pytest.fixture(scope="session")
def featurizer():
    from healthgrade.featurize.space import Featurizer

    return Featurizer()
