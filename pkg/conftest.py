import functools
import os
import sys

import pytest

ROOT = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, ROOT)

from config import REFERENCE_CONFIG  # noqa: E402
from dynamics import simulate  # noqa: E402
from models import GameParams  # noqa: E402

REFERENCE = dict(epsilon=0.001, u=1e-5, D=1.83, mu=1e-6, dt=1.0, sigma=0.02)


@pytest.fixture
def fixtures_dir():
    return os.path.join(ROOT, "tests", "fixtures")


@pytest.fixture
def reference_config():
    return REFERENCE_CONFIG


@pytest.fixture
def reference_params():
    return dict(REFERENCE)


@pytest.fixture(scope="session")
def reference_run():
    """Full-length reference-parameter trajectories; the most recent few are cached."""

    @functools.lru_cache(maxsize=4)
    def cached(seed, epsilon, overrides):
        return simulate(GameParams(**{**REFERENCE, "epsilon": epsilon, "seed": seed, **dict(overrides)}))

    def run(seed=0, epsilon=REFERENCE["epsilon"], **overrides):
        return cached(seed, epsilon, tuple(sorted(overrides.items())))

    return run
