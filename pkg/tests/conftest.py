import functools
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from modalpres.synthesis import enumerate_models  # noqa: E402

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@functools.lru_cache(maxsize=None)
def small_models(n=2):
    return tuple(enumerate_models(["p"], n))


@functools.lru_cache(maxsize=None)
def small_trees(max_height=2, max_branching=2):
    return tuple(enumerate_models(["p"], tree_only=True, max_height=max_height,
                                  max_branching=max_branching))


@pytest.fixture
def fixtures_dir():
    return FIXTURES
