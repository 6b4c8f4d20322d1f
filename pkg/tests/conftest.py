import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

# make the shared corpus helpers importable from any test module
sys.path.insert(0, str(Path(__file__).parent))

from policytree.ruleio import load_ruleset  # noqa: E402

settings.register_profile(
    "suite",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

CASES = Path(__file__).resolve().parent.parent / "cases"


@pytest.fixture(scope="session")
def cases_dir() -> Path:
    return CASES


@pytest.fixture(scope="session")
def fw():
    return load_ruleset(CASES / "fw.rules")


@pytest.fixture(scope="session")
def ids():
    return load_ruleset(CASES / "ids.rules")
