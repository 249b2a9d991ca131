import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).resolve().parent
sys.path.insert(0, str(TESTS_DIR))

FIXTURES = TESTS_DIR.parent / "fixtures"


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def fixture_path(name):
    return FIXTURES / name


def fixture_text(name):
    return fixture_path(name).read_text()
