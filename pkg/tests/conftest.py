import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

DATA = Path(__file__).parent / "data"
SCHEMAS = Path(__file__).parent.parent / "docs" / "schemas"


@pytest.fixture
def sample_csv() -> Path:
    return DATA / "sample.csv"


@pytest.fixture
def sample_jsonl() -> Path:
    return DATA / "sample.jsonl"


@pytest.fixture
def schema_dir() -> Path:
    return SCHEMAS
