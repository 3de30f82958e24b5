import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"


def load(name):
    from xtl.xmlcore import parse_document
    return parse_document((FIXTURES / name).read_text(encoding="utf-8"))


@pytest.fixture
def fixture():
    return load
