import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import letters_to_structure_bits  # noqa: E402
from randra.core import CycleStructure  # noqa: E402

GOLDEN = Path(__file__).parent / "golden"

# the two named selections over atoms a, b, c, plus a non-associative one
S1_WORDS = ["aaa", "ccc", "abb", "baa", "acc", "caa", "bcc", "abc"]
S2_WORDS = ["abb", "acc", "bcc"]
S3_WORDS = ["aaa", "abc"]


@pytest.fixture
def s1():
    return CycleStructure(3, letters_to_structure_bits(3, S1_WORDS))


@pytest.fixture
def s2():
    return CycleStructure(3, letters_to_structure_bits(3, S2_WORDS))


@pytest.fixture
def s3():
    return CycleStructure(3, letters_to_structure_bits(3, S3_WORDS))


@pytest.fixture
def golden_dir():
    return GOLDEN


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
