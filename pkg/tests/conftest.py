import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ecregen.field import get_field  # noqa: E402


@pytest.fixture
def gf8():
    return get_field(3)


@pytest.fixture
def gf32():
    return get_field(5)


@pytest.fixture
def rng():
    import numpy as np
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
