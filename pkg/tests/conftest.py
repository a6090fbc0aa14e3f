import warnings
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
MAPS = ROOT / "maps"
SCHEMA = ROOT / "schemas" / "report.schema.json"


@pytest.fixture
def quiet():
    """Silence the out-of-domain warning for logistic a=4 and friends."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yield


# acceptance lines, filled by test_acceptance.record()
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE:
        terminalreporter.write_line(line)
