import pytest

from ramacf.numerics import PrecisionContext

ACCEPTANCE_LINES = []


@pytest.fixture
def ctx():
    return PrecisionContext(256)


@pytest.fixture
def ctx512():
    return PrecisionContext(512)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
