import pytest

from antiplane.acceptance import Baseline

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def baseline():
    """Shared t = 400 reference run (tens of seconds, computed once)."""
    return Baseline()


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split("]", 1)[1].split(".", 1)[0])):
            terminalreporter.write_line(line)
