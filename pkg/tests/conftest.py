from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures():
    return FIXTURES


CRITERIA = []


@pytest.fixture
def report(pytestconfig):
    """report(n, ok, text, seconds): one line per acceptance criterion, shown
    live and repeated in the terminal summary."""
    tr = pytestconfig.pluginmanager.get_plugin("terminalreporter")

    def emit(n, ok, text, seconds):
        line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'} ({seconds:.2f}s) {text}"
        CRITERIA.append(line)
        if tr is not None:
            tr.write_line("")
            tr.write_line(line)

    return emit


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA):
            terminalreporter.write_line(line)
