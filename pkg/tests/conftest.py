import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record a one-line PASS/FAIL verdict for an acceptance criterion."""
    def _report(number, name, ok, detail):
        ACCEPTANCE_LINES.append(
            f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {name} -- {detail}")
        return ok
    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
