import pytest

from blmw.config import RunConfig
from blmw.runner import run_simulation

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def berea_run():
    """Default benchmark run (N=512 to PVI 1.5), shared across tests."""
    return run_simulation(RunConfig())


@pytest.fixture
def report():
    """Record one pass/fail line for an acceptance criterion.

    The line is recorded before the assertion is evaluated, so a failing
    criterion still shows up in the summary with its measured values.
    """
    def _report(number: int, ok: bool, text: str):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {text}"
        _ACCEPTANCE_LINES.append((number, line))
        print(line)
        return ok
    return _report


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_ACCEPTANCE_LINES, key=lambda x: x[0]):
        terminalreporter.write_line(line)
