import time

import pytest

ACCEPTANCE = []
SUITE_BUDGET_S = 300.0
_START = time.perf_counter()


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion's outcome for the terminal summary."""
    def record(name, passed, detail=""):
        ACCEPTANCE.append((name, bool(passed), detail))
        return passed
    return record


def pytest_sessionfinish(session, exitstatus):
    if not ACCEPTANCE:
        return
    elapsed = time.perf_counter() - _START
    ok = elapsed < SUITE_BUDGET_S
    ACCEPTANCE.append(("C10 full suite runtime", ok, f"{elapsed:.1f} s (budget {SUITE_BUDGET_S:.0f} s)"))
    if not ok:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
