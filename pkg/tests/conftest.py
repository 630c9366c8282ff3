import time

import pytest

from dgd_adversary import engine

SUITE_BUDGET_S = 30.0

ACCEPTANCE_LINES: list[str] = []
_state = {}


@pytest.fixture(params=sorted(engine.BACKENDS))
def backend(request):
    return request.param


@pytest.fixture
def record_acceptance():
    def record(label: str, passed: bool, detail: str = ""):
        ACCEPTANCE_LINES.append(f"{'PASS' if passed else 'FAIL'}  {label}" + (f"  ({detail})" if detail else ""))
    return record


def pytest_sessionstart(session):
    _state["t0"] = time.perf_counter()


def pytest_sessionfinish(session, exitstatus):
    elapsed = time.perf_counter() - _state["t0"]
    _state["elapsed"] = elapsed
    full_run = session.testscollected > 100
    if full_run and elapsed > SUITE_BUDGET_S and session.exitstatus == 0:
        session.exitstatus = 1
    _state["full_run"] = full_run


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES and not _state.get("full_run"):
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        tr.write_line(line)
    if _state.get("full_run"):
        elapsed = _state["elapsed"]
        ok = elapsed <= SUITE_BUDGET_S
        tr.write_line(f"{'PASS' if ok else 'FAIL'}  C10 full test-suite wall time "
                      f"({elapsed:.2f} s <= {SUITE_BUDGET_S:.0f} s)")
