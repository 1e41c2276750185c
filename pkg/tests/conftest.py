import time

import pytest

from ahrsim import kernels
from ahrsim.corpus import programs

CORPUS = programs()
SWEEP = (1, 2, 5, 17, 64)


@pytest.fixture(scope="session", params=sorted(kernels.available_backends()))
def backend(request):
    return kernels.available_backends()[request.param]


@pytest.fixture
def mem():
    from ahrsim.lisp import PassiveMemory

    return PassiveMemory()


# -- acceptance reporting ----------------------------------------------

SUITE_BUDGET_S = 60.0
_verdicts: list[tuple[str, bool, str]] = []
_started = [0.0]


def pytest_sessionstart(session):
    _started[0] = time.perf_counter()


@pytest.fixture
def verdict():
    """Record one acceptance line; the test then asserts the same condition."""

    def record(name: str, ok: bool, detail: str = "") -> bool:
        _verdicts.append((name, ok, detail))
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _verdicts:
        return
    elapsed = time.perf_counter() - _started[0]
    ok = elapsed < SUITE_BUDGET_S
    lines = list(_verdicts)
    lines.append(("whole suite runtime", ok, f"{elapsed:.1f} s (budget {SUITE_BUDGET_S:.0f} s)"))
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in lines:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")


def pytest_sessionfinish(session, exitstatus):
    if _verdicts and time.perf_counter() - _started[0] >= SUITE_BUDGET_S and exitstatus == 0:
        session.exitstatus = 1
