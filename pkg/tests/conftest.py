import time

import pytest

from bcsalg.model import gen_magic_square, gen_nontracial
from bcsalg.reps import magic_square_paulis
from bcsalg.trace import trace_feasibility

ACCEPTANCE = pytest.StashKey[list]()
TRACE_SECONDS = {}


def _timed_trace(name, b):
    t = time.perf_counter()
    r = trace_feasibility(b)
    TRACE_SECONDS[name] = time.perf_counter() - t
    return r


@pytest.fixture(scope="session")
def square_trace():
    return _timed_trace("square", gen_magic_square())


@pytest.fixture(scope="session")
def nontracial_trace():
    return _timed_trace("nontracial", gen_nontracial())


@pytest.fixture(scope="session")
def trace_seconds():
    return TRACE_SECONDS


@pytest.fixture(scope="session")
def square_rep():
    return magic_square_paulis()


@pytest.fixture
def report(request, capsys):
    """``report(n, title, checks, seconds, limit)`` prints one PASS/FAIL line and asserts."""
    lines = request.config.stash.setdefault(ACCEPTANCE, [])

    def emit(n, title, checks, seconds, limit=None, note=""):
        failed = [k for k, ok in checks.items() if not ok]
        if limit is not None and seconds >= limit:
            failed.append(f"runtime {seconds:.1f}s >= {limit}s")
        status = "FAIL" if failed else "PASS"
        line = f"{status} criterion {n}: {title} [{seconds:.2f}s]"
        if note:
            line += f" {note}"
        if failed:
            line += " failed: " + "; ".join(failed)
        lines.append(line)
        with capsys.disabled():
            print("\n" + line)
        assert not failed, line

    return emit


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
