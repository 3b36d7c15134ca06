import contextlib
import time

import pytest

_RESULTS = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Context manager recording one PASS/FAIL line per acceptance criterion."""

    @contextlib.contextmanager
    def run(number, title):
        notes = {}
        t0 = time.perf_counter()
        status = "FAIL"
        try:
            yield notes
            status = "PASS"
        finally:
            detail = ", ".join(f"{k}={v}" for k, v in notes.items())
            line = f"{status} criterion {number}: {title} ({time.perf_counter() - t0:.1f}s){' | ' + detail if detail else ''}"
            request.config.stash.setdefault(_RESULTS, []).append((number, line))

    return run


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_RESULTS, [])
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(results):
        terminalreporter.write_line(line)
