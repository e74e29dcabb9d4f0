import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


def pytest_configure(config):
    config.acceptance_results = {}


@pytest.fixture
def record(request):
    """Store one acceptance line, print it, and fail the test if not ok."""
    results = request.config.acceptance_results

    def _record(n: int, ok: bool, detail: str):
        results[n] = (ok, detail)
        print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return _record


def pytest_terminal_summary(terminalreporter):
    results = getattr(terminalreporter.config, "acceptance_results", {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
