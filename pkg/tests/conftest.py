import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_REPORT = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion for the end-of-run summary."""
    lines = request.config.stash.setdefault(_REPORT, [])

    def record(number: int, title: str, failures: list[str], detail: str = ""):
        status = "PASS" if not failures else "FAIL"
        text = f"[{number:>2}] {status}  {title}"
        if detail:
            text += f"  ({detail})"
        lines.append((number, text, failures))
        assert not failures, "\n".join(failures)

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_REPORT, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, text, failures in sorted(lines):
        terminalreporter.write_line(text)
        for failure in failures[:10]:
            terminalreporter.write_line(f"       {failure}")
        if len(failures) > 10:
            terminalreporter.write_line(f"       ... {len(failures) - 10} more")
