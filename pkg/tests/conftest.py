from fractions import Fraction

import pytest

_ACCEPTANCE = []

X_GRID = [Fraction(i, 20) for i in range(1, 20)]


@pytest.fixture
def record():
    """Record one acceptance line: record(number, title, passed, detail)."""

    def _record(number, title, passed, detail=""):
        _ACCEPTANCE.append((number, title, passed, detail))
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(_ACCEPTANCE):
        status = "PASS" if passed else "FAIL"
        line = f"[{status}] {number}. {title}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
