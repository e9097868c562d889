import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA = []


def record(criterion, name, ok, detail=""):
    """Remember one acceptance outcome; printed in the terminal summary."""
    _CRITERIA.append((criterion, name, bool(ok), detail))
    return ok


@pytest.fixture
def accept():
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    by_crit = {}
    for crit, name, ok, detail in _CRITERIA:
        by_crit.setdefault(crit, []).append((name, ok, detail))
    for crit in sorted(by_crit):
        parts = by_crit[crit]
        ok = all(p[1] for p in parts)
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {crit:>2}")
        for name, part_ok, detail in parts:
            terminalreporter.write_line(f"       {'ok  ' if part_ok else 'FAIL'} {name}: {detail}")
