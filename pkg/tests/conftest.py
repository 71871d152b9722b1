"""Shared test hooks.

The acceptance tests register one line per criterion through
record_criterion; the terminal-summary hook prints them as a compact
pass/fail table at the end of the run, so the verdict on every criterion
is visible in one place no matter how much output scrolled past.
"""

from __future__ import annotations

import sys

# make `import oracles` work regardless of the pytest rootdir
sys.path.insert(0, str(__import__("pathlib").Path(__file__).parent))

_CRITERIA = []


def record_criterion(name, passed, detail=""):
    _CRITERIA.append((str(name), bool(passed), str(detail)))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _CRITERIA:
        line = f"{'PASS' if passed else 'FAIL'}  criterion {name}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
