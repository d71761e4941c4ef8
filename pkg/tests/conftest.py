"""Shared fixtures plus the acceptance report.

Acceptance tests register one line each; the summary hook prints them after
the run so every criterion shows an explicit pass/fail verdict with its
runtime regardless of output capturing.
"""

from __future__ import annotations

import pytest

from mediamod import load_config

ACCEPTANCE_RESULTS: list[tuple[str, bool, float, str]] = []


def record_acceptance(name: str, ok: bool, elapsed: float, detail: str = "") -> None:
    ACCEPTANCE_RESULTS.append((name, ok, elapsed, detail))


@pytest.fixture()
def default_cfg():
    return load_config("")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance checks")
    for name, ok, elapsed, detail in ACCEPTANCE_RESULTS:
        verdict = "PASS" if ok else "FAIL"
        suffix = f"  [{detail}]" if detail else ""
        tr.write_line(f"{verdict}  {name}  ({elapsed:.2f}s){suffix}")
