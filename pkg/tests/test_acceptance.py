"""Acceptance criteria: one PASS/FAIL line per criterion.

Thresholds live in :mod:`lilverify.acceptance` next to each measurement.
Diagnostic (non-gating) criteria print their line but never fail the run.
Set LILVERIFY_FULL=1 for the full-size perfect-matching sweep (n <= 30).
"""
import pytest

from lilverify import acceptance


@pytest.mark.parametrize("cid", list(acceptance.CRITERIA))
def test_criterion(cid, capsys):
    outcome = acceptance.CRITERIA[cid]()
    with capsys.disabled():
        print("\n" + outcome.line())
    if outcome.gating:
        assert outcome.passed, outcome.line()
