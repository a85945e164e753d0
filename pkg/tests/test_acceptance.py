"""Acceptance criteria at their stated sizes and tolerances.

Each criterion prints one ``[PASS]`` or ``[FAIL]`` line with the observed
values; the lines are also collected in the terminal summary.
"""
from __future__ import annotations

import time

import pytest

from wrtlab.acceptance import CRITERIA, DEFAULT_SEED, run_acceptance_suite, run_criterion


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, record_property):
    result = run_criterion(number, level="full", seed=DEFAULT_SEED)
    line = result.line()
    print(line)
    record_property("acceptance", line)
    assert result.passed, line


@pytest.mark.slow
def test_fast_level_runtime():
    # the fast level must stay under five minutes; pass/fail is covered above
    t0 = time.perf_counter()
    report = run_acceptance_suite("fast", DEFAULT_SEED, echo=lambda s: None)
    elapsed = time.perf_counter() - t0
    assert len(report["criteria"]) == len(CRITERIA)
    assert elapsed < 300, f"fast level took {elapsed:.0f} s"
