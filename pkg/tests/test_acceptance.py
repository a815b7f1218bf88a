"""Acceptance gate: runs every criterion of the embedded suite once and
reports one pass/fail line per criterion.

The whole suite shares one selftest session (the q = 25 family sweep is the
dominant cost and is computed a single time).  Run with `pytest -v` for the
per-criterion lines, or `-s` to also see the detail strings.
"""

import os

import pytest

from ffplanar.selftest import CHECKS, run_selftest


@pytest.fixture(scope="module")
def acceptance_results():
    workers = min(8, os.cpu_count() or 1)
    return {r.name: r for r in run_selftest(workers=workers)}


@pytest.mark.parametrize(
    "name",
    [name for name, _, _ in CHECKS],
    ids=[f"{number:02d}-{name}" for name, number, _ in CHECKS],
)
def test_acceptance_criterion(acceptance_results, name):
    result = acceptance_results[name]
    status = "PASS" if result.passed else "FAIL"
    print(f"criterion {result.number:2d} [{result.name}] {status} "
          f"({result.seconds:.1f}s): {result.detail}")
    assert result.passed, (
        f"criterion {result.number} ({result.name}) failed: {result.detail}"
    )
