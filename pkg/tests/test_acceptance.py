"""One test per acceptance criterion; each prints a PASS/FAIL line.

Run directly (python tests/test_acceptance.py) to print only the lines.
"""
from __future__ import annotations

import sys

import pytest

from expcomplex.acceptance import CHECKS, RunConfig, run_check

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run outside pytest
    ACCEPTANCE_LINES = []


@pytest.mark.parametrize("name", sorted(CHECKS))
def test_criterion(name):
    r = run_check(name, RunConfig())
    ACCEPTANCE_LINES.append(r.line())
    print(r.line())
    assert r.passed, r.detail


def test_corrupted_bernoulli_table_is_detected():
    r = run_check("bernoulli-identity", RunConfig(corrupt_beta=True))
    print(r.line())
    assert not r.passed


if __name__ == "__main__":
    results = [run_check(name, RunConfig()) for name in sorted(CHECKS)]
    for r in results:
        print(r.line())
    print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    sys.exit(0 if all(r.passed for r in results) else 1)
