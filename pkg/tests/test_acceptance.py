"""Acceptance criteria 1-10, each checked at its stated tolerance and time budget.

Run `pytest tests/test_acceptance.py` to get one PASS/FAIL line per criterion in the summary.
"""
import subprocess
import sys
import time

import pytest

from unitary_borcherds.verify import NAMES, run_all, summarize

# seconds allowed for the summed per-criterion work
BUDGET = {1: 1.0, 2: 30.0, 3: 60.0, 5: 10.0, 6: 10.0, 9: 30.0}
VERIFY_BUDGET = 180.0

RESULT_LINES = {}


@pytest.fixture(scope="module")
def merged():
    return {c.key: c for c in summarize(run_all())}


@pytest.fixture(scope="module")
def verify_run():
    t = time.perf_counter()
    res = subprocess.run([sys.executable, "-m", "unitary_borcherds", "verify", "all"],
                         capture_output=True, text=True)
    return res, time.perf_counter() - t


def record(key, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {key}: {NAMES[key]} | {detail}"
    RESULT_LINES[key] = line
    print(line)
    return ok


@pytest.mark.parametrize("key", range(1, 10))
def test_criterion(merged, key):
    c = merged[key]
    budget = BUDGET.get(key)
    in_time = budget is None or c.seconds < budget
    timing = f"{c.seconds:.2f}s" + (f" (budget {budget:.0f}s)" if budget else "")
    assert record(key, c.ok and in_time, f"{timing}; {c.detail}"), c.detail


def test_criterion_10(merged, verify_run):
    res, seconds = verify_run
    c = merged[10]
    ok = c.ok and res.returncode == 0 and seconds < VERIFY_BUDGET
    detail = f"{c.detail}; verify all exit {res.returncode} in {seconds:.1f}s (budget {VERIFY_BUDGET:.0f}s)"
    assert record(10, ok, detail), res.stdout[-2000:]
