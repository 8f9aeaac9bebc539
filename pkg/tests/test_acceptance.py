"""The nine acceptance criteria at their stated sizes and tolerances (seed 42)."""

import pytest

from odelin.acceptance import CRITERIA, run_criterion

SEED = 42


@pytest.fixture(scope="module")
def results():
    return {}


@pytest.mark.parametrize("number", range(1, len(CRITERIA) + 1))
def test_criterion(number, results, capsys):
    res = run_criterion(number, seed=SEED, level="quick")
    results[number] = res
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.detail


def test_runtime_budget(results):
    # quick level must finish well inside a minute
    if len(results) < len(CRITERIA):
        pytest.skip("criteria did not all run")
    assert sum(r.seconds for r in results.values()) < 60
