"""Acceptance criteria 1-11; one pass/fail line per criterion is printed."""
import pytest

from tiltfilt.acceptance import CRITERIA, run_all


@pytest.fixture(scope="module")
def results():
    return {r.number: r for r in run_all(seed=0)}


@pytest.mark.parametrize("number", range(1, len(CRITERIA) + 1))
def test_criterion(results, number, capsys):
    r = results[number]
    with capsys.disabled():
        print(r.line())
    assert r.ok, r.detail
