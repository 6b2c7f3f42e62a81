"""Приёмочные прогоны на полных корпусах (долгие, помечены slow)."""

import pytest

from conftest import R2
from crossval import run_crossval
from demos import run_demo
from menagerie import poset_nonreversibility

pytestmark = pytest.mark.slow


def test_crossval_exhaustive_and_random_tiers():
    result = run_crossval(R2, 5, seed=2024, pair_count=500)
    assert result.ok, result.disagreements[:3]
    assert result.tiers["exhaustive:3"] == 2000
    assert result.tiers["random:4"] + result.tiers["random:5"] == 500


def test_sentence_preservation_on_condensable_pairs():
    result = run_crossval(R2, 3, seed=17, pair_count=0, sentences=1000)
    assert result.ok, result.disagreements[:3]
    assert result.sentence_checks == result.positive * 2000


def test_random_poset_two_hundred_steps():
    result = run_demo("random-poset-nonrev", 200, seed=0)
    assert all(result.verdicts.values())
    assert result.stats["histogram"]["back"] == 100


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_poset_seeds(seed):
    result = poset_nonreversibility(seed, 200)
    assert not result.case_problems
    assert not result.order_problems
    assert result.evidence.checked_steps == 200


def test_class_c_demo():
    report = run_demo("classC", 40, seed=0)
    assert all(report.verdicts.values()), report.verdicts


def test_example_i_demo():
    report = run_demo("example-I", 1000, seed=0)
    assert all(report.verdicts.values()), report.verdicts
