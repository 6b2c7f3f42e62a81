"""Тесты перекрёстной проверки оракулов."""

import pytest

import config
from conftest import R2
from crossval import (
    ORACLES,
    SIGNATURE_PRESETS,
    build_corpus,
    check_pair,
    random_tier,
    resolve_signature,
    run_crossval,
)
from condensation import CondensationWitness, decide_condensable
from structure import StructurePair
from verdict_cache import VerdictCache


def test_resolve_signature():
    assert resolve_signature("R2") == SIGNATURE_PRESETS["R2"]
    with pytest.raises(ValueError, match="Неизвестная сигнатура"):
        resolve_signature("R3")


@pytest.mark.parametrize("fixture, expected", [("ab", True), ("ba", False)])
def test_check_pair_oracles_agree(request, fixture, expected):
    outcome = check_pair(request.getfixturevalue(fixture))
    assert outcome.verdicts == {name: expected for name in ORACLES}
    assert outcome.problems == []
    assert outcome.agree


def test_check_pair_stabilization_index(ba):
    assert check_pair(ba).stabilization_index == 2


def test_exhaustive_small_corpus():
    result = run_crossval(R2, 2, seed=5, pair_count=0)
    assert result.ok
    assert result.pairs == 1 + 4 + 256
    assert result.tiers == {"exhaustive:0": 1, "exhaustive:1": 4, "exhaustive:2": 256}
    assert 0 < result.positive < result.pairs


def test_corpus_is_deterministic(monkeypatch):
    monkeypatch.setattr(config, "CROSSVAL_EXHAUSTIVE_MAX_N", 1)
    first = [(p.index, p.tier, p.left, p.right) for p in build_corpus(R2, 3, 42, 6)]
    second = [(p.index, p.tier, p.left, p.right) for p in build_corpus(R2, 3, 42, 6)]
    assert first == second
    assert [p[0] for p in first] == list(range(5 + 6))
    assert [p[1] for p in first[5:]] == ["random:2", "random:3"] * 3


def test_random_tier_constructed_pairs_condense():
    pairs = list(random_tier(R2, [3, 4], 6, seed=9))
    assert len(pairs) == 6
    for left, right in pairs[1::2]:
        assert isinstance(decide_condensable(StructurePair(left, right)), CondensationWitness)


def test_random_tier_without_sizes():
    assert list(random_tier(R2, [], 10, seed=0)) == []


def test_random_tier_agreement(monkeypatch):
    monkeypatch.setattr(config, "CROSSVAL_EXHAUSTIVE_MAX_N", 1)
    result = run_crossval(R2, 4, seed=3, pair_count=8)
    assert result.ok
    assert result.tiers["random:2"] + result.tiers["random:3"] + result.tiers["random:4"] == 8


def test_sampling_cap(monkeypatch):
    monkeypatch.setattr(config, "CROSSVAL_PRODUCT_LIMIT", 100)
    monkeypatch.setattr(config, "CROSSVAL_SAMPLE_CAP", 30)
    result = run_crossval(R2, 2, seed=1, pair_count=0)
    assert result.tiers["exhaustive:2"] == 30
    assert result.ok


def test_cache_reuse(tmp_path):
    cache = VerdictCache(str(tmp_path / "cache.json"))
    run_crossval(R2, 1, seed=0, pair_count=0, cache=cache)
    assert cache.get_stats()["misses"] == 15
    assert (tmp_path / "cache.json").exists()

    again = VerdictCache(str(tmp_path / "cache.json"))
    result = run_crossval(R2, 1, seed=0, pair_count=0, cache=again)
    assert result.ok
    assert again.get_stats()["hits"] == 15
    assert again.get_stats()["misses"] == 0


def test_sentence_preservation_checks():
    result = run_crossval(R2, 2, seed=8, pair_count=0, sentences=5)
    assert result.ok
    assert result.sentence_checks == result.positive * 10


def test_stats_keys():
    stats = run_crossval(R2, 1, seed=0, pair_count=0).stats()
    assert set(stats) == {"pairs", "positive", "tiers", "max_stabilization_index", "sentence_checks"}


@pytest.mark.slow
def test_two_relation_signature():
    result = run_crossval(SIGNATURE_PRESETS["R2S1"], 2, seed=11, pair_count=0)
    assert result.ok
    assert result.pairs == 1 + 16 + 4096
