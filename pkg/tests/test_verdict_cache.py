"""Тесты кеша вердиктов."""

import json

import verdict_cache
from verdict_cache import VerdictCache, get_verdict_cache


def test_set_get_has(tmp_path, a2, b2):
    cache = VerdictCache(str(tmp_path / "cache.json"))
    assert not cache.has("cond", a2, b2)
    cache.set("cond", a2, b2, True)
    assert cache.has("cond", a2, b2)
    assert cache.get("cond", a2, b2) is True


def test_key_depends_on_oracle_and_order(a2, b2):
    key = VerdictCache.make_key("cond", a2, b2)
    assert len(key) == 64
    assert key != VerdictCache.make_key("bfs", a2, b2)
    assert key != VerdictCache.make_key("cond", b2, a2)


def test_stats_count_hits_and_misses(tmp_path, a2, b2):
    cache = VerdictCache(str(tmp_path / "cache.json"))
    assert cache.get("cond", a2, b2) is None
    cache.set("cond", a2, b2, False)
    assert cache.get("cond", a2, b2) is False
    stats = cache.get_stats()
    assert stats == {"total_entries": 1, "hits": 1, "misses": 1, "hit_rate": "50.0%"}


def test_empty_stats(tmp_path):
    assert VerdictCache(str(tmp_path / "cache.json")).get_stats()["hit_rate"] == "0.0%"


def test_save_and_reload(tmp_path, a2, b2):
    path = tmp_path / "cache.json"
    cache = VerdictCache(str(path))
    cache.set("full_game", a2, b2, True)
    cache.set("full_game", b2, a2, False)
    cache.save()

    data = json.loads(path.read_text(encoding="utf-8"))
    assert data["metadata"]["total_entries"] == 2
    entry = data["cache"][VerdictCache.make_key("full_game", a2, b2)]
    assert entry["oracle"] == "full_game"
    assert entry["verdict"] is True

    reloaded = VerdictCache(str(path))
    assert reloaded.get("full_game", b2, a2) is False


def test_autosave_writes_file(tmp_path, a2, b2):
    path = tmp_path / "cache.json"
    cache = VerdictCache(str(path), autosave=True)
    cache.set("bfs", a2, b2, True)
    assert path.exists()


def test_corrupt_file_starts_empty(tmp_path, a2, b2, caplog):
    path = tmp_path / "cache.json"
    path.write_text("{не json", encoding="utf-8")
    cache = VerdictCache(str(path))
    assert cache.cache == {}
    assert "Ошибка загрузки" in caplog.text


def test_clear(tmp_path, a2, b2):
    cache = VerdictCache(str(tmp_path / "cache.json"))
    cache.set("cond", a2, b2, True)
    cache.get("cond", a2, b2)
    cache.clear()
    assert cache.get_stats() == {"total_entries": 0, "hits": 0, "misses": 0, "hit_rate": "0.0%"}


def test_global_instance_is_shared(tmp_path, monkeypatch):
    monkeypatch.setattr(verdict_cache, "_verdict_cache", None)
    first = get_verdict_cache(str(tmp_path / "cache.json"))
    assert get_verdict_cache() is first
    assert first.cache_file == str(tmp_path / "cache.json")
