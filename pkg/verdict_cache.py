"""
Модуль для кеширования вердиктов оракулов.

Ключ — SHA-256 от имени оракула и канонических сериализаций пары структур,
поэтому повторный запуск crossval с --use-cache не пересчитывает известные пары.
"""

import hashlib
import json
import logging
import os
from datetime import datetime
from typing import Dict, Optional

import config
from structure import FiniteStructure, serialize_structure

logger = logging.getLogger(__name__)


class VerdictCache:
    """
    Кеш вердиктов (cond / full-game / bfs / rounds) по паре структур.
    """

    def __init__(self, cache_file: str = "verdict_cache.json", autosave: bool = False):
        """
        Args:
            cache_file: Путь к файлу кеша
            autosave: Сохранять файл после каждой новой записи
        """
        self.cache_file = cache_file
        self.autosave = autosave
        self.cache: Dict[str, Dict] = {}
        self.hits = 0
        self.misses = 0
        self.load()

    def load(self):
        """Загрузить кеш из файла."""
        if not os.path.exists(self.cache_file):
            self.cache = {}
            return
        try:
            with open(self.cache_file, 'r', encoding='utf-8') as f:
                data = json.load(f)
            self.cache = data.get('cache', {})
            logger.info("Кеш вердиктов загружен: %d записей", len(self.cache))
        except (OSError, json.JSONDecodeError) as e:
            logger.warning("Ошибка загрузки кеша вердиктов %s: %s", self.cache_file, e)
            self.cache = {}

    def save(self):
        """Сохранить кеш в файл."""
        try:
            with open(self.cache_file, 'w', encoding='utf-8') as f:
                json.dump({
                    'cache': self.cache,
                    'metadata': {
                        'last_updated': datetime.now().isoformat(),
                        'total_entries': len(self.cache)
                    }
                }, f, ensure_ascii=False, indent=2)
        except OSError as e:
            logger.warning("Ошибка сохранения кеша вердиктов: %s", e)

    @staticmethod
    def make_key(oracle: str, left: FiniteStructure, right: FiniteStructure) -> str:
        """
        Создать ключ кеша.

        Args:
            oracle: Имя оракула
            left: Левая структура
            right: Правая структура

        Returns:
            SHA256 хеш
        """
        cache_string = f"{oracle}:{serialize_structure(left)}:{serialize_structure(right)}"
        return hashlib.sha256(cache_string.encode('utf-8')).hexdigest()

    def get(self, oracle: str, left: FiniteStructure, right: FiniteStructure) -> Optional[bool]:
        """Вердикт из кеша или None."""
        key = self.make_key(oracle, left, right)
        if key in self.cache:
            self.hits += 1
            return self.cache[key]['verdict']
        self.misses += 1
        return None

    def set(self, oracle: str, left: FiniteStructure, right: FiniteStructure, verdict: bool):
        key = self.make_key(oracle, left, right)
        self.cache[key] = {
            'oracle': oracle,
            'verdict': bool(verdict),
            'timestamp': datetime.now().isoformat()
        }
        if self.autosave:
            self.save()

    def has(self, oracle: str, left: FiniteStructure, right: FiniteStructure) -> bool:
        return self.make_key(oracle, left, right) in self.cache

    def clear(self):
        """Очистить весь кеш."""
        self.cache = {}
        self.hits = 0
        self.misses = 0
        self.save()

    def get_stats(self) -> Dict:
        """Статистика использования кеша."""
        total = self.hits + self.misses
        hit_rate = (self.hits / total * 100) if total > 0 else 0

        return {
            'total_entries': len(self.cache),
            'hits': self.hits,
            'misses': self.misses,
            'hit_rate': f"{hit_rate:.1f}%"
        }


_verdict_cache: Optional[VerdictCache] = None


def get_verdict_cache(cache_file: Optional[str] = None) -> VerdictCache:
    """Получить глобальный экземпляр кеша вердиктов."""
    global _verdict_cache
    if _verdict_cache is None:
        _verdict_cache = VerdictCache(cache_file or config.CACHE_FILE)
    return _verdict_cache
