"""
Конфигурационный файл condlab.
Создайте файл .env в корне проекта (шаблон: env_template.txt) и переопределите нужные настройки.
"""

import hashlib
import logging
import os
from typing import Optional

from dotenv import load_dotenv

load_dotenv()

# Случайность
SEED = int(os.getenv("CONDLAB_SEED", "0"))

# Логирование библиотечных модулей
LOG_LEVEL = os.getenv("CONDLAB_LOG_LEVEL", "WARNING")

# Кеш вердиктов
USE_CACHE = os.getenv("CONDLAB_USE_CACHE", "0") == "1"
CACHE_FILE = os.getenv("CONDLAB_CACHE_FILE", "verdict_cache.json")

# Настройки генератора формул (остаток вероятности уходит на атомы отношений)
SAMPLER_P_QUANTIFIER = float(os.getenv("SAMPLER_P_QUANTIFIER", "0.35"))
SAMPLER_P_CONNECTIVE = float(os.getenv("SAMPLER_P_CONNECTIVE", "0.35"))
SAMPLER_P_EQUALITY = float(os.getenv("SAMPLER_P_EQUALITY", "0.3"))
SAMPLER_P_NEGATION = float(os.getenv("SAMPLER_P_NEGATION", "0.2"))  # только для FullFO
SAMPLER_MAX_WIDTH = int(os.getenv("SAMPLER_MAX_WIDTH", "3"))
SAMPLER_MAX_DEPTH = int(os.getenv("SAMPLER_MAX_DEPTH", "4"))

# Кросс-валидация
CROSSVAL_EXHAUSTIVE_MAX_N = int(os.getenv("CROSSVAL_EXHAUSTIVE_MAX_N", "3"))
CROSSVAL_SAMPLE_CAP = int(os.getenv("CROSSVAL_SAMPLE_CAP", "2000"))
CROSSVAL_PRODUCT_LIMIT = int(os.getenv("CROSSVAL_PRODUCT_LIMIT", "1000000"))
CROSSVAL_SENTENCES = int(os.getenv("CROSSVAL_SENTENCES", "0"))
CROSSVAL_SENTENCE_RANK = int(os.getenv("CROSSVAL_SENTENCE_RANK", "3"))

# Пути
INPUT_DIR = "Input"
OUTPUT_DIR = "Output"
REPORT_SCHEMA_FILE = os.path.join(os.path.dirname(os.path.abspath(__file__)), "report_schema.json")


def resolve_seed(cli_seed: Optional[int] = None) -> int:
    """
    Определить итоговый seed.

    Переменная окружения CONDLAB_SEED имеет приоритет над флагом --seed.

    Args:
        cli_seed: Значение флага --seed (или None)

    Returns:
        Seed для всего запуска
    """
    env_seed = os.getenv("CONDLAB_SEED")
    if env_seed not in (None, ""):
        return int(env_seed)
    if cli_seed is not None:
        return cli_seed
    return SEED


def derive_seed(seed: int, label: str) -> int:
    """
    Получить под-seed для именованной подзадачи.

    Правило разбиения фиксировано: первые 8 байт SHA-256 от строки "seed:label".
    """
    digest = hashlib.sha256(f"{seed}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def setup_logging(level: Optional[str] = None):
    """Настроить корневой логгер для библиотечных модулей."""
    logging.basicConfig(
        level=getattr(logging, (level or LOG_LEVEL).upper(), logging.WARNING),
        format="%(asctime)s %(name)s %(levelname)s: %(message)s",
    )
