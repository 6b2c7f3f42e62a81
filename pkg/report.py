"""
Модуль отчётов: текстовая сводка в стиле баннеров и JSON-отчёт,
проверяемый по report_schema.json.
"""

import json
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import config

logger = logging.getLogger(__name__)


class ReportError(ValueError):
    """JSON-отчёт не соответствует схеме."""


@dataclass
class Report:
    """Отчёт команды: эхо команды, seed, вердикты, свидетели, статистика, время."""

    command: str
    seed: int
    verdicts: Dict[str, Any] = field(default_factory=dict)
    witnesses: Dict[str, Any] = field(default_factory=dict)
    stats: Dict[str, Any] = field(default_factory=dict)
    disagreements: List[Dict[str, Any]] = field(default_factory=list)
    seconds: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "command": self.command,
            "seed": self.seed,
            "verdicts": self.verdicts,
            "witnesses": self.witnesses,
            "timing": {"seconds": round(self.seconds, 3)},
        }
        if self.stats:
            data["stats"] = self.stats
        if self.disagreements or self.command.startswith("crossval"):
            data["disagreements"] = self.disagreements
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2, sort_keys=True)


def _load_schema(schema_file: Optional[str] = None) -> Dict:
    with open(schema_file or config.REPORT_SCHEMA_FILE, 'r', encoding='utf-8') as f:
        return json.load(f)


def validate_report(data: Dict, schema_file: Optional[str] = None) -> List[str]:
    """
    Проверить JSON-отчёт по схеме.

    Returns:
        Список сообщений об ошибках (пустой, если отчёт корректен)
    """
    import jsonschema

    validator = jsonschema.Draft7Validator(_load_schema(schema_file))
    return [f"{'/'.join(map(str, e.path)) or '<root>'}: {e.message}" for e in validator.iter_errors(data)]


def write_json_report(report: Report, path: str) -> str:
    """
    Записать JSON-отчёт, предварительно проверив его по схеме.

    Raises:
        ReportError: отчёт не проходит схему
    """
    data = report.to_dict()
    errors = validate_report(data)
    if errors:
        raise ReportError("Отчёт не соответствует схеме: " + "; ".join(errors))
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(data, f, ensure_ascii=False, indent=2, sort_keys=True)
    logger.info("JSON-отчёт записан: %s", path)
    return path


def format_text_report(report: Report, title: str) -> str:
    """Текстовая сводка отчёта."""
    lines = ["=" * 60, title, "=" * 60, ""]
    lines.append(f"Команда: {report.command}")
    lines.append(f"Seed: {report.seed}")
    lines.append("")
    if report.verdicts:
        lines.append("ВЕРДИКТЫ:")
        lines.append("-" * 60)
        for name, value in report.verdicts.items():
            if isinstance(value, bool):
                lines.append(f"{'✓' if value else '✗'} {name}")
            else:
                lines.append(f"  {name}: {value}")
        lines.append("")
    if report.stats:
        lines.append("Статистика:")
        for name, value in report.stats.items():
            lines.append(f"  - {name}: {value}")
        lines.append("")
    if report.disagreements:
        lines.append(f"РАСХОЖДЕНИЯ: {len(report.disagreements)}")
        lines.append("-" * 60)
        for item in report.disagreements[:10]:
            lines.append(f"✗ пара #{item['index']}: {item['verdicts']}")
    elif report.command.startswith("crossval"):
        lines.append("✓ Расхождений не найдено!")
    lines.append(f"\nВремя: {report.seconds:.2f} с")
    return "\n".join(lines)
