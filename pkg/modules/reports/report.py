"""
Модуль отчётов
Отвечает за сборку детерминированного JSON-отчёта команды
"""

import logging
from typing import Any, Dict, Optional

from config.settings import APP_CONFIG, BUDGET_CONFIG
from utils.helpers import canonical_json, digest, to_jsonable

logger = logging.getLogger(__name__)


def used_budgets(overrides: Optional[Dict[str, Optional[int]]] = None) -> Dict[str, int]:
    """Действующие бюджеты: значения по умолчанию с учётом флагов командной строки"""
    budgets = dict(BUDGET_CONFIG)
    for name, value in (overrides or {}).items():
        if value is not None:
            budgets[name] = int(value)
    return budgets


def build_report(command: Dict[str, Any], results: Any, input_data: Any = None,
                 budgets: Optional[Dict[str, Optional[int]]] = None,
                 timing: Optional[Dict[str, float]] = None) -> Dict[str, Any]:
    """
    Отчёт команды

    Параметры:
    - command: эхо команды (имя и значимые аргументы, без числа потоков)
    - results: результаты вычисления
    - input_data: входные данные, по которым считается input_digest
    - budgets: переопределения бюджетов
    - timing: время выполнения (только с --timing)

    Возвращает:
    - словарь, сериализуемый render_report
    """
    report = {
        "schema": APP_CONFIG["report_schema"],
        "version": APP_CONFIG["version"],
        "command": command,
        "input_digest": digest(input_data if input_data is not None else command),
        "results": to_jsonable(results),
        "budgets": used_budgets(budgets),
    }
    if timing is not None:
        report["timing"] = {key: round(value, 6) for key, value in timing.items()}
    return report


def render_report(report: Dict[str, Any]) -> str:
    """JSON с отсортированными ключами и отступом 2"""
    return canonical_json(report, indent=2)


def error_report(command: Dict[str, Any], error: Dict[str, Any]) -> Dict[str, Any]:
    """Отчёт о неудаче: свидетель или сообщение об ошибке вместо результатов"""
    report = build_report(command, None)
    report["error"] = to_jsonable(error)
    return report
