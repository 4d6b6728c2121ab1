"""
Модуль табличного вывода
Отвечает за представление отчётов в виде таблиц pandas (флаг --pretty)
"""

from typing import Any, Dict

import pandas as pd

from utils.constants import CHECK_STATUS


def checks_table(results: Dict[str, Any]) -> pd.DataFrame:
    """Таблица проверок набора: имя и результат"""
    rows = [{"проверка": c["name"], "результат": CHECK_STATUS[bool(c["passed"])]}
            for c in results.get("checks", [])]
    return pd.DataFrame(rows, columns=["проверка", "результат"])


def scalar_table(results: Dict[str, Any], prefix: str = "") -> pd.DataFrame:
    """Плоская таблица "поле - значение" по скалярным полям (вложенные словари разворачиваются)"""
    rows = []
    for key in sorted(results):
        value = results[key]
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            nested = scalar_table(value, prefix=f"{name}.")
            rows.extend(nested.to_dict("records"))
        elif not isinstance(value, list):
            rows.append({"поле": name, "значение": value})
        elif value and not isinstance(value[0], list):
            rows.append({"поле": name, "значение": ", ".join(map(str, value))})
    return pd.DataFrame(rows, columns=["поле", "значение"])


def report_table(report: Dict[str, Any]) -> pd.DataFrame:
    """Таблица по отчёту: для набора - проверки, иначе - скалярные поля результатов"""
    results = report.get("results") or {}
    if "checks" in results:
        return checks_table(results)
    return scalar_table(results)


def render_pretty(report: Dict[str, Any]) -> str:
    """Текстовое представление отчёта для терминала"""
    command = report.get("command", {})
    header = f"{command.get('name', '')} ({report.get('version', '')})"
    lines = [header, "=" * len(header)]
    if "error" in report:
        lines.append(f"ошибка: {report['error'].get('message', '')}")
    table = report_table(report)
    if not table.empty:
        lines.append(table.to_string(index=False))
    if "timing" in report:
        lines.append(f"время: {report['timing']}")
    return "\n".join(lines)
