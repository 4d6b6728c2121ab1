"""
Модуль загрузки файлов задач
Отвечает за чтение JSON (файл или stdin) и проверку по схеме
config/problem.schema.json
"""

import json
import logging
import sys
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional

import jsonschema

from utils.errors import InputError

logger = logging.getLogger(__name__)

SCHEMA_PATH = Path(__file__).resolve().parents[2] / "config" / "problem.schema.json"


@lru_cache(maxsize=1)
def load_schema() -> Dict[str, Any]:
    """Схема файлов задач"""
    with open(SCHEMA_PATH, "r", encoding="utf-8") as f:
        return json.load(f)


def error_path(error: jsonschema.ValidationError) -> str:
    """Путь ошибки в нотации problem.group.factors[0]"""
    path = "problem"
    for part in error.absolute_path:
        path += f"[{part}]" if isinstance(part, int) else f".{part}"
    return path


def validate_problem(data: Any) -> Dict[str, Any]:
    """
    Проверка задачи по схеме

    Параметры:
    - data: разобранный JSON

    Возвращает:
    - тот же словарь; при нарушении - InputError с путём наиболее подходящей ошибки
    """
    validator = jsonschema.Draft7Validator(load_schema())
    best = jsonschema.exceptions.best_match(validator.iter_errors(data))
    if best is not None:
        raise InputError(f"нарушение схемы: {best.message}", path=error_path(best))
    return data


def parse_problem_text(text: str) -> Dict[str, Any]:
    """Разбор и проверка текста задачи"""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"некорректный JSON: {exc.msg} (строка {exc.lineno}, столбец {exc.colno})") from exc
    return validate_problem(data)


def load_problem(source: Optional[str]) -> Dict[str, Any]:
    """
    Загрузка задачи

    Параметры:
    - source: путь к файлу; None или "-" - чтение из stdin

    Возвращает:
    - проверенный словарь задачи
    """
    if source in (None, "-"):
        text = sys.stdin.read()
    else:
        path = Path(source)
        if not path.is_file():
            raise InputError(f"файл задачи не найден: {source}")
        text = path.read_text(encoding="utf-8")
    problem = parse_problem_text(text)
    logger.info(f"загружена задача вида {problem['kind']} из {source or 'stdin'}")
    return problem
