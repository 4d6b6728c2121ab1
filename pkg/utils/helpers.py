"""
Вспомогательные функции
"""

import dataclasses
import hashlib
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional

import numpy as np
from tqdm import tqdm

from config.settings import BUDGET_CONFIG, THREADS_CONFIG
from utils.errors import BudgetExceeded, InputError

logger = logging.getLogger(__name__)

_PROGRESS = {"enabled": False}
# переопределения --max-elems, --max-nodes, --threads на время команды
_OVERRIDES: Dict[str, int] = {}


def set_progress(enabled: bool) -> None:
    """Включение индикаторов прогресса tqdm (флаг --progress)"""
    _PROGRESS["enabled"] = bool(enabled)


def progress(iterable: Iterable, desc: str, total: Optional[int] = None) -> Iterable:
    """Обёртка tqdm, выключенная по умолчанию"""
    return tqdm(iterable, desc=desc, total=total, disable=not _PROGRESS["enabled"],
                dynamic_ncols=True, ascii=True, leave=False)


def budget(name: str, override: Optional[int] = None) -> int:
    """Значение бюджета: явное переопределение или значение из BUDGET_CONFIG"""
    if override is not None:
        return int(override)
    if name in _OVERRIDES:
        return _OVERRIDES[name]
    if name not in BUDGET_CONFIG:
        raise InputError(f"неизвестный бюджет {name}")
    return int(BUDGET_CONFIG[name])


def ensure_budget(name: str, required: int, override: Optional[int] = None) -> int:
    """Проверка бюджета; возвращает лимит или бросает BudgetExceeded"""
    limit = budget(name, override)
    if required > limit:
        raise BudgetExceeded(name, int(required), limit)
    return limit


def thread_count(override: Optional[int] = None) -> int:
    """Число потоков: --threads, затем переменная окружения, затем значение по умолчанию"""
    if override is not None:
        return max(1, int(override))
    if "threads" in _OVERRIDES:
        return _OVERRIDES["threads"]
    raw = os.environ.get(THREADS_CONFIG["env_var"])
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            logger.warning(f"{THREADS_CONFIG['env_var']}={raw!r} не число, используется значение по умолчанию")
    return int(THREADS_CONFIG["default"])


@contextmanager
def budget_scope(threads: Optional[int] = None, **budgets: Optional[int]) -> Iterator[None]:
    """
    Переопределения бюджетов и числа потоков для всех вызовов внутри блока

    Параметры:
    - threads: число потоков для parallel_map без явного workers
    - budgets: имя бюджета -> лимит (None - не переопределять)
    """
    unknown = sorted(set(budgets) - set(BUDGET_CONFIG))
    if unknown:
        raise InputError(f"неизвестные бюджеты {unknown}")
    saved = dict(_OVERRIDES)
    _OVERRIDES.update({name: int(value) for name, value in budgets.items() if value is not None})
    if threads is not None:
        _OVERRIDES["threads"] = max(1, int(threads))
    try:
        yield
    finally:
        _OVERRIDES.clear()
        _OVERRIDES.update(saved)


def parallel_map(func: Callable, items: Iterable, workers: Optional[int] = None) -> List[Any]:
    """
    Параллельное отображение с сохранением порядка

    Параметры:
    - func: функция одного аргумента
    - items: входные элементы
    - workers: число потоков (None - из окружения)

    Возвращает:
    - список результатов в порядке входа
    """
    items = list(items)
    workers = thread_count(workers)
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def to_jsonable(obj: Any) -> Any:
    """Приведение numpy, dataclass, кортежей и множеств к JSON-совместимому виду"""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(dataclasses.asdict(obj))
    if isinstance(obj, (set, frozenset)):
        return sorted((to_jsonable(v) for v in obj), key=lambda v: json.dumps(v, sort_keys=True))
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def canonical_json(obj: Any, indent: Optional[int] = None) -> str:
    """Каноническая JSON-строка (ключи отсортированы)"""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=indent, ensure_ascii=False)


def digest(obj: Any) -> str:
    """SHA-256 канонического JSON-представления"""
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()


def check_record(name: str, passed: bool, detail: Any = None) -> Dict[str, Any]:
    """Запись о результате одной проверки"""
    record = {"name": name, "passed": bool(passed)}
    if detail is not None:
        record["detail"] = to_jsonable(detail)
    return record


def all_passed(checks: List[Dict[str, Any]]) -> bool:
    """Все ли проверки прошли"""
    return all(check["passed"] for check in checks)


def first_failure(checks: List[Dict[str, Any]]) -> Optional[Dict[str, Any]]:
    """Первая непрошедшая проверка (минимальный свидетель)"""
    for check in checks:
        if not check["passed"]:
            return check
    return None


def nested_record(name: str, report: Dict[str, Any]) -> Dict[str, Any]:
    """Свёртка вложенного отчёта с полем checks в одну запись (свидетель - первая неудача)"""
    checks = report.get("checks", [])
    passed = report.get("passed", all_passed(checks))
    return check_record(name, passed, None if passed else first_failure(checks))


def suite_result(name: str, checks: List[Dict[str, Any]], **extra: Any) -> Dict[str, Any]:
    """Результат набора проверок"""
    result = {"suite": name, "checks": checks, "passed": all_passed(checks)}
    result.update(extra)
    return result
