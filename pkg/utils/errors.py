"""
Модуль ошибок MasseyLab
Отвечает за иерархию исключений и их соответствие кодам выхода CLI
"""

from typing import Any, Optional


class MasseyLabError(Exception):
    """Базовое исключение библиотеки"""

    exit_code = 1

    def to_dict(self) -> dict:
        """Представление ошибки для JSON-отчёта"""
        return {"error": type(self).__name__, "message": str(self)}


class InputError(MasseyLabError, ValueError):
    """Некорректные входные данные или нарушение предусловия"""

    exit_code = 4

    def __init__(self, message: str, path: Optional[str] = None):
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message)

    def to_dict(self) -> dict:
        data = super().to_dict()
        if self.path:
            data["path"] = self.path
        return data


class UnsupportedError(InputError):
    """Запрос вне поддерживаемой области (составной модуль, нециклические N_i)"""


class BudgetExceeded(MasseyLabError):
    """
    Превышен вычислительный бюджет

    Параметры:
    - name: имя бюджета (max_elems, max_nodes, ...)
    - required: сколько требуется
    - limit: сколько разрешено
    """

    exit_code = 3

    def __init__(self, name: str, required: int, limit: int):
        self.name = name
        self.required = required
        self.limit = limit
        super().__init__(f"бюджет {name} превышен: требуется {required}, лимит {limit}")

    def to_dict(self) -> dict:
        data = super().to_dict()
        data.update({"budget": self.name, "required": self.required, "limit": self.limit})
        return data


class CheckFailure(MasseyLabError):
    """Проверка не прошла; witness содержит минимальный контрпример"""

    exit_code = 2

    def __init__(self, message: str, witness: Any = None):
        self.witness = witness
        super().__init__(message)

    def to_dict(self) -> dict:
        data = super().to_dict()
        data["witness"] = self.witness
        return data


class ConsistencyError(CheckFailure):
    """Два независимых вычисления одной величины разошлись"""
