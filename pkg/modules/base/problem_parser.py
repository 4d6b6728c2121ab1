"""
Модуль разбора и вычисления задач
Отвечает за преобразование проверенного файла задачи в объекты
библиотеки и за вычисление результата по виду задачи
"""

import logging
from typing import Any, Callable, Dict, Optional

import numpy as np

from modules.brauer.formula import evaluate_formula
from modules.brauer.problem import build_problem
from modules.cohom.groups import FiniteGroup, named_group
from modules.cohom.h2 import bogomolov, h2_qz
from modules.cohom.lifting import solve_embedding, verify_embedding
from modules.massey.problem import problem_from_spec
from modules.massey.products import is_defined, massey_product_set, vanishes
from modules.unigroup.pattern import centre_pattern, lcs_pattern, make_pattern, prs_pattern, u1_pattern
from utils.errors import ConsistencyError, InputError
from utils.helpers import budget

logger = logging.getLogger(__name__)


def parse_kernel(spec: Any, n: int, path: str = "problem.kernel"):
    """Шаблон нормальной подгруппы K: "centre", "u1", lcs, prs или явные позиции"""
    if spec == "centre":
        return centre_pattern(n)
    if spec == "u1":
        return u1_pattern(n)
    kind = spec.get("type")
    try:
        if kind == "lcs":
            return lcs_pattern(n, int(spec["level"]))
        if kind == "prs":
            r, s = int(spec["r"]), int(spec["s"])
            if not (1 <= r <= n - 2 and 1 <= s <= n - 2):
                raise InputError(f"ожидалось 1 <= r, s <= {n - 2}", path=path)
            return prs_pattern(n, r, s)
        if kind == "positions":
            return make_pattern(n, [tuple(pos) for pos in spec["positions"]])
    except KeyError as exc:
        raise InputError(f"нет обязательного поля {exc.args[0]}", path=path) from exc
    raise InputError(f"неизвестный вид ядра {kind!r}", path=path)


def _matrix(values, n: int, m: int, path: str) -> np.ndarray:
    mat = np.asarray(values, dtype=np.int64)
    if mat.shape != (n + 1, n + 1):
        raise InputError(f"ожидалась матрица {n + 1}x{n + 1}, получено {mat.shape}", path=path)
    return np.mod(mat, m)


def run_massey(spec: Dict[str, Any], max_nodes: Optional[int] = None, **_) -> Dict[str, Any]:
    """defined / vanishes и, по запросу, множество значений"""
    problem = problem_from_spec(spec)
    defined = is_defined(problem, max_nodes)
    zero = vanishes(problem, max_nodes) if defined else False
    result = {"problem": problem.describe(), "defined": defined, "vanishes": zero}
    if spec.get("product_set", True) and defined:
        pset = massey_product_set(problem, max_nodes)
        if pset.contains_zero != zero:
            raise ConsistencyError("vanishes не согласован с множеством значений", witness=pset.summary())
        result["product_set"] = pset.summary()
        result["product_set"]["class_keys"] = [list(key) for key in pset.classes]
    return result


def run_brauer(spec: Dict[str, Any], max_elems: Optional[int] = None,
               workers: Optional[int] = None, **_) -> Dict[str, Any]:
    """Отчёт формулы для G ⊆ A × (Z/e)*"""
    n, p = int(spec["n"]), int(spec["p"])
    gens = []
    for i, item in enumerate(spec["generators"]):
        if len(item["a"]) != n:
            raise InputError(f"ожидалось {n} координат", path=f"problem.generators[{i}].a")
        gens.append((item["a"], item.get("chi")))
    problem = build_problem(n, p, gens, max_elems=max_elems)
    report = evaluate_formula(problem, workers=workers)
    result = {"problem": problem.describe()}
    result.update(report.row())
    result.update({
        "nopthroot": report.nopthroot,
        "conditions": report.conditions,
        "formula_basis": report.formula_basis,
        "sha_basis": report.sha_basis,
        "b0_kernel_basis": report.b0_kernel_basis,
        "notes": report.notes,
    })
    return result


def run_embedding(spec: Dict[str, Any], max_nodes: Optional[int] = None, **_) -> Dict[str, Any]:
    """Решение задачи вложения Γ → U/K в U"""
    gamma = named_group(spec["group"], "problem.group")
    n, m = int(spec["n"]), int(spec["modulus"])
    pattern = parse_kernel(spec["kernel"], n)
    if len(spec["alpha"]) != len(gamma.generators):
        raise InputError(f"ожидалось {len(gamma.generators)} матриц", path="problem.alpha")
    alpha = {s: _matrix(values, n, m, f"problem.alpha[{i}]")
             for i, (s, values) in enumerate(zip(gamma.generators, spec["alpha"]))}
    result = solve_embedding(gamma, n, m, pattern, alpha, max_nodes=max_nodes)
    if not verify_embedding(gamma, n, m, pattern, alpha, result):
        raise ConsistencyError("найденный подъём не является решением задачи вложения")
    images = None
    if result.solved:
        images = [result.images[s] for s in gamma.generators]
    return {"group": gamma.name, "order": gamma.order, "n": n, "modulus": m,
            "kernel": sorted(pattern), "status": result.status, "method": result.method,
            "nodes": result.nodes, "images": images}


def group_summary(group: FiniteGroup, workers: Optional[int] = None) -> Dict[str, Any]:
    """Порядок, экспонента, абелевость, H²(G, Q/Z) и мультипликатор Богомолова"""
    summary = {
        "group": group.name,
        "order": group.order,
        "exponent": group.exponent(),
        "abelian": group.is_abelian(),
        "h2_qz": h2_qz(group) if group.order <= budget("h2_pk_order") else None,
    }
    b0 = bogomolov(group, workers)
    summary["bogomolov"] = {"trivial": b0.trivial, "p_torsion_dims": b0.primes,
                            "bicyclic_subgroups": b0.bicyclic, "method": b0.method}
    return summary


def run_group(spec: Dict[str, Any], workers: Optional[int] = None, **_) -> Dict[str, Any]:
    return group_summary(named_group(spec["group"], "problem.group"), workers)


RUNNERS: Dict[str, Callable[..., Dict[str, Any]]] = {
    "massey": run_massey,
    "brauer": run_brauer,
    "embedding": run_embedding,
    "group": run_group,
}


def evaluate_problem(spec: Dict[str, Any], max_nodes: Optional[int] = None, max_elems: Optional[int] = None,
                     workers: Optional[int] = None) -> Dict[str, Any]:
    """
    Вычисление задачи по её виду

    Параметры:
    - spec: проверенная задача (см. problem_loader)
    - max_nodes, max_elems: переопределения бюджетов
    - workers: число потоков

    Возвращает:
    - словарь результатов для отчёта
    """
    kind = spec["kind"]
    logger.info(f"вычисление задачи {spec.get('name', kind)}")
    result = RUNNERS[kind](spec, max_nodes=max_nodes, max_elems=max_elems, workers=workers)
    result["kind"] = kind
    return result
