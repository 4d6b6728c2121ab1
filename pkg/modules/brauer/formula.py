"""
Модуль вычисления формулы для Br_{1,nr}(V)/Br_0(V)
Отвечает за условия b_σ(ū) = 0 на классах H¹(G, B̂), сэндвич
Ш¹_cyc ⊆ формула ⊆ H¹ и ядро H¹(G, B̂) → H¹(G, B̂_0)
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from config.settings import SCAN_CONFIG
from modules.brauer.problem import BrauerProblem, DualBModule, dual_B, dual_B0
from modules.cohom.h1 import H1Basis, h1, sha1_cyc
from modules.conjact.classes import random_u1
from modules.conjact.exponent import power_class_map
from modules.conjact.invariants import conjugate_by_lift
from modules.modarith.dense import RowReducer, kernel_array, rank_fp
from modules.unigroup.unitri import batch_power
from utils.constants import QZ_PROXY_NOTE
from utils.errors import ConsistencyError
from utils.helpers import parallel_map

logger = logging.getLogger(__name__)


@dataclass
class BrauerReport:
    """
    Результат вычисления формулы для одной группы G

    Базисы - координаты в базисе представителей H¹(G, B̂).
    b0_contains_formula = None, если n вне диапазона 3..6 (включение не утверждается).
    """

    n: int
    p: int
    order: int
    h1_dim: int
    sha_dim: int
    formula_dim: int
    b0_kernel_dim: int
    sha_b0_dim: int
    conditions: int
    sandwich: bool
    b0_contains_formula: Optional[bool]
    nopthroot: Optional[bool]
    power_conditions_change: bool
    formula_basis: np.ndarray = field(repr=False)
    sha_basis: np.ndarray = field(repr=False)
    b0_kernel_basis: np.ndarray = field(repr=False)
    notes: List[str] = field(default_factory=list)

    @property
    def formula_equals_sha(self) -> bool:
        return self.formula_dim == self.sha_dim

    def row(self) -> Dict:
        """Строка таблицы sandwich_scan"""
        return {
            "n": self.n, "p": self.p, "order": self.order,
            "h1": self.h1_dim, "sha": self.sha_dim, "formula": self.formula_dim,
            "b0_kernel": self.b0_kernel_dim, "sha_b0": self.sha_b0_dim,
            "sandwich": self.sandwich, "b0_contains_formula": self.b0_contains_formula,
            "formula_equals_sha": self.formula_equals_sha,
            "power_conditions_change": self.power_conditions_change,
        }


def qualifying_classes(problem: BrauerProblem, g: int) -> np.ndarray:
    """Номера классов [u] с σ[u] = [u^{χ(σ)}]"""
    tables = problem.tables
    action = tables.table(problem.avec(g))
    powers = power_class_map(tables.classes, problem.chi(g))
    return np.flatnonzero(action == powers)


def _sigma_conditions(problem: BrauerProblem, g: int) -> np.ndarray:
    """Базис оболочки {ū : [u] квалифицирован для σ} (строки - векторы B)"""
    coords = problem.tables.classes.rep_b_coords()[qualifying_classes(problem, g)]
    return RowReducer(coords.shape[1], problem.p, coords).rows


def condition_matrix(problem: BrauerProblem, basis: H1Basis, workers: Optional[int] = None) -> np.ndarray:
    """
    Матрица условий: строка (σ, ū), столбец t - значение rep_t(σ)(ū)

    Оболочки ū собираются по σ параллельно; строки дедуплицируются.
    """
    p = problem.p
    dim = basis.dimension
    if dim == 0:
        return np.zeros((0, 0), dtype=np.int64)
    spans = parallel_map(lambda g: _sigma_conditions(problem, g), range(problem.order), workers)
    reps = np.stack(basis.reps, axis=0)
    rows = []
    for g, span in enumerate(spans):
        if len(span):
            rows.append(np.mod(span @ reps[:, g, :].T, p))
    if not rows:
        return np.zeros((0, dim), dtype=np.int64)
    reducer = RowReducer(dim, p, np.concatenate(rows, axis=0))
    return reducer.rows


def power_condition_matrix(problem: BrauerProblem, basis: H1Basis) -> np.ndarray:
    """
    Условия, следующие из нормы: для всех σ и [u] берётся наименьшее k
    с σ^k[u] = [u^{χ(σ^k)}] и значение b_{σ^k}(ū)
    """
    p = problem.p
    group = problem.group
    classes = problem.tables.classes
    reps = np.stack(basis.reps, axis=0) if basis.dimension else None
    bcoords = classes.rep_b_coords()
    rows = []
    qualifying = {g: set(int(c) for c in qualifying_classes(problem, g)) for g in range(problem.order)}
    for g in range(problem.order):
        for c in range(classes.count):
            x, k = g, 1
            while c not in qualifying[x]:
                x = group.mul(x, g)
                k += 1
            if reps is not None:
                rows.append(np.mod(reps[:, x, :] @ bcoords[c], p))
    if not rows:
        return np.zeros((0, basis.dimension), dtype=np.int64)
    return RowReducer(basis.dimension, p, np.array(rows, dtype=np.int64)).rows


def check_coboundary_invariance(problem: BrauerProblem, dual: DualBModule, basis: H1Basis,
                                trials: Optional[int] = None, seed: Optional[int] = None) -> None:
    """Замена b на b + ∂m не меняет ни одного условия b_σ(ū)"""
    if basis.dimension == 0:
        return
    trials = SCAN_CONFIG["coboundary_trials"] if trials is None else trials
    rng = np.random.default_rng(SCAN_CONFIG["seed"] if seed is None else seed)
    p = problem.p
    module = dual.module
    spans = [_sigma_conditions(problem, g) for g in range(problem.order)]
    for _ in range(trials):
        m = rng.integers(0, p, size=dual.rank)
        boundary = np.mod(np.einsum("gij,j->gi", module.action, m) - m[None, :], p)
        for g, span in enumerate(spans):
            if len(span) and np.mod(span @ boundary[g], p).any():
                raise ConsistencyError("условие формулы зависит от представителя коцикла",
                                       witness={"sigma": g, "m": m.tolist()})


def check_class_invariance(problem: BrauerProblem, samples: Optional[int] = None,
                           seed: Optional[int] = None) -> None:
    """Условие σ[u] = [u^{χ(σ)}] на элементах совпадает с табличным (выборочно)"""
    samples = SCAN_CONFIG["class_spot_checks"] if samples is None else samples
    rng = np.random.default_rng(SCAN_CONFIG["seed"] if seed is None else seed)
    classes = problem.tables.classes
    for g in range(problem.order):
        mats = random_u1(classes.indexer, max(1, samples // max(1, problem.order)), rng)
        conj = classes.classes_of_matrices(conjugate_by_lift(mats, problem.avec(g)))
        powered = classes.classes_of_matrices(batch_power(mats, problem.chi(g), problem.p))
        direct = conj == powered
        table = np.isin(classes.classes_of_matrices(mats), qualifying_classes(problem, g))
        if not np.array_equal(direct, table):
            raise ConsistencyError("условие на классах не согласовано с элементами", witness={"sigma": g})


def _kernel(conditions: np.ndarray, dim: int, p: int) -> np.ndarray:
    if dim == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if conditions.shape[0] == 0:
        return np.eye(dim, dtype=np.int64)
    return kernel_array(conditions, p)


def b0_kernel(problem: BrauerProblem, basis: Optional[H1Basis] = None) -> np.ndarray:
    """
    Ядро H¹(G, B̂) → H¹(G, B̂_0)

    Отображение - ограничение функционалов на B_0 (координаты B̂_0).

    Возвращает:
    - базис ядра в координатах базиса H¹(G, B̂)
    """
    full = dual_B(problem)
    basis = basis or h1(full.module)
    if basis.dimension == 0:
        return np.zeros((0, 0), dtype=np.int64)
    sub = dual_B0(problem)
    cols = [full.positions.index(pos) for pos in sub.positions]
    target = h1(sub.module)
    if target.dimension == 0:
        return np.eye(basis.dimension, dtype=np.int64)
    images = np.array([target.coordinates(rep[:, cols]) for rep in basis.reps], dtype=np.int64)
    return _kernel(images.T, basis.dimension, problem.p)


def _contained(vectors: np.ndarray, space: np.ndarray, dim: int, p: int) -> bool:
    if vectors.size == 0:
        return True
    reducer = RowReducer(dim, p, space if space.size else None)
    return all(reducer.contains(v) for v in vectors)


def check_report(problem: BrauerProblem, report: BrauerReport) -> None:
    """Ш¹_cyc ⊆ формула ⊆ H¹, формула ⊆ ядро B₀ при 3 <= n <= 6, H¹ = 0 при нечётном p и сюръективном χ"""
    violated = [name for name, ok in (("sandwich", report.sandwich),
                                      ("b0_contains_formula", report.b0_contains_formula),
                                      ("nopthroot", report.nopthroot)) if ok is False]
    if violated:
        witness = dict(problem.describe(), violated=violated, row=report.row())
        raise ConsistencyError(f"нарушено {violated} при n={problem.n}, |G|={problem.order}", witness)


def evaluate_formula(problem: BrauerProblem, verify: bool = True, workers: Optional[int] = None) -> BrauerReport:
    """
    Подгруппа H¹(G, B̂), выделяемая условиями b_σ(ū) = 0

    Параметры:
    - problem: группа G ⊆ A × (Z/e)*
    - verify: проверять независимость условий от представителей
    - workers: число потоков для сбора условий

    Возвращает:
    - BrauerReport
    """
    p = problem.p
    dual = dual_B(problem)
    if not dual.pairing_ok():
        raise ConsistencyError("спаривание B̂ × B не эквивариантно")
    basis = h1(dual.module)
    dim = basis.dimension
    conditions = condition_matrix(problem, basis, workers)
    formula = _kernel(conditions, dim, p)
    if verify:
        check_coboundary_invariance(problem, dual, basis)
        check_class_invariance(problem)
    sha = sha1_cyc(dual.module, basis)
    kernel = b0_kernel(problem, basis)
    sha_b0 = sha1_cyc(dual_B0(problem).module)
    power = power_condition_matrix(problem, basis)
    combined = np.concatenate([conditions.reshape(-1, dim), power.reshape(-1, dim)], axis=0) if dim else conditions
    power_changes = bool(dim) and rank_fp(combined, p) != rank_fp(conditions.reshape(-1, dim), p)
    if power_changes:
        logger.warning(f"условия из нормы меняют ядро: n={problem.n}, |G|={problem.order}")
    in_range = 3 <= problem.n <= 6
    nopthroot = None
    if p % 2 == 1 and problem.chi_surjective():
        nopthroot = dim == 0
    report = BrauerReport(
        n=problem.n, p=p, order=problem.order, h1_dim=dim,
        sha_dim=int(sha.dimension), formula_dim=int(formula.shape[0]),
        b0_kernel_dim=int(kernel.shape[0]), sha_b0_dim=int(sha_b0.dimension),
        conditions=int(conditions.shape[0]),
        sandwich=_contained(sha.basis, formula, dim, p),
        b0_contains_formula=_contained(formula, kernel, dim, p) if in_range else None,
        nopthroot=nopthroot, power_conditions_change=power_changes,
        formula_basis=formula, sha_basis=sha.basis, b0_kernel_basis=kernel,
        notes=[QZ_PROXY_NOTE],
    )
    logger.debug(f"формула: n={problem.n}, |G|={problem.order}, H1={dim}, Ш={report.sha_dim}, "
                 f"формула={report.formula_dim}, ядро B0={report.b0_kernel_dim}")
    check_report(problem, report)
    return report
