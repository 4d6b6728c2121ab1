"""
Настройки приложения
Здесь хранятся все конфигурационные параметры
"""

# Общие сведения о приложении и формате отчётов
APP_CONFIG = {
    "name": "MasseyLab",
    "version": "1.0.0",
    "report_schema": "masseylab.report.v1",
    "problem_schema": "masseylab.problem.v1",
}

# Наборы проверок (команда suite)
SUITES = {
    "dwyer": {
        "name": "Соответствие Дуайера",
        "description": "Определяющие системы и подъёмы в U/Z, значение произведения Масси, вырождение обобщённых коэффициентов"
    },
    "conjact": {
        "name": "Действие на классах сопряжённости",
        "description": "Внешний показатель, формула сопряжения, лемма о второй диагонали, образ в B^σ, отображение Θ_Q"
    },
    "prs": {
        "name": "Подгруппы P^{r,s}",
        "description": "Свойства (1)-(3), ретракции ρ_{u,v}, подгруппа S и продолжение ретракции"
    },
    "brauer": {
        "name": "Формула для группы Брауэра",
        "description": "Сэндвич Ш¹_cyc ⊆ формула ⊆ H¹, ядро в H¹(G, B̂_0), пример n=4"
    },
    "bogomolov": {
        "name": "Мультипликатор Богомолова",
        "description": "B₀(U¹) = 0 для малых (n, p), проверки на абелевых группах"
    },
    "generalized": {
        "name": "Обобщённые коэффициенты",
        "description": "T(W), U(W), A(W), диаграмма для (n, m) = (3, 8), вырождение в U при простом m"
    },
}

# Вычислительные бюджеты по умолчанию
BUDGET_CONFIG = {
    "max_elems": 2 ** 25,
    "max_nodes": 10 ** 6,
    "h2_full_basis_order": 128,
    "h2_rank_only_order": 1024,
    "h2_pk_order": 32,
    "max_table_order": 4096,
    "brute_force_candidates": 4096,
    "aide_sample_pairs": 100000,
    "perm_cache_bytes": 2 ** 29,
    "class_chunk": 2 ** 20,
}

# Потоки
THREADS_CONFIG = {
    "env_var": "MASSEYLAB_THREADS",
    "default": 1,
}

# Логирование (только stderr, в отчёты не попадает)
LOGGING_CONFIG = {
    "format": "%(asctime)s %(levelname)s %(name)s: %(message)s",
    "level": "WARNING",
}

# Параметры перебора в sandwich_scan и проверок инвариантности
SCAN_CONFIG = {
    "samples": 64,
    "seed": 20170321,
    "coboundary_trials": 100,
    "associativity_samples": 10000,
    "class_spot_checks": 256,
    "split_sample_pairs": 2000,
}

# Виды задач во входных файлах
PROBLEM_KINDS = {
    "massey": "Произведение Масси: определённость, обращение в ноль, множество значений",
    "brauer": "Формула для неразветвлённой группы Брауэра",
    "embedding": "Задача вложения Γ → U/K в U",
    "group": "Свойства конечной группы: H²(G, Q/Z) и мультипликатор Богомолова",
}

# Подмножества параметров наборов проверок
SUITE_PARAMS = {
    "exponent_cases": [(n, p) for n in (3, 4, 5, 6) for p in (2, 3) if (n, p) != (6, 3)],
    "exponent_extended": [(6, 3), (7, 2)],
    "prs_max_n": 5,
    "prs_primes": (2, 3),
    "b2_max_n": 5,
    "group_theory_cases": [(n, 2) for n in (3, 4, 5, 6)] + [(n, 3) for n in (3, 4, 5)],
    "n45_cases": [(4, 2), (4, 3), (5, 2), (5, 3)],
    "bogomolov_cases": [(3, 2), (3, 3), (4, 2)],
    "dwyer_orders": 8,
    "dwyer_ns": (2, 3),
    # сверка решателя задач вложения с перебором: U ⊂ GL_4(F_2), |Γ| <= 8
    "solver_n": 3,
    "solver_modulus": 2,
}
