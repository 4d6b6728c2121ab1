"""
Константы приложения
"""

# Коды выхода CLI
EXIT_CODES = {
    "ok": 0,
    "check_failure": 2,
    "budget": 3,
    "input": 4,
}

# Обозначения результатов проверок в табличном выводе
CHECK_STATUS = {
    True: "pass",
    False: "FAIL",
}

# Статусы задачи вложения
EMBEDDING_STATUS = {
    "solved": "solved",
    "unsolvable": "unsolvable",
}

# Статусы шага подъёма через абелево ядро
LIFT_STATUS = {
    "lifted": "lifted",
    "obstructed": "obstructed",
}

# Описание замены коэффициентов Q/Z в отчётах
QZ_PROXY_NOTE = (
    "H^2(G, Q/Z) computed as H^2(G, Z/N) modulo carry classes of Hom(G, Z/N), "
    "N = p-part of |G|; the Bogomolov p-torsion is computed exactly over F_p"
)
