"""
Главный файл приложения
Командная строка MasseyLab: exponent, suite, run
"""

import argparse
import logging
import sys
import time
from typing import Any, Callable, Dict, List, Optional

from config.settings import APP_CONFIG, LOGGING_CONFIG, PROBLEM_KINDS, SUITES
from modules.base.problem_loader import load_problem
from modules.base.problem_parser import evaluate_problem
from modules.brauer.module import run_suite as run_brauer_suite
from modules.cohom.module import run_suite as run_bogomolov_suite
from modules.conjact.exponent import outer_exponent
from modules.conjact.module import run_suite as run_conjact_suite
from modules.massey.module import run_suite as run_dwyer_suite
from modules.reports.report import build_report, error_report, render_report
from modules.reports.tables import render_pretty
from modules.unigroup.module import run_generalized_suite, run_prs_suite
from utils.constants import EXIT_CODES
from utils.errors import CheckFailure, MasseyLabError
from utils.helpers import budget_scope, first_failure, set_progress, thread_count

logger = logging.getLogger("masseylab")

# Наборы проверок по именам из SUITES
SUITE_RUNNERS: Dict[str, Callable[[bool], Dict[str, Any]]] = {
    "dwyer": run_dwyer_suite,
    "conjact": run_conjact_suite,
    "prs": run_prs_suite,
    "brauer": run_brauer_suite,
    "bogomolov": run_bogomolov_suite,
    "generalized": run_generalized_suite,
}


def setup_logging(level: Optional[str]) -> None:
    """Логирование в stderr; отчёты пишутся только в stdout"""
    logging.basicConfig(stream=sys.stderr, format=LOGGING_CONFIG["format"],
                        level=(level or LOGGING_CONFIG["level"]).upper(), force=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="masseylab", description=f"{APP_CONFIG['name']} {APP_CONFIG['version']}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None, help="число потоков (иначе MASSEYLAB_THREADS)")
    common.add_argument("--max-elems", type=int, default=None, help="бюджет перечисления элементов")
    common.add_argument("--max-nodes", type=int, default=None, help="бюджет узлов дерева подъёмов")
    common.add_argument("--progress", action="store_true", help="индикаторы прогресса в stderr")
    common.add_argument("--log-level", default=None, choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    common.add_argument("--timing", action="store_true", help="добавить время выполнения в отчёт")
    common.add_argument("--pretty", action="store_true", help="таблица вместо JSON")
    sub = parser.add_subparsers(dest="command", required=True)

    exponent = sub.add_parser("exponent", parents=[common], help="внешний показатель U¹")
    exponent.add_argument("--n", type=int, required=True)
    exponent.add_argument("--p", type=int, required=True)

    suite = sub.add_parser("suite", parents=[common], help="набор проверок")
    suite.add_argument("name", choices=sorted(SUITES))
    suite.add_argument("--extended", action="store_true", help="добавить (6, 3) и n = 7")

    kinds = "; ".join(f"{kind}: {text}" for kind, text in PROBLEM_KINDS.items())
    run = sub.add_parser("run", parents=[common], help="вычисление задачи из файла",
                         description=f"Виды задач - {kinds}")
    run.add_argument("problem", nargs="?", default="-", help="файл задачи (по умолчанию stdin)")
    return parser


def cmd_exponent(args: argparse.Namespace) -> Dict[str, Any]:
    """Внешний показатель, экспонента и число классов U¹"""
    result = outer_exponent(args.n, args.p, max_elems=args.max_elems, workers=args.threads)
    return {"results": result, "passed": True}


def cmd_suite(args: argparse.Namespace) -> Dict[str, Any]:
    """Набор проверок; неудача - первая непрошедшая проверка как свидетель"""
    with budget_scope(threads=args.threads, max_elems=args.max_elems, max_nodes=args.max_nodes):
        result = SUITE_RUNNERS[args.name](args.extended)
    return {"results": result, "passed": result["passed"], "witness": first_failure(result["checks"])}


def cmd_run(args: argparse.Namespace) -> Dict[str, Any]:
    """Задача из файла или stdin"""
    problem = load_problem(args.problem)
    result = evaluate_problem(problem, max_nodes=args.max_nodes, max_elems=args.max_elems, workers=args.threads)
    return {"results": result, "passed": True, "input": problem}


COMMANDS = {
    "exponent": cmd_exponent,
    "suite": cmd_suite,
    "run": cmd_run,
}


def command_echo(args: argparse.Namespace) -> Dict[str, Any]:
    """Эхо команды без параметров, не влияющих на результат"""
    echo = {"name": args.command, "max_elems": args.max_elems, "max_nodes": args.max_nodes}
    if args.command == "exponent":
        echo.update({"n": args.n, "p": args.p})
    elif args.command == "suite":
        echo.update({"suite": args.name, "extended": args.extended})
    else:
        echo["problem"] = args.problem
    return echo


def emit(report: Dict[str, Any], pretty: bool) -> None:
    sys.stdout.write((render_pretty(report) if pretty else render_report(report)) + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    """Точка входа; возвращает код выхода"""
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    set_progress(args.progress)
    args.threads = thread_count(args.threads)
    echo = command_echo(args)
    budgets = {"max_elems": args.max_elems, "max_nodes": args.max_nodes}
    started = time.perf_counter()
    try:
        outcome = COMMANDS[args.command](args)
    except CheckFailure as exc:
        logger.error(str(exc))
        emit(error_report(echo, exc.to_dict()), args.pretty)
        return EXIT_CODES["check_failure"]
    except MasseyLabError as exc:
        logger.error(str(exc))
        emit(error_report(echo, exc.to_dict()), args.pretty)
        return exc.exit_code
    timing = {"seconds": time.perf_counter() - started} if args.timing else None
    report = build_report(echo, outcome["results"], input_data=outcome.get("input"),
                          budgets=budgets, timing=timing)
    if not outcome["passed"]:
        report["witness"] = outcome.get("witness")
        emit(report, args.pretty)
        logger.error(f"набор {args.name}: проверка не прошла")
        return EXIT_CODES["check_failure"]
    emit(report, args.pretty)
    return EXIT_CODES["ok"]


if __name__ == "__main__":
    sys.exit(main())
