"""
Главный скрипт condlab: проверка конденсируемости, перекрёстная проверка
оракулов, демонстрации и интерактивная игра.

Коды выхода: 0 — положительный вердикт, 1 — отрицательный, 2 — ошибка использования или разбора.
"""

import argparse
import os
import sys
import time
from typing import Callable, List, Optional, Tuple

import config
from bfs import extend_to_condensation, maximal_bfs
from condensation import CondensationWitness, decide_bicondensable, decide_condensable, finite_reversibility_sanity, ReversibilityBugError
from crossval import SIGNATURE_PRESETS, resolve_signature, run_crossval
from demos import DEMOS, DemoError, run_demo
from games import GameError, compute_round_system, parse_transcript, play_interactive, replay, solve_game, verify_strategy
from report import Report, ReportError, format_text_report, write_json_report
from structure import StructureError, StructurePair, load_structure
from verdict_cache import get_verdict_cache

EXIT_POSITIVE = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2

MODES = ("cond", "bicond", "game:n", "bfs", "rounds")


def resolve_input(path: str) -> str:
    """Путь как есть (абсолютный или существующий), иначе относительно Input/."""
    if os.path.isabs(path) or os.path.exists(path):
        return path
    return os.path.join(config.INPUT_DIR, path)


def resolve_output(path: str) -> str:
    """Имя файла без каталога кладётся в Output/."""
    return path if os.path.dirname(path) else os.path.join(config.OUTPUT_DIR, path)


def load_pair(left: str, right: str) -> StructurePair:
    left_path, right_path = resolve_input(left), resolve_input(right)
    for path in (left_path, right_path):
        if not os.path.exists(path):
            raise FileNotFoundError(f"файл не найден: {path}")
    return StructurePair(load_structure(left_path), load_structure(right_path))


def parse_mode(mode: str, rounds: Optional[int]) -> Tuple[str, Optional[int]]:
    """'game:3' → ('game', 3); для 'game' число раундов берётся из --rounds."""
    if mode.startswith("game"):
        _, _, tail = mode.partition(":")
        if tail:
            if not tail.isdigit():
                raise ValueError(f"Некорректный режим {mode!r}: ожидается game:n")
            return "game", int(tail)
        if rounds is None:
            raise ValueError("Для режима game укажите game:n или --rounds")
        return "game", rounds
    if mode not in ("cond", "bicond", "bfs", "rounds"):
        raise ValueError(f"Неизвестный режим {mode!r}; доступны: {', '.join(MODES)}")
    return mode, rounds


def _pairs_json(pairs) -> List[List[int]]:
    return [list(p) for p in pairs]


def cmd_check(args) -> Tuple[Report, int]:
    mode, rounds = parse_mode(args.mode, args.rounds)
    pair = load_pair(args.left, args.right)
    seed = config.resolve_seed(args.seed)
    start = time.time()
    report = Report(f"check {args.left} {args.right} --mode {args.mode}", seed)
    positive = False

    if mode == "cond":
        verdict = decide_condensable(pair)
        positive = isinstance(verdict, CondensationWitness)
        report.verdicts["X ≼_c Y"] = positive
        if positive:
            report.witnesses["condensation"] = _pairs_json(verdict.pairs)
        else:
            report.witnesses["certificate"] = {"reason": verdict.reason, "detail": verdict.detail,
                                               "nodes": verdict.nodes_explored}
    elif mode == "bicond":
        result = decide_bicondensable(pair)
        positive = result.bicondensable
        report.verdicts["X ∼_c Y"] = positive
        for name, verdict in (("forward", result.forward), ("backward", result.backward)):
            if isinstance(verdict, CondensationWitness):
                report.witnesses[name] = _pairs_json(verdict.pairs)
            else:
                report.witnesses[name] = {"reason": verdict.reason, "detail": verdict.detail}
        if result.failing_direction:
            report.witnesses["failing_direction"] = result.failing_direction
    elif mode == "game":
        result = solve_game(pair, rounds)
        positive = result.ii_wins
        report.verdicts[f"II выигрывает G_{rounds}"] = positive
        if positive:
            if args.strategy:
                # таблица заполняется лениво: прогоняем все линии I
                verify_strategy(pair, result.strategy, rounds)
                report.witnesses["strategy"] = result.strategy.dump()
        else:
            report.witnesses["spoiling_line"] = [[m.side, m.element] for m in result.spoiling_line]
    elif mode == "bfs":
        system = maximal_bfs(pair)
        positive = system is not None
        report.verdicts["наибольшая b.f.s. непуста"] = positive
        if positive:
            report.stats["members"] = len(system)
            run = extend_to_condensation(pair, system, ())
            if run.witness is not None:
                report.witnesses["condensation"] = _pairs_json(run.witness.pairs)
            report.witnesses["steps"] = [step.to_dict() for step in run.steps]
    else:
        system = compute_round_system(pair, rounds)
        positive = system.verdict
        report.verdicts["∅ ∈ Π_r для всех вычисленных r"] = positive
        report.stats = {
            "partial_condensations": system.pc_count,
            "levels": [len(level) for level in system.levels],
            "stabilization_index": system.stabilization_index,
        }

    report.seconds = time.time() - start
    return report, EXIT_POSITIVE if positive else EXIT_NEGATIVE


def cmd_crossval(args) -> Tuple[Report, int]:
    sig = resolve_signature(args.preset)
    seed = config.resolve_seed(args.seed)
    cache = get_verdict_cache() if (args.use_cache or config.USE_CACHE) else None
    result = run_crossval(sig, args.max_n, seed, args.pairs, cache=cache, sentences=args.sentences)
    report = Report(f"crossval --preset {args.preset} --max-n {args.max_n} --pairs {args.pairs}", seed)
    report.verdicts = {"оракулы согласованы": result.ok}
    report.stats = result.stats()
    if cache is not None:
        report.stats["cache"] = cache.get_stats()
    report.disagreements = result.disagreements
    report.seconds = result.seconds
    return report, EXIT_POSITIVE if result.ok else EXIT_NEGATIVE


def cmd_demo(args) -> Tuple[Report, int]:
    seed = config.resolve_seed(args.seed)
    report = run_demo(args.name, args.budget, seed)
    ok = all(v for v in report.verdicts.values() if isinstance(v, bool))
    return report, EXIT_POSITIVE if ok else EXIT_NEGATIVE


def cmd_sanity(args) -> Tuple[Report, int]:
    path = resolve_input(args.structure)
    if not os.path.exists(path):
        raise FileNotFoundError(f"файл не найден: {path}")
    s = load_structure(path)
    start = time.time()
    report = Report(f"sanity {args.structure}", config.resolve_seed(args.seed))
    try:
        proof = finite_reversibility_sanity(s)
    except ReversibilityBugError as e:
        report.verdicts["Cond(X) = Aut(X)"] = False
        report.witnesses["error"] = str(e)
        report.seconds = time.time() - start
        return report, EXIT_NEGATIVE
    report.verdicts["Cond(X) = Aut(X)"] = True
    report.witnesses["automorphisms"] = [list(p) for p in proof.automorphisms]
    report.seconds = time.time() - start
    return report, EXIT_POSITIVE


def cmd_replay(args) -> Tuple[Report, int]:
    pair = load_pair(args.left, args.right)
    with open(resolve_input(args.transcript), 'r', encoding='utf-8') as f:
        transcript = parse_transcript(f.read())
    verdict = replay(pair, transcript)
    report = Report(f"replay {args.left} {args.right} {args.transcript}", config.resolve_seed(args.seed))
    report.verdicts["II выигрывает партию"] = verdict.winner == "II"
    report.witnesses["pairs"] = _pairs_json(verdict.pairs)
    if verdict.violation is not None:
        report.witnesses["violation"] = verdict.violation.message
    return report, EXIT_POSITIVE if verdict.winner == "II" else EXIT_NEGATIVE


def cmd_play(args, input_fn: Callable[[str], str], output_fn: Callable[[str], None]) -> int:
    pair = load_pair(args.left, args.right)
    transcript = play_interactive(pair, args.rounds, args.side, input_fn=input_fn, output_fn=output_fn)
    verdict = replay(pair, transcript) if len(transcript) == args.rounds else None
    return EXIT_POSITIVE if verdict is not None and verdict.winner == "II" else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="condlab: конденсации, игры и системы «туда-обратно» на реляционных структурах"
    )
    parser.add_argument("--log-level", default=None, help="Уровень логирования (по умолчанию из config)")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="Проверить пару структур")
    check.add_argument("left", help="JSON-файл структуры 𝕏 (относительно Input/ или абсолютный)")
    check.add_argument("right", help="JSON-файл структуры 𝕐")
    check.add_argument("--mode", default="cond", help=f"Режим: {', '.join(MODES)} (по умолчанию: cond)")
    check.add_argument("--rounds", type=int, default=None, help="Число раундов для game / предел r для rounds")
    check.add_argument("--strategy", action="store_true", help="Выгрузить таблицу стратегии II (режим game)")
    check.add_argument("--seed", type=int, default=None)
    check.add_argument("--json", default=None, help="Путь для JSON-отчёта")

    crossval = sub.add_parser("crossval", help="Перекрёстная проверка оракулов")
    crossval.add_argument("--preset", choices=sorted(SIGNATURE_PRESETS), default="R2")
    crossval.add_argument("--max-n", type=int, default=3, help="Максимальный размер универсума (рекомендуется ≤ 6)")
    crossval.add_argument("--pairs", type=int, default=0, help="Число случайных пар для n > порога перебора")
    crossval.add_argument("--sentences", type=int, default=config.CROSSVAL_SENTENCES,
                          help="Число предложений ℘ и 𝒩 для проверки сохранения")
    crossval.add_argument("--use-cache", action="store_true", help="Использовать кеш вердиктов")
    crossval.add_argument("--seed", type=int, default=None)
    crossval.add_argument("--json", default=None)

    demo = sub.add_parser("demo", help="Демонстрации на структурах-свидетелях")
    demo.add_argument("name", help=f"Имя демонстрации: {', '.join(DEMOS)}")
    demo.add_argument("--budget", type=int, default=200, help="Число шагов построения (по умолчанию: 200)")
    demo.add_argument("--seed", type=int, default=None)
    demo.add_argument("--json", default=None)

    sanity = sub.add_parser("sanity", help="Проверить обратимость конечной структуры")
    sanity.add_argument("structure")
    sanity.add_argument("--seed", type=int, default=None)
    sanity.add_argument("--json", default=None)

    replay_parser = sub.add_parser("replay", help="Воспроизвести записанную партию")
    replay_parser.add_argument("left")
    replay_parser.add_argument("right")
    replay_parser.add_argument("transcript", help="JSON-список {side, move, resp}")
    replay_parser.add_argument("--seed", type=int, default=None)
    replay_parser.add_argument("--json", default=None)

    play = sub.add_parser("play", help="Сыграть против решателя")
    play.add_argument("left")
    play.add_argument("right")
    play.add_argument("--rounds", type=int, default=2)
    play.add_argument("--side", choices=["I", "II"], default="I", help="За кого играет человек")
    return parser


COMMANDS = {
    "check": cmd_check,
    "crossval": cmd_crossval,
    "demo": cmd_demo,
    "sanity": cmd_sanity,
    "replay": cmd_replay,
}

TITLES = {
    "check": "ПРОВЕРКА ПАРЫ СТРУКТУР",
    "crossval": "ПЕРЕКРЁСТНАЯ ПРОВЕРКА ОРАКУЛОВ",
    "demo": "ДЕМОНСТРАЦИЯ",
    "sanity": "ОБРАТИМОСТЬ КОНЕЧНОЙ СТРУКТУРЫ",
    "replay": "ВОСПРОИЗВЕДЕНИЕ ПАРТИИ",
}


def main(argv: Optional[List[str]] = None, input_fn: Callable[[str], str] = input,
         output_fn: Callable[[str], None] = print) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_POSITIVE
    config.setup_logging(args.log_level)

    try:
        if args.command == "play":
            return cmd_play(args, input_fn, output_fn)
        report, code = COMMANDS[args.command](args)
    except (FileNotFoundError, StructureError, GameError, DemoError, ValueError) as e:
        output_fn(f"✗ Ошибка: {e}")
        return EXIT_USAGE

    output_fn(format_text_report(report, TITLES[args.command]))
    if args.json:
        try:
            path = write_json_report(report, resolve_output(args.json))
            output_fn(f"\n✓ JSON-отчёт сохранён в: {path}")
        except (ReportError, OSError) as e:
            output_fn(f"✗ Не удалось сохранить отчёт: {e}")
            return EXIT_USAGE
    return code


if __name__ == "__main__":
    sys.exit(main())
