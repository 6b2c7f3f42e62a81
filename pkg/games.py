"""
Модуль игр конденсации G_n^{≼c}(𝕏, 𝕐).

Игрок I выбирает элемент одной из структур, игрок II отвечает элементом другой;
II выигрывает, если построенное множество пар — частичная конденсация.
Здесь: решатель с мемоизацией, извлечение стратегий, воспроизведение партий,
последовательность Π_r и интерактивная игра.
"""

import itertools
import json
import logging
import random
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from condensation import (
    PairSet,
    PartialCondensation,
    ViolationReport,
    canonical_pairs,
    check_partial,
    extension_ok,
)
from logic import Formula, preserves_along, quantifier_rank
from structure import FiniteStructure, LazyStructure, StructurePair, explore

logger = logging.getLogger(__name__)

LEFT = "L"
RIGHT = "R"


class GameError(ValueError):
    """Базовая ошибка модуля игр."""


class InsufficientPrefixError(GameError):
    """Для ленивой структуры не объявлен достаточный исследованный префикс."""


class TranscriptError(GameError):
    """Некорректная запись партии."""


@dataclass(frozen=True)
class Move:
    """Ход игрока I: сторона (L — 𝕏, R — 𝕐) и элемент."""

    side: str
    element: int


@dataclass(frozen=True)
class TranscriptEntry:
    """Раунд партии: ход I и ответ II."""

    side: str
    move: int
    resp: int

    @property
    def pair(self) -> Tuple[int, int]:
        return (self.move, self.resp) if self.side == LEFT else (self.resp, self.move)


@dataclass(frozen=True)
class ReplayVerdict:
    winner: str
    pairs: PairSet
    violation: Optional[ViolationReport] = None


def _position_maps(pairs: PairSet) -> Tuple[Dict[int, int], Dict[int, int]]:
    mapping = dict(pairs)
    inverse = {y: x for x, y in pairs}
    return mapping, inverse


class GameSolver:
    """
    Решатель с мемоизацией по (отсортированные пары, оставшиеся раунды).

    Рассматриваются только позиции из PC: нарушение PC сохраняется при любом
    расширении, поэтому такие ответы сразу проигрышны.
    """

    def __init__(self, pair: StructurePair):
        self.pair = pair
        self.left: FiniteStructure = pair.left
        self.right: FiniteStructure = pair.right
        self.memo: Dict[Tuple[PairSet, int], bool] = {}

    def moves(self) -> List[Move]:
        return [Move(LEFT, x) for x in range(self.left.n)] + [Move(RIGHT, y) for y in range(self.right.n)]

    def responses(self, pairs: PairSet, move: Move) -> List[Tuple[int, PairSet]]:
        """Ответы II, сохраняющие PC, по возрастанию элемента."""
        mapping, inverse = _position_maps(pairs)
        result = []
        if move.side == LEFT:
            x = move.element
            if x in mapping:
                return [(mapping[x], pairs)]
            for y in range(self.right.n):
                if extension_ok(self.left, self.right, mapping, inverse, x, y):
                    result.append((y, canonical_pairs(pairs + ((x, y),))))
        else:
            y = move.element
            if y in inverse:
                return [(inverse[y], pairs)]
            for x in range(self.left.n):
                if extension_ok(self.left, self.right, mapping, inverse, x, y):
                    result.append((x, canonical_pairs(pairs + ((x, y),))))
        return result

    def wins(self, pairs: PairSet, rounds_left: int) -> bool:
        """Выигрывает ли II из позиции pairs ∈ PC при rounds_left оставшихся раундах."""
        if rounds_left == 0:
            return True
        key = (pairs, rounds_left)
        cached = self.memo.get(key)
        if cached is not None:
            return cached
        result = True
        for move in self.moves():
            if not any(self.wins(new, rounds_left - 1) for _, new in self.responses(pairs, move)):
                result = False
                break
        self.memo[key] = result
        return result

    def winning_response(self, pairs: PairSet, rounds_left: int, move: Move) -> Optional[int]:
        """Наименьший выигрывающий ответ (аналог min_{<_Y}) или None."""
        for resp, new in self.responses(pairs, move):
            if self.wins(new, rounds_left - 1):
                return resp
        return None

    def spoiling_move(self, pairs: PairSet, rounds_left: int) -> Optional[Move]:
        """Первый ход I, на который у II нет выигрывающего ответа."""
        if rounds_left == 0:
            return None
        for move in self.moves():
            if self.winning_response(pairs, rounds_left, move) is None:
                return move
        return None


class Strategy:
    """
    Детерминированная стратегия игрока II: (позиция, ход I) → ответ.

    Ответы накапливаются в таблице по каноническим позициям; поведение
    стратегии от этого не зависит.
    """

    def __init__(self, chooser: Callable[[PairSet, int, Move], Optional[int]],
                 left_size: int, right_size: int, name: str = "strategy"):
        self._chooser = chooser
        self.left_size = left_size
        self.right_size = right_size
        self.name = name
        self.table: Dict[Tuple[PairSet, int, str, int], int] = {}

    def respond(self, pairs: Iterable[Sequence[int]], rounds_left: int, move: Move) -> int:
        """
        Ответ на ход I.

        Raises:
            GameError: в противоположной структуре нет элементов
        """
        opposite = self.right_size if move.side == LEFT else self.left_size
        if opposite == 0:
            raise GameError("Противоположная структура пуста: ответить нечем")
        pairs = canonical_pairs(pairs)
        key = (pairs, rounds_left, move.side, move.element)
        if key not in self.table:
            resp = self._chooser(pairs, rounds_left, move)
            if resp is None:
                mapping, inverse = _position_maps(pairs)
                if move.side == LEFT and move.element in mapping:
                    resp = mapping[move.element]
                elif move.side == RIGHT and move.element in inverse:
                    resp = inverse[move.element]
                else:
                    resp = 0
                    logger.info("Стратегия %s: нет ответа, сохраняющего PC, на %s %d; ответ по умолчанию %d",
                                self.name, move.side, move.element, resp)
            self.table[key] = resp
        return self.table[key]

    def dump(self) -> List[Dict]:
        """Таблица стратегии для вывода в JSON."""
        return [
            {"pairs": [list(p) for p in pairs], "rounds_left": r, "side": side, "move": el, "resp": resp}
            for (pairs, r, side, el), resp in sorted(self.table.items())
        ]


def solver_strategy(solver: GameSolver) -> Strategy:
    """Стратегия из решателя: наименьший выигрывающий ответ, иначе наименьший сохраняющий PC."""

    def chooser(pairs: PairSet, rounds_left: int, move: Move) -> Optional[int]:
        resp = solver.winning_response(pairs, rounds_left, move)
        if resp is None:
            options = solver.responses(pairs, move)
            resp = options[0][0] if options else None
        return resp

    return Strategy(chooser, solver.left.n, solver.right.n, "solver")


def strategy_from_bfs(pair: StructurePair, members: Iterable[Iterable[Sequence[int]]]) -> Strategy:
    """
    Стратегия Σ по системе «туда-обратно», замкнутой относительно ограничений:
    наименьший ответ, оставляющий позицию в системе, иначе фиксированный элемент 0.
    """
    system = {canonical_pairs(f) for f in members}

    def chooser(pairs: PairSet, rounds_left: int, move: Move) -> Optional[int]:
        mapping, inverse = _position_maps(pairs)
        if move.side == LEFT:
            if move.element in mapping:
                return mapping[move.element]
            for y in range(pair.right.n):
                if canonical_pairs(pairs + ((move.element, y),)) in system:
                    return y
        else:
            if move.element in inverse:
                return inverse[move.element]
            for x in range(pair.left.n):
                if canonical_pairs(pairs + ((x, move.element),)) in system:
                    return x
        return None

    return Strategy(chooser, pair.left.n, pair.right.n, "bfs")


@dataclass
class GameResult:
    """Итог решения игры: стратегия II при победе II, линия I при победе I."""

    winner: str
    rounds: int
    strategy: Optional[Strategy] = None
    spoiling_line: Tuple[Move, ...] = ()
    prefix_relative: bool = False
    solver: Optional[GameSolver] = field(default=None, repr=False)

    @property
    def ii_wins(self) -> bool:
        return self.winner == "II"


def spoiling_line(solver: GameSolver, rounds: int) -> Tuple[Move, ...]:
    """Ходы I, побеждающие II, вдоль наименьших ответов II."""
    line: List[Move] = []
    pairs: PairSet = ()
    r = rounds
    while r > 0:
        move = solver.spoiling_move(pairs, r)
        if move is None:
            break
        line.append(move)
        options = solver.responses(pairs, move)
        if not options:
            break
        pairs = options[0][1]
        r -= 1
    return tuple(line)


def _finite_pair(pair: StructurePair, prefix: Optional[Tuple[int, int]], n: int) -> Tuple[StructurePair, bool]:
    lazy = isinstance(pair.left, LazyStructure) or isinstance(pair.right, LazyStructure)
    if not lazy:
        return pair, False
    if prefix is None:
        raise InsufficientPrefixError("Для ленивых структур нужно объявить исследованный префикс")
    sizes = []
    for s, k in zip((pair.left, pair.right), prefix):
        if k < n:
            raise InsufficientPrefixError(f"Префикс из {k} элементов недостаточен для {n} раундов")
        sizes.append(explore(s, k) if isinstance(s, LazyStructure) else s)
    return StructurePair(sizes[0], sizes[1]), True


def solve_game(pair: StructurePair, n: int, prefix: Optional[Tuple[int, int]] = None,
               solver: Optional[GameSolver] = None) -> GameResult:
    """
    Решить игру G_n^{≼c}(𝕏, 𝕐).

    Args:
        pair: Пара структур (ленивые — только вместе с prefix)
        n: Число раундов
        prefix: Объявленные размеры префиксов для ленивых структур; вердикт относителен префиксу
        solver: Готовый решатель (для переиспользования мемо)

    Returns:
        GameResult со стратегией II или линией I
    """
    finite, relative = _finite_pair(pair, prefix, n)
    solver = solver or GameSolver(finite)
    if solver.wins((), n):
        return GameResult("II", n, solver_strategy(solver), prefix_relative=relative, solver=solver)
    return GameResult("I", n, spoiling_line=spoiling_line(solver, n), prefix_relative=relative, solver=solver)


def solve_full_game(pair: StructurePair) -> GameResult:
    """
    Игра длины 2m на структурах размера m, где I может вынудить любой элемент.

    При |X| ≠ |Y| побеждает I: он по очереди называет все элементы большей структуры.
    """
    left, right = pair.left, pair.right
    if left.n != right.n:
        if left.n > right.n:
            line = tuple(Move(LEFT, x) for x in range(left.n))
        else:
            line = tuple(Move(RIGHT, y) for y in range(right.n))
        return GameResult("I", 2 * max(left.n, right.n), spoiling_line=line)
    return solve_game(pair, 2 * left.n)


# ============================================
# Последовательность Π_r
# ============================================

def enumerate_partial_condensations(pair: StructurePair) -> List[PairSet]:
    """Все частичные конденсации конечной пары."""
    left, right = pair.left, pair.right
    result: List[PairSet] = []

    def walk(x: int, mapping: Dict[int, int], inverse: Dict[int, int]):
        if x == left.n:
            result.append(canonical_pairs(mapping.items()))
            return
        walk(x + 1, mapping, inverse)
        for y in range(right.n):
            if y not in inverse and extension_ok(left, right, mapping, inverse, x, y):
                mapping[x] = y
                inverse[y] = x
                walk(x + 1, mapping, inverse)
                del mapping[x]
                del inverse[y]

    walk(0, {}, {})
    return sorted(result, key=lambda f: (len(f), f))


def _one_step_supported(pair: StructurePair, f: PairSet, system: Set[PairSet]) -> Optional[Tuple[str, int]]:
    """Первое нарушение (f1)/(f2) через одношаговые расширения, иначе None."""
    mapping, inverse = _position_maps(f)
    for x in range(pair.left.n):
        if x in mapping:
            continue
        if not any(canonical_pairs(f + ((x, y),)) in system for y in range(pair.right.n) if y not in inverse):
            return ("f1", x)
    for y in range(pair.right.n):
        if y in inverse:
            continue
        if not any(canonical_pairs(f + ((x, y),)) in system for x in range(pair.left.n) if x not in mapping):
            return ("f2", y)
    return None


@dataclass(frozen=True)
class LevelFailure:
    member: PairSet
    element: int
    clause: str


def verify_levels(pair: StructurePair, upper: Iterable[PairSet], lower: Iterable[PairSet]) -> List[LevelFailure]:
    """
    Проверить (f1)/(f2) для соседних уровней: для каждого f ∈ upper и любого
    элемента 𝕏 (𝕐) в lower есть g ⊇ f, содержащий этот элемент в области (образе).
    """
    lower_set = set(lower)
    failures = []
    for f in upper:
        if _one_step_supported(pair, f, lower_set) is None:
            continue
        # одношаговых расширений нет: ищем любые надмножества
        f_set = set(f)
        supersets = [g for g in lower_set if f_set <= set(g)]
        for clause, element in _all_requirements(pair, f):
            side = 0 if clause == "f1" else 1
            if not any(element in {p[side] for p in g} for g in supersets):
                failures.append(LevelFailure(f, element, clause))
    return failures


def _all_requirements(pair: StructurePair, f: PairSet) -> Iterator[Tuple[str, int]]:
    for x in range(pair.left.n):
        yield ("f1", x)
    for y in range(pair.right.n):
        yield ("f2", y)


@dataclass
class RoundSystem:
    """Π_0 ⊇ Π_1 ⊇ ... ⊇ Π_{r*}; канонический выбор — все выигрышные для II позиции."""

    levels: List[FrozenSet[PairSet]]
    stabilization_index: Optional[int]
    pc_count: int

    @property
    def verdict(self) -> bool:
        """∅ принадлежит всем вычисленным уровням."""
        return () in self.levels[-1]

    @property
    def stabilized(self) -> bool:
        return self.stabilization_index is not None

    def level(self, r: int) -> FrozenSet[PairSet]:
        if r < len(self.levels):
            return self.levels[r]
        if not self.stabilized:
            raise GameError(f"Уровень {r} не вычислен и система не стабилизировалась")
        return self.levels[-1]


def compute_round_system(pair: StructurePair, max_r: Optional[int] = None) -> RoundSystem:
    """
    Вычислить Π_r обратной индукцией до стабилизации (или до max_r).

    Π_0 = PC(𝕏, 𝕐); Π_{r+1} = {f ∈ Π_r : (f1) и (f2) выполняются в Π_r}.
    """
    all_pc = enumerate_partial_condensations(pair)
    current: Set[PairSet] = set(all_pc)
    levels = [frozenset(current)]
    r = 0
    stabilization = None
    while max_r is None or r < max_r:
        nxt = {f for f in current if _one_step_supported(pair, f, current) is None}
        if nxt == current:
            stabilization = r
            break
        current = nxt
        levels.append(frozenset(current))
        r += 1
    logger.debug("Π_r: %d частичных конденсаций, стабилизация на r*=%s", len(all_pc), stabilization)
    return RoundSystem(levels, stabilization, len(all_pc))


def check_round_preservation(pair: StructurePair, system: RoundSystem,
                             formulas: Iterable[Formula]) -> List[Tuple[Formula, PairSet, Dict[int, int]]]:
    """
    Сохранение позитивных формул вдоль Π_r при r ≥ qr(φ):
    для f ∈ Π_r и x̄ из dom f из 𝕏 ⊨ φ[x̄] следует 𝕐 ⊨ φ[f x̄].

    Returns:
        Список нарушений (формула, f, оценка)
    """
    violations = []
    for phi in formulas:
        q = quantifier_rank(phi)
        if q >= len(system.levels) and not system.stabilized:
            continue
        for f in sorted(system.level(q)):
            bad = preserves_along(pair.left, pair.right, dict(f), phi)
            if bad is not None:
                violations.append((phi, f, bad))
    return violations


def finitely_bicondensable(pair: StructurePair) -> bool:
    """𝕏 ∼_c^fin 𝕐: последовательности Π_r положительны в обе стороны."""
    return compute_round_system(pair).verdict and compute_round_system(pair.reversed()).verdict


# ============================================
# Партии
# ============================================

def replay(pair: StructurePair, transcript: Sequence[TranscriptEntry]) -> ReplayVerdict:
    """
    Воспроизвести партию и определить победителя по итоговому множеству пар.

    Raises:
        TranscriptError: неизвестная сторона или элемент вне универсума
    """
    pairs = []
    for k, entry in enumerate(transcript):
        if entry.side not in (LEFT, RIGHT):
            raise TranscriptError(f"Раунд {k}: неизвестная сторона {entry.side!r}")
        own, other = (pair.left, pair.right) if entry.side == LEFT else (pair.right, pair.left)
        if not (isinstance(entry.move, int) and 0 <= entry.move < own.n):
            raise TranscriptError(f"Раунд {k}: ход {entry.move!r} вне универсума")
        if not (isinstance(entry.resp, int) and 0 <= entry.resp < other.n):
            raise TranscriptError(f"Раунд {k}: ответ {entry.resp!r} вне универсума")
        pairs.append(entry.pair)
    result = check_partial(pair, pairs)
    canon = canonical_pairs(pairs)
    if isinstance(result, PartialCondensation):
        return ReplayVerdict("II", canon)
    return ReplayVerdict("I", canon, result)


def parse_transcript(text: str) -> List[TranscriptEntry]:
    """Разобрать JSON-список {"side": "L"|"R", "move": int, "resp": int}."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise TranscriptError(f"Ошибка синтаксиса JSON: {e.msg} (позиция {e.pos})") from e
    if not isinstance(data, list):
        raise TranscriptError("Запись партии должна быть JSON-списком")
    entries = []
    for k, item in enumerate(data):
        if not isinstance(item, dict) or set(item) != {"side", "move", "resp"}:
            raise TranscriptError(f"Раунд {k}: ожидаются ключи side, move, resp")
        entries.append(TranscriptEntry(item["side"], item["move"], item["resp"]))
    return entries


def serialize_transcript(transcript: Sequence[TranscriptEntry]) -> str:
    return json.dumps([{"side": e.side, "move": e.move, "resp": e.resp} for e in transcript],
                      separators=(",", ":"))


def play_against(pair: StructurePair, strategy: Strategy, i_moves: Sequence[Move]) -> Tuple[List[TranscriptEntry], ReplayVerdict]:
    """Сыграть заданную последовательность ходов I против стратегии II."""
    transcript: List[TranscriptEntry] = []
    n = len(i_moves)
    for k, move in enumerate(i_moves):
        try:
            resp = strategy.respond([e.pair for e in transcript], n - k, move)
        except GameError:
            return transcript, ReplayVerdict("I", canonical_pairs(e.pair for e in transcript))
        transcript.append(TranscriptEntry(move.side, move.element, resp))
    return transcript, replay(pair, transcript)


def all_i_lines(pair: StructurePair, n: int) -> Iterator[Tuple[Move, ...]]:
    """Все последовательности из n ходов I (стратегия II детерминирована, адаптивность не нужна)."""
    moves = [Move(LEFT, x) for x in range(pair.left.n)] + [Move(RIGHT, y) for y in range(pair.right.n)]
    return itertools.product(moves, repeat=n)


def verify_strategy(pair: StructurePair, strategy: Strategy, n: int,
                    sample: Optional[int] = None, seed: int = 0) -> List[Tuple[Move, ...]]:
    """
    Проверить стратегию II: перебором всех линий I (или случайной выборкой из sample линий).

    Returns:
        Линии I, на которых II проигрывает
    """
    if sample is None:
        lines: Iterable[Tuple[Move, ...]] = all_i_lines(pair, n)
    else:
        rng = random.Random(seed)
        moves = [Move(LEFT, x) for x in range(pair.left.n)] + [Move(RIGHT, y) for y in range(pair.right.n)]
        lines = [tuple(rng.choice(moves) for _ in range(n)) for _ in range(sample)] if moves else [()]
    failures = []
    for line in lines:
        _, verdict = play_against(pair, strategy, line)
        if verdict.winner != "II":
            failures.append(tuple(line))
    return failures


def _parse_move(text: str) -> Move:
    parts = text.strip().split()
    if len(parts) != 2 or parts[0].upper() not in (LEFT, RIGHT) or not parts[1].lstrip("-").isdigit():
        raise TranscriptError("Формат хода: 'L x' или 'R y'")
    return Move(parts[0].upper(), int(parts[1]))


def play_interactive(pair: StructurePair, n: int, human_side: str,
                     result: Optional[GameResult] = None,
                     input_fn: Callable[[str], str] = input,
                     output_fn: Callable[[str], None] = print) -> List[TranscriptEntry]:
    """
    Интерактивная партия человека против стратегии решателя.

    Args:
        pair: Пара конечных структур
        n: Число раундов
        human_side: "I" или "II"
        result: Результат solve_game для машинной стороны (если None — решается здесь)
        input_fn: Источник ввода (для тестов)
        output_fn: Приёмник вывода

    Returns:
        Запись партии
    """
    if human_side not in ("I", "II"):
        raise GameError(f"Сторона человека должна быть I или II, получено {human_side!r}")
    result = result or solve_game(pair, n)
    solver = result.solver or GameSolver(pair)
    machine_ii = solver_strategy(solver)
    transcript: List[TranscriptEntry] = []

    output_fn("=" * 60)
    output_fn(f"ИГРА КОНДЕНСАЦИИ: {n} раундов, вы играете за {human_side}")
    output_fn("=" * 60)

    for k in range(n):
        rounds_left = n - k
        pairs = canonical_pairs(e.pair for e in transcript)
        if human_side == "I":
            while True:
                try:
                    move = _parse_move(input_fn(f"Раунд {k + 1}. Ваш ход (L x | R y): "))
                    own = pair.left if move.side == LEFT else pair.right
                    if not 0 <= move.element < own.n:
                        raise TranscriptError(f"Элемент {move.element} вне универсума 0..{own.n - 1}")
                    break
                except TranscriptError as e:
                    output_fn(f"✗ {e}. Повторите ввод.")
            try:
                resp = machine_ii.respond(pairs, rounds_left, move)
            except GameError as e:
                output_fn(f"✗ {e}")
                break
            output_fn(f"→ II отвечает: {resp}")
        else:
            move = solver.spoiling_move(pairs, rounds_left) if solver.wins(pairs, rounds_left) is False else None
            if move is None:
                move = _default_move(pair, pairs)
            output_fn(f"→ I ходит: {move.side} {move.element}")
            other = pair.right if move.side == LEFT else pair.left
            if other.n == 0:
                output_fn("✗ Ответить нечем: противоположная структура пуста")
                break
            while True:
                text = input_fn(f"Раунд {k + 1}. Ваш ответ (элемент 0..{other.n - 1}): ").strip()
                if text.lstrip("-").isdigit() and 0 <= int(text) < other.n:
                    resp = int(text)
                    break
                output_fn("✗ Недопустимый элемент. Повторите ввод.")
        transcript.append(TranscriptEntry(move.side, move.element, resp))

    if len(transcript) < n:
        output_fn("\n✗ Победитель: I")
        return transcript
    verdict = replay(pair, transcript)
    output_fn(f"\n{'✓' if verdict.winner == 'II' else '✗'} Победитель: {verdict.winner}")
    if verdict.violation is not None:
        output_fn(f"  Нарушение: {verdict.violation.message}")
    return transcript


def _default_move(pair: StructurePair, pairs: PairSet) -> Move:
    mapping, inverse = _position_maps(pairs)
    for x in range(pair.left.n):
        if x not in mapping:
            return Move(LEFT, x)
    for y in range(pair.right.n):
        if y not in inverse:
            return Move(RIGHT, y)
    return Move(LEFT, 0) if pair.left.n else Move(RIGHT, 0)
