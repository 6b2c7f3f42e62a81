"""
Перекрёстная проверка оракулов на корпусах пар конечных структур.

Для каждой пары сравниваются: поиск конденсации, полная игра длины 2m,
наибольшая b.f.s. и последовательность Π_r; дополнительно проверяются
совпадение G_n с уровнями Π_n, монотонность по раундам, (f1)/(f2) между
соседними уровнями и обратимость левой структуры.
"""

import itertools
import logging
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import config
from bfs import maximal_bfs
from condensation import CondensationWitness, ReversibilityBugError, decide_condensable, finite_reversibility_sanity
from games import GameSolver, compute_round_system, solve_full_game, verify_levels
from logic import FragmentTag, Formula, negative_below, positive_below, sample_formulas
from structure import (
    FiniteStructure,
    Signature,
    StructurePair,
    add_random_tuples,
    enumerate_structures,
    generate_random,
    random_permutation,
    serialize_structure,
)
from verdict_cache import VerdictCache

logger = logging.getLogger(__name__)

SIGNATURE_PRESETS: Dict[str, Signature] = {
    "R2": Signature.of(("R", 2)),
    "R2S1": Signature.of(("R", 2), ("S", 1)),
}

ORACLES = ("cond", "full_game", "bfs", "rounds")


@dataclass(frozen=True)
class CorpusPair:
    index: int
    tier: str
    left: FiniteStructure
    right: FiniteStructure


@dataclass
class PairOutcome:
    index: int
    verdicts: Dict[str, bool]
    problems: List[str] = field(default_factory=list)
    stabilization_index: Optional[int] = None

    @property
    def agree(self) -> bool:
        return len(set(self.verdicts[name] for name in ORACLES)) == 1 and not self.problems


@dataclass
class CrossvalResult:
    pairs: int = 0
    positive: int = 0
    tiers: Dict[str, int] = field(default_factory=dict)
    disagreements: List[Dict] = field(default_factory=list)
    max_stabilization: int = 0
    sentence_checks: int = 0
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.disagreements

    def stats(self) -> Dict:
        return {
            "pairs": self.pairs,
            "positive": self.positive,
            "tiers": dict(self.tiers),
            "max_stabilization_index": self.max_stabilization,
            "sentence_checks": self.sentence_checks,
        }


def resolve_signature(preset: str) -> Signature:
    if preset not in SIGNATURE_PRESETS:
        raise ValueError(f"Неизвестная сигнатура {preset!r}; доступны: {', '.join(SIGNATURE_PRESETS)}")
    return SIGNATURE_PRESETS[preset]


def exhaustive_tier(sig: Signature, n: int, seed: int) -> Iterator[Tuple[FiniteStructure, FiniteStructure]]:
    """
    Все упорядоченные пары структур размера n; если произведение с учётом
    числа оракулов превышает CROSSVAL_PRODUCT_LIMIT — выборка из CROSSVAL_SAMPLE_CAP пар.
    """
    structures = list(enumerate_structures(sig, n))
    total = len(structures) ** 2
    if total * len(ORACLES) <= config.CROSSVAL_PRODUCT_LIMIT:
        yield from itertools.product(structures, repeat=2)
        return
    rng = random.Random(config.derive_seed(seed, f"exhaustive:{n}"))
    logger.info("n=%d: %d пар, выборка %d", n, total, config.CROSSVAL_SAMPLE_CAP)
    for _ in range(config.CROSSVAL_SAMPLE_CAP):
        yield rng.choice(structures), rng.choice(structures)


def random_tier(sig: Signature, sizes: Sequence[int], count: int, seed: int) -> Iterator[Tuple[FiniteStructure, FiniteStructure]]:
    """
    Случайные пары: половина независимых, половина конденсируемых по построению
    (правая — перестановка левой с добавленными кортежами).
    """
    if not sizes:
        return
    rng = random.Random(config.derive_seed(seed, "random"))
    for k in range(count):
        n = sizes[k % len(sizes)]
        left = generate_random(sig, n, 0.5, rng.getrandbits(64))
        if k % 2 == 0:
            right = generate_random(sig, n, 0.5, rng.getrandbits(64))
        else:
            grown = add_random_tuples(left, 0.2, rng.getrandbits(64))
            right = grown.permute(random_permutation(n, rng.getrandbits(64)))
        yield left, right


def build_corpus(sig: Signature, max_n: int, seed: int, pair_count: int) -> Iterator[CorpusPair]:
    index = 0
    for n in range(0, min(max_n, config.CROSSVAL_EXHAUSTIVE_MAX_N) + 1):
        for left, right in exhaustive_tier(sig, n, seed):
            yield CorpusPair(index, f"exhaustive:{n}", left, right)
            index += 1
    sizes = list(range(config.CROSSVAL_EXHAUSTIVE_MAX_N + 1, max_n + 1))
    for left, right in random_tier(sig, sizes, pair_count, seed):
        yield CorpusPair(index, f"random:{left.n}", left, right)
        index += 1


def _cached(cache: Optional[VerdictCache], name: str, pair: StructurePair, compute: Callable[[], bool]) -> bool:
    if cache is None:
        return compute()
    verdict = cache.get(name, pair.left, pair.right)
    if verdict is None:
        verdict = compute()
        cache.set(name, pair.left, pair.right, verdict)
    return verdict


def check_pair(pair: StructurePair, index: int = 0, cache: Optional[VerdictCache] = None,
               positive: Sequence[Formula] = (), negative: Sequence[Formula] = ()) -> PairOutcome:
    """Прогнать все оракулы и внутренние проверки на одной паре."""
    problems: List[str] = []
    system = compute_round_system(pair)
    verdicts = {
        "cond": _cached(cache, "cond", pair, lambda: isinstance(decide_condensable(pair), CondensationWitness)),
        "full_game": _cached(cache, "full_game", pair, lambda: solve_full_game(pair).ii_wins),
        "bfs": _cached(cache, "bfs", pair, lambda: maximal_bfs(pair) is not None),
        "rounds": system.verdict,
    }

    solver = GameSolver(pair)
    r_star = system.stabilization_index or 0
    previous = True
    for n in range(r_star + 2):
        wins = solver.wins((), n)
        if wins != (() in system.level(n)):
            problems.append(f"G_{n}: II {'выигрывает' if wins else 'проигрывает'}, но ∅ {'∉' if wins else '∈'} Π_{n}")
        if wins and not previous:
            problems.append(f"нарушена монотонность: II выигрывает G_{n}, но не G_{n - 1}")
        previous = wins
    for r in range(len(system.levels) - 1):
        failures = verify_levels(pair, system.levels[r + 1], system.levels[r])
        if failures:
            problems.append(f"(f1)/(f2) нарушены между Π_{r + 1} и Π_{r}: {len(failures)}")
    try:
        finite_reversibility_sanity(pair.left)
    except ReversibilityBugError as e:
        problems.append(str(e))

    if verdicts["rounds"] and (positive or negative):
        bad = positive_below(pair.left, pair.right, positive)
        if bad is not None:
            problems.append("позитивное предложение не сохранилось 𝕏 → 𝕐")
        bad = negative_below(pair.right, pair.left, negative)
        if bad is not None:
            problems.append("негативное предложение не сохранилось 𝕐 → 𝕏")

    return PairOutcome(index, verdicts, problems, system.stabilization_index)


def run_crossval(sig: Signature, max_n: int, seed: int, pair_count: int,
                 cache: Optional[VerdictCache] = None, sentences: int = 0) -> CrossvalResult:
    """
    Перекрёстная проверка: полный перебор для n ≤ CROSSVAL_EXHAUSTIVE_MAX_N
    и pair_count случайных пар для больших n (до max_n).

    Args:
        sig: Сигнатура
        max_n: Максимальный размер универсума
        seed: Seed запуска
        pair_count: Число случайных пар
        cache: Кеш вердиктов (необязательно)
        sentences: Число позитивных и негативных предложений для проверки сохранения

    Returns:
        CrossvalResult; результаты упорядочены по номеру пары
    """
    start = time.time()
    positive: List[Formula] = []
    negative: List[Formula] = []
    if sentences:
        rank = config.CROSSVAL_SENTENCE_RANK
        positive = sample_formulas(sig, FragmentTag.POSITIVE, rank, rank, sentences,
                                   config.derive_seed(seed, "positive"), sentences=True)
        negative = sample_formulas(sig, FragmentTag.NEGATIVE, rank, rank, sentences,
                                   config.derive_seed(seed, "negative"), sentences=True)
    result = CrossvalResult()
    for item in build_corpus(sig, max_n, seed, pair_count):
        pair = StructurePair(item.left, item.right)
        outcome = check_pair(pair, item.index, cache, positive, negative)
        result.pairs += 1
        result.tiers[item.tier] = result.tiers.get(item.tier, 0) + 1
        result.positive += int(outcome.verdicts["cond"])
        result.max_stabilization = max(result.max_stabilization, outcome.stabilization_index or 0)
        if outcome.verdicts["rounds"]:
            result.sentence_checks += len(positive) + len(negative)
        if not outcome.agree:
            logger.warning("Расхождение на паре #%d: %s %s", item.index, outcome.verdicts, outcome.problems)
            result.disagreements.append({
                "index": item.index,
                "left": serialize_structure(item.left),
                "right": serialize_structure(item.right),
                "verdicts": dict(outcome.verdicts, problems=outcome.problems),
            })
        if result.pairs % 500 == 0:
            logger.info("Проверено пар: %d", result.pairs)
    if cache is not None:
        cache.save()
    result.seconds = time.time() - start
    return result
