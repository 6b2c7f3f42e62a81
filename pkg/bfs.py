"""
Системы «туда-обратно» из частичных конденсаций (b.f.s.).

Проверка условий (e1)/(e2), наибольшая неподвижная точка, явное построение
конденсации чередованием шагов и свидетельство необратимости по «плохой»
частичной конденсации.
"""

import itertools
import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

from condensation import (
    CondensationError,
    CondensationWitness,
    PairSet,
    ViolationReport,
    canonical_pairs,
    check_partial,
)
from games import enumerate_partial_condensations
from structure import FiniteStructure, LazyStructure, StructurePair, current_prefix, explore

logger = logging.getLogger(__name__)


class BfsError(ValueError):
    """Базовая ошибка модуля b.f.s."""


class InvalidMemberError(BfsError):
    """Член системы не является частичной конденсацией."""


class PreconditionError(BfsError):
    """Нарушено предусловие операции."""


class ExtensionFailure(RuntimeError):
    """Система не дала нужного расширения: значит, она не b.f.s."""


ExtendResult = Optional[Tuple[PairSet, str]]


@dataclass(frozen=True)
class BfsSystem:
    """Конечная система частичных конденсаций."""

    members: FrozenSet[PairSet]
    closed: bool = False

    def __contains__(self, f: Iterable[Sequence[int]]) -> bool:
        return canonical_pairs(f) in self.members

    def __len__(self) -> int:
        return len(self.members)

    def contains(self, f: Iterable[Sequence[int]]) -> bool:
        return f in self

    def _extend(self, f: PairSet, element: int, side: int, clause: str) -> ExtendResult:
        covered = {p[side] for p in f}
        if element in covered:
            return (f, clause) if f in self.members else None
        # сначала одношаговые расширения, затем любые надмножества
        one_step = sorted(
            g for g in self.members
            if len(g) == len(f) + 1 and set(f) <= set(g) and any(p[side] == element for p in g)
        )
        if one_step:
            return one_step[0], clause
        wider = sorted(
            (g for g in self.members if set(f) <= set(g) and any(p[side] == element for p in g)),
            key=lambda g: (len(g), g),
        )
        return (wider[0], clause) if wider else None

    def extend_left(self, f: PairSet, x: int) -> ExtendResult:
        """(e1): наименьшее расширение f внутри системы, покрывающее x ∈ X."""
        return self._extend(f, x, 0, "e1")

    def extend_right(self, f: PairSet, y: int) -> ExtendResult:
        """(e2): наименьшее расширение f внутри системы, покрывающее y ∈ Y."""
        return self._extend(f, y, 1, "e2")


@dataclass
class LazyBfsSystem:
    """
    Система на ленивых структурах: предикат принадлежности и процедуры расширения.

    extend_left/extend_right возвращают (новое множество пар, метка шага)
    и могут сами расширять префиксы структур.
    """

    contains: Callable[[PairSet], bool]
    extend_left: Callable[[PairSet, int], ExtendResult]
    extend_right: Callable[[PairSet, int], ExtendResult]
    name: str = "lazy"


System = Union[BfsSystem, LazyBfsSystem]


@dataclass(frozen=True)
class Counterexample:
    """Член системы, элемент и нарушенное условие (e1 / e2 / nonempty)."""

    member: PairSet
    element: Optional[int]
    clause: str

    @property
    def message(self) -> str:
        if self.clause == "nonempty":
            return "система пуста"
        side = "𝕏" if self.clause == "e1" else "𝕐"
        return f"({self.clause}) нарушено: {list(map(list, self.member))} не расширяется на элемент {self.element} из {side}"


class _SupersetIndex:
    """Индекс членов по парам для быстрого поиска надмножеств."""

    def __init__(self, members: Iterable[PairSet]):
        self.members = list(members)
        self.all_ids = set(range(len(self.members)))
        self.by_pair: Dict[Tuple[int, int], Set[int]] = {}
        self.by_left: Dict[int, Set[int]] = {}
        self.by_right: Dict[int, Set[int]] = {}
        for i, g in enumerate(self.members):
            for x, y in g:
                self.by_pair.setdefault((x, y), set()).add(i)
                self.by_left.setdefault(x, set()).add(i)
                self.by_right.setdefault(y, set()).add(i)

    def supersets(self, f: PairSet) -> Set[int]:
        result = self.all_ids
        for p in f:
            result = result & self.by_pair.get(p, set())
            if not result:
                break
        return result


def _first_gap(pair: StructurePair, f: PairSet, members: Set[PairSet], index: _SupersetIndex) -> Optional[Tuple[str, int]]:
    mapping = dict(f)
    inverse = {y: x for x, y in f}
    above = None
    for x in range(pair.left.n):
        if x in mapping:
            continue
        if any(canonical_pairs(f + ((x, y),)) in members for y in range(pair.right.n) if y not in inverse):
            continue
        above = index.supersets(f) if above is None else above
        if not above & index.by_left.get(x, set()):
            return ("e1", x)
    for y in range(pair.right.n):
        if y in inverse:
            continue
        if any(canonical_pairs(f + ((x, y),)) in members for x in range(pair.left.n) if x not in mapping):
            continue
        above = index.supersets(f) if above is None else above
        if not above & index.by_right.get(y, set()):
            return ("e2", y)
    return None


def verify_bfs(pair: StructurePair, members: Iterable[Iterable[Sequence[int]]]) -> Optional[Counterexample]:
    """
    Проверить (e1)/(e2) для конечной пары перебором.

    Returns:
        None, если система — b.f.s., иначе первый контрпример

    Raises:
        InvalidMemberError: член системы не проходит check_partial
    """
    system = {canonical_pairs(f) for f in members}
    if not system:
        return Counterexample((), None, "nonempty")
    for f in sorted(system):
        try:
            verdict = check_partial(pair, f)
        except CondensationError as e:
            raise InvalidMemberError(str(e)) from e
        if isinstance(verdict, ViolationReport):
            raise InvalidMemberError(f"{list(map(list, f))} не является частичной конденсацией: {verdict.message}")
    index = _SupersetIndex(system)
    for f in sorted(system, key=lambda g: (len(g), g)):
        gap = _first_gap(pair, f, system, index)
        if gap is not None:
            return Counterexample(f, gap[1], gap[0])
    return None


def maximal_bfs(pair: StructurePair) -> Optional[BfsSystem]:
    """
    Наибольшая b.f.s.: из всех частичных конденсаций удаляются члены,
    нарушающие (e1) или (e2) относительно оставшихся, до стабилизации.

    Returns:
        BfsSystem или None, если наибольшая система пуста
    """
    members = set(enumerate_partial_condensations(pair))
    rounds = 0
    while members:
        index = _SupersetIndex(members)
        doomed = {f for f in members if _first_gap(pair, f, members, index) is not None}
        if not doomed:
            break
        members -= doomed
        rounds += 1
    logger.debug("Наибольшая b.f.s.: %d членов после %d итераций", len(members), rounds)
    if not members:
        return None
    return BfsSystem(frozenset(members), closed=is_restriction_closed(members))


def restriction_closure(members: Iterable[Iterable[Sequence[int]]]) -> FrozenSet[PairSet]:
    """Замыкание системы относительно ограничений (снова b.f.s., если исходная была ею)."""
    result: Set[PairSet] = set()
    for f in members:
        f = canonical_pairs(f)
        for k in range(len(f) + 1):
            result.update(itertools.combinations(f, k))
    return frozenset(result)


def is_restriction_closed(members: Iterable[PairSet]) -> bool:
    members = set(members)
    return all(f[:i] + f[i + 1:] in members for f in members for i in range(len(f)))


# ============================================
# Построение конденсации
# ============================================

@dataclass(frozen=True)
class ExtensionStep:
    """Шаг построения: условие, покрываемый элемент, добавленные пары и метка случая."""

    index: int
    clause: str
    element: int
    added: PairSet
    pairs: PairSet
    label: str

    def to_dict(self) -> Dict:
        return {
            "index": self.index,
            "clause": self.clause,
            "element": self.element,
            "added": [list(p) for p in self.added],
            "label": self.label,
        }


@dataclass
class ExtensionRun:
    """Результат построения: шаги, итоговое множество пар и (для конечных пар) свидетель."""

    seed: PairSet
    steps: List[ExtensionStep] = field(default_factory=list)
    witness: Optional[CondensationWitness] = None

    @property
    def pairs(self) -> PairSet:
        return self.steps[-1].pairs if self.steps else self.seed

    def histogram(self) -> Dict[str, int]:
        return dict(sorted(Counter(step.label for step in self.steps).items()))


def _least_missing(covered: Set[int], bound: Optional[int]) -> Optional[int]:
    e = 0
    while e in covered:
        e += 1
    if bound is not None and e >= bound:
        return None
    return e


def _is_lazy(pair: StructurePair) -> bool:
    return isinstance(pair.left, LazyStructure) or isinstance(pair.right, LazyStructure)


def _cover(s, element: int):
    if isinstance(s, LazyStructure) and element >= s.size:
        explore(s, element + 1)


def extend_to_condensation(pair: StructurePair, system: System, seed_member: Iterable[Sequence[int]],
                           budget: Optional[int] = None) -> ExtensionRun:
    """
    Чередовать (e1) для наименьшего непокрытого элемента 𝕏 и (e2) для
    наименьшего непокрытого элемента 𝕐.

    Args:
        pair: Конечная пара или пара ленивых структур
        system: b.f.s. (конечная или ленивая)
        seed_member: Начальный член системы
        budget: Число шагов (обязательно для ленивых пар)

    Returns:
        ExtensionRun; для конечной пары без бюджета — с тотальным свидетелем

    Raises:
        PreconditionError: seed_member не в системе или не задан бюджет для ленивой пары
        ExtensionFailure: система не дала расширения или шаг не прошёл check_partial
    """
    lazy = _is_lazy(pair)
    if lazy and budget is None:
        raise PreconditionError("Для ленивых структур нужен бюджет шагов")
    f = canonical_pairs(seed_member)
    if not system.contains(f):
        raise PreconditionError(f"Начальный член {list(map(list, f))} не принадлежит системе")
    run = ExtensionRun(f)
    turn = "e1"
    while budget is None or len(run.steps) < budget:
        mapping = dict(f)
        inverse = {y: x for x, y in f}
        x = _least_missing(set(mapping), None if lazy else pair.left.n)
        y = _least_missing(set(inverse), None if lazy else pair.right.n)
        if x is None and y is None:
            break
        if (turn == "e1" and x is not None) or y is None:
            clause, element = "e1", x
            _cover(pair.left, x)
            result = system.extend_left(f, x)
        else:
            clause, element = "e2", y
            _cover(pair.right, y)
            result = system.extend_right(f, y)
        if result is None:
            raise ExtensionFailure(f"({clause}) не выполнено для {list(map(list, f))} и элемента {element}")
        g, label = result
        g = canonical_pairs(g)
        covered = dict(g) if clause == "e1" else {b: a for a, b in g}
        if not set(f) <= set(g) or element not in covered:
            raise ExtensionFailure(f"Расширение {list(map(list, g))} не содержит {list(map(list, f))} или не покрывает {element}")
        for a, b in g:
            _cover(pair.left, a)
            _cover(pair.right, b)
        try:
            verdict = check_partial(StructurePair(current_prefix(pair.left), current_prefix(pair.right)), g)
        except CondensationError as e:
            raise ExtensionFailure(str(e)) from e
        if isinstance(verdict, ViolationReport):
            raise ExtensionFailure(f"Шаг {len(run.steps)} нарушает PC: {verdict.message}")
        added = tuple(p for p in g if p not in set(f))
        run.steps.append(ExtensionStep(len(run.steps), clause, element, added, g, label))
        f = g
        turn = "e2" if clause == "e1" else "e1"
    if not lazy and len(f) == pair.left.n == pair.right.n:
        mapping = dict(f)
        run.witness = CondensationWitness(tuple(mapping[x] for x in range(pair.left.n)))
    logger.debug("Построение: %d шагов, %d пар", len(run.steps), len(f))
    return run


# ============================================
# Плохие конденсации и необратимость
# ============================================

@dataclass(frozen=True)
class BadCondensation:
    """Частичная самоконденсация с сертификатом: кортеж ∉ R, его образ ∈ R."""

    pairs: PairSet
    relation: str
    tuple: Tuple[int, ...]
    image: Tuple[int, ...]

    def to_dict(self) -> Dict:
        return {
            "pairs": [list(p) for p in self.pairs],
            "relation": self.relation,
            "tuple": list(self.tuple),
            "image": list(self.image),
        }


def find_bad_certificate(s: FiniteStructure, pairs: Iterable[Sequence[int]]) -> Optional[BadCondensation]:
    """Найти кортеж над dom f, не лежащий в отношении, образ которого в нём лежит."""
    f = canonical_pairs(pairs)
    mapping = dict(f)
    domain = sorted(mapping)
    for name, arity in s.sig.relations:
        rel = s.relation(name)
        for t in itertools.product(domain, repeat=arity):
            image = tuple(mapping[e] for e in t)
            if t not in rel and image in rel:
                return BadCondensation(f, name, t, image)
    return None


def certificate_holds(s: FiniteStructure, bad: BadCondensation, pairs: Iterable[Sequence[int]]) -> bool:
    """Сертификат сохраняется для f ⊇ bad: кортеж по-прежнему ∉ R, а образ ∈ R."""
    mapping = dict(canonical_pairs(pairs))
    if any(mapping.get(e) != img for e, img in zip(bad.tuple, bad.image)):
        return False
    rel = s.relation(bad.relation)
    return bad.tuple not in rel and bad.image in rel


@dataclass
class ReversibilityEvidence:
    """Свидетельство необратимости: растущее отображение и неизменный сертификат."""

    bad: BadCondensation
    run: ExtensionRun
    checked_steps: int

    def histogram(self) -> Dict[str, int]:
        return self.run.histogram()

    def to_dict(self) -> Dict:
        return {
            "bad": self.bad.to_dict(),
            "prefix": [list(p) for p in self.run.pairs],
            "steps": [step.to_dict() for step in self.run.steps],
            "histogram": self.histogram(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2)


def reversibility_witness(s, system: System, bad: BadCondensation, budget: int) -> ReversibilityEvidence:
    """
    Продолжить плохую частичную самоконденсацию budget шагами (e1)/(e2).

    Ни одно продолжение не является ограничением автоморфизма: сертификат
    остаётся внутри области определения.

    Raises:
        PreconditionError: структура конечна (конечные структуры обратимы) или bad ∉ системы
        ExtensionFailure: шаг построения не удался
    """
    if isinstance(s, FiniteStructure):
        raise PreconditionError("Конечные структуры обратимы: свидетельство необратимости невозможно")
    if not system.contains(bad.pairs):
        raise PreconditionError("Плохая конденсация не принадлежит системе")
    run = extend_to_condensation(StructurePair(s, s), system, bad.pairs, budget)
    prefix = current_prefix(s)
    for step in run.steps:
        if not set(bad.pairs) <= set(step.pairs) or not certificate_holds(prefix, bad, step.pairs):
            raise ExtensionFailure(f"Шаг {step.index} потерял сертификат плохой конденсации")
    return ReversibilityEvidence(bad, run, len(run.steps))
