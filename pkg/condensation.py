"""
Модуль частичных конденсаций: проверка условий PC (функциональность, инъективность,
сохранение отношений вперёд), перебор с возвратом для ≼_c и ∼_c на конечных
структурах и проверка обратимости конечных структур.
"""

import itertools
import json
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from structure import FiniteStructure, StructurePair

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]
PairSet = Tuple[Pair, ...]


class CondensationError(ValueError):
    """Некорректный вход (элементы вне универсума и т.п.)."""


class ReversibilityBugError(RuntimeError):
    """Нарушена обратимость конечной структуры — это ошибка реализации."""


def canonical_pairs(pairs: Iterable[Sequence[int]]) -> PairSet:
    """Каноническая форма множества пар: без повторов, отсортировано."""
    return tuple(sorted({(int(x), int(y)) for x, y in pairs}))


@dataclass(frozen=True)
class PartialCondensation:
    """Конечное инъективное частичное отображение, сохраняющее отношения вперёд."""

    pairs: PairSet = ()

    def __post_init__(self):
        object.__setattr__(self, "pairs", canonical_pairs(self.pairs))

    @property
    def domain(self) -> FrozenSet[int]:
        return frozenset(x for x, _ in self.pairs)

    @property
    def range(self) -> FrozenSet[int]:
        return frozenset(y for _, y in self.pairs)

    def as_dict(self) -> Dict[int, int]:
        return dict(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, pair: Pair) -> bool:
        return tuple(pair) in self.pairs

    def issubset(self, other: "PartialCondensation") -> bool:
        return set(self.pairs) <= set(other.pairs)

    def to_json(self) -> str:
        """Пары как JSON-массив [[x,y], ...]."""
        return json.dumps([list(p) for p in self.pairs], separators=(",", ":"))


@dataclass(frozen=True)
class ViolationReport:
    """
    Нарушение условия PC, названное через вид 𝒫₀-формулы:
    equality (v0=v1 не сохранилось: не функция), inequality (v0≠v1: не инъекция)
    или relation (кортеж отношения ушёл в некортеж).
    """

    kind: str
    message: str
    relation: Optional[str] = None
    tuple: Optional[Tuple[int, ...]] = None
    image: Optional[Tuple[int, ...]] = None
    pairs: Tuple[Pair, ...] = ()


@dataclass(frozen=True)
class CondensationWitness:
    """Тотальная биекция-конденсация: mapping[x] — образ x."""

    mapping: Tuple[int, ...]
    direction: str = "X->Y"

    @property
    def pairs(self) -> PairSet:
        return tuple(enumerate(self.mapping))

    def to_json(self) -> str:
        return json.dumps([list(p) for p in self.pairs], separators=(",", ":"))


@dataclass(frozen=True)
class NotCondensable:
    """Отрицательный вердикт: reason = 'cardinality' или 'exhaustion'."""

    reason: str
    detail: str
    direction: str = "X->Y"
    nodes_explored: int = 0


CondensabilityVerdict = Union[CondensationWitness, NotCondensable]


@dataclass(frozen=True)
class BicondensabilityResult:
    """Результат ∼_c: при отрицательном ответе — направление, которое не выполняется."""

    bicondensable: bool
    forward: CondensabilityVerdict
    backward: CondensabilityVerdict
    failing_direction: Optional[str] = None


@dataclass(frozen=True)
class ReversibilityProof:
    """Cond(𝕏) = Aut(𝕏), установлено перебором."""

    tag: str
    condensations: Tuple[Tuple[int, ...], ...]
    automorphisms: Tuple[Tuple[int, ...], ...]


# ============================================
# Индекс кортежей
# ============================================

class TupleIndex:
    """Для каждого элемента — кортежи отношений, в которые он входит."""

    def __init__(self, s: FiniteStructure):
        self.structure = s
        self.by_element: List[List[Tuple[str, Tuple[int, ...]]]] = [[] for _ in range(s.n)]
        for name, tuples in s.items():
            for t in sorted(tuples):
                for e in set(t):
                    self.by_element[e].append((name, t))


@lru_cache(maxsize=4096)
def tuple_index(s: FiniteStructure) -> TupleIndex:
    return TupleIndex(s)


def extension_ok(left: FiniteStructure, right: FiniteStructure, mapping: Dict[int, int],
                 inverse: Dict[int, int], x: int, y: int) -> bool:
    """
    Можно ли добавить пару (x, y) к частичной конденсации mapping.

    mapping и inverse должны описывать корректную частичную конденсацию.
    """
    if x in mapping:
        return mapping[x] == y
    if y in inverse:
        return False
    for name, t in tuple_index(left).by_element[x]:
        if all(e == x or e in mapping for e in t):
            image = tuple(y if e == x else mapping[e] for e in t)
            if image not in right.relation(name):
                return False
    return True


def _check_range(pair: StructurePair, pairs: Iterable[Pair]):
    for x, y in pairs:
        if not 0 <= x < pair.left.n:
            raise CondensationError(f"Элемент {x} вне универсума левой структуры 0..{pair.left.n - 1}")
        if not 0 <= y < pair.right.n:
            raise CondensationError(f"Элемент {y} вне универсума правой структуры 0..{pair.right.n - 1}")


def check_partial(pair: StructurePair, pairs: Iterable[Sequence[int]]) -> Union[PartialCondensation, ViolationReport]:
    """
    Проверить, что множество пар — частичная конденсация.

    Args:
        pair: Пара конечных структур (𝕏, 𝕐)
        pairs: Множество пар (x, y)

    Returns:
        PartialCondensation или ViolationReport с названием нарушенной 𝒫₀-формулы

    Raises:
        CondensationError: элемент вне универсума
    """
    canon = canonical_pairs(pairs)
    _check_range(pair, canon)
    images: Dict[int, int] = {}
    preimages: Dict[int, int] = {}
    for x, y in canon:
        if x in images and images[x] != y:
            return ViolationReport(
                "equality", f"v0=v1 не сохраняется: {x} отображается и в {images[x]}, и в {y}",
                pairs=((x, images[x]), (x, y)),
            )
        if y in preimages and preimages[y] != x:
            return ViolationReport(
                "inequality", f"v0≠v1 не сохраняется: {preimages[y]} и {x} отображаются в {y}",
                pairs=((preimages[y], y), (x, y)),
            )
        images[x] = y
        preimages[y] = x
    left, right = pair.left, pair.right
    for name in left.sig.names:
        target = right.relation(name)
        source = left.relation(name)
        if all(tuple(images[e] for e in t) in target for t in source if all(e in images for e in t)):
            continue
        for t in sorted(source):
            if all(e in images for e in t):
                image = tuple(images[e] for e in t)
                if image not in target:
                    return ViolationReport(
                        "relation",
                        f"{name}{tuple(t)} выполнено в 𝕏, но {name}{image} не выполнено в 𝕐",
                        relation=name, tuple=t, image=image,
                    )
    return PartialCondensation(canon)


def is_partial(pair: StructurePair, pairs: Iterable[Sequence[int]]) -> bool:
    return isinstance(check_partial(pair, pairs), PartialCondensation)


def restrictions(f: PartialCondensation) -> Iterator[PartialCondensation]:
    """Все ограничения f (включая ∅ и само f)."""
    for k in range(len(f.pairs) + 1):
        for subset in itertools.combinations(f.pairs, k):
            yield PartialCondensation(subset)


def compose(f: Sequence[int], g: Sequence[int]) -> Tuple[int, ...]:
    """Композиция тотальных отображений g∘f (сначала f)."""
    return tuple(g[f[x]] for x in range(len(f)))


# ============================================
# Поиск конденсаций
# ============================================

class CondensationSearch:
    """
    Поиск с возвратом по биекциям с прямой проверкой.

    Следующим расширяется левый элемент с наименьшим числом совместимых кандидатов.
    """

    def __init__(self, pair: StructurePair):
        self.left = pair.left
        self.right = pair.right
        self.nodes = 0

    def _candidates(self, mapping: Dict[int, int], inverse: Dict[int, int], x: int) -> List[int]:
        return [y for y in range(self.right.n)
                if y not in inverse and extension_ok(self.left, self.right, mapping, inverse, x, y)]

    def search(self) -> Optional[Tuple[int, ...]]:
        mapping: Dict[int, int] = {}
        inverse: Dict[int, int] = {}
        return self._search(mapping, inverse)

    def _search(self, mapping: Dict[int, int], inverse: Dict[int, int]) -> Optional[Tuple[int, ...]]:
        self.nodes += 1
        if len(mapping) == self.left.n:
            return tuple(mapping[x] for x in range(self.left.n))
        best_x, best_cands = None, None
        for x in range(self.left.n):
            if x in mapping:
                continue
            cands = self._candidates(mapping, inverse, x)
            if not cands:
                return None
            if best_cands is None or len(cands) < len(best_cands):
                best_x, best_cands = x, cands
        for y in best_cands:
            mapping[best_x] = y
            inverse[y] = best_x
            found = self._search(mapping, inverse)
            if found is not None:
                return found
            del mapping[best_x]
            del inverse[y]
        return None


def decide_condensable(pair: StructurePair, direction: str = "X->Y") -> CondensabilityVerdict:
    """
    Решить 𝕏 ≼_c 𝕐 для конечных структур.

    Returns:
        CondensationWitness или NotCondensable (мощности различны либо перебор исчерпан)
    """
    left, right = pair.left, pair.right
    if left.n != right.n:
        return NotCondensable("cardinality", f"|X|={left.n} ≠ |Y|={right.n}", direction)
    search = CondensationSearch(pair)
    found = search.search()
    if found is None:
        logger.debug("Перебор исчерпан за %d узлов", search.nodes)
        return NotCondensable("exhaustion", f"перебор исчерпан ({search.nodes} узлов)", direction, search.nodes)
    return CondensationWitness(found, direction)


def is_condensation(pair: StructurePair, mapping: Sequence[int]) -> bool:
    """Является ли тотальное отображение биективной конденсацией."""
    if len(mapping) != pair.left.n or sorted(mapping) != list(range(pair.right.n)):
        return False
    return is_partial(pair, enumerate(mapping))


def enumerate_condensations(pair: StructurePair) -> Iterator[Tuple[int, ...]]:
    """Все конденсации перебором всех n! биекций."""
    if pair.left.n != pair.right.n:
        return
    for perm in itertools.permutations(range(pair.right.n)):
        if is_partial(pair, enumerate(perm)):
            yield perm


def decide_bicondensable(pair: StructurePair) -> BicondensabilityResult:
    """Решить 𝕏 ∼_c 𝕐: конденсируемость в обе стороны."""
    forward = decide_condensable(pair, "X->Y")
    backward = decide_condensable(pair.reversed(), "Y->X")
    if isinstance(forward, NotCondensable):
        return BicondensabilityResult(False, forward, backward, "X->Y")
    if isinstance(backward, NotCondensable):
        return BicondensabilityResult(False, forward, backward, "Y->X")
    return BicondensabilityResult(True, forward, backward)


def is_automorphism(s: FiniteStructure, perm: Sequence[int]) -> bool:
    return s.permute(perm) == s


def finite_reversibility_sanity(s: FiniteStructure) -> ReversibilityProof:
    """
    Перебрать Cond(𝕏, 𝕏) и убедиться, что каждая самоконденсация — автоморфизм.

    Raises:
        ReversibilityBugError: найдена самоконденсация, не являющаяся автоморфизмом
    """
    pair = StructurePair(s, s)
    conds = []
    autos = []
    for perm in enumerate_condensations(pair):
        conds.append(perm)
        if not is_automorphism(s, perm):
            raise ReversibilityBugError(f"Самоконденсация {list(perm)} структуры {s!r} не является автоморфизмом")
        autos.append(perm)
    return ReversibilityProof("reversible", tuple(conds), tuple(autos))


def witness_from_json(text: str) -> PartialCondensation:
    """Разобрать свидетеля из JSON-массива пар [[x,y], ...]."""
    data = json.loads(text)
    if not isinstance(data, list) or not all(isinstance(p, list) and len(p) == 2 for p in data):
        raise CondensationError("Свидетель должен быть списком пар [x, y]")
    return PartialCondensation(tuple((p[0], p[1]) for p in data))
