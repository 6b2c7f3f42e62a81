"""
Галерея структур-свидетелей.

- класс 𝒞: счётные эквивалентности с бесконечно многими одноэлементными классами
  и классами неограниченного размера; стратегия Σ и построитель конденсаций;
- пример I: усечения пары 𝒞_fin / 𝒞_ω и разделяющие предложения φ_k, ψ;
- случайный частичный порядок: ленивый оракул с запросами (u1)/(u2) и
  четырёхслучайная процедура «туда-обратно» от плохой пары f_0.
"""

import itertools
import json
import logging
import random
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple, Union

import networkx as nx

from bfs import (
    BadCondensation,
    ExtensionRun,
    ExtensionStep,
    LazyBfsSystem,
    ReversibilityEvidence,
    extend_to_condensation,
    reversibility_witness,
)
from condensation import PairSet, ViolationReport, canonical_pairs, check_partial
from games import LEFT, Move, Strategy
from logic import Eq, Exists, Forall, Formula, Neq, Not, Or, Rel, conj, model_check
from structure import (
    LINEAR_ORDER_SIG,
    FiniteStructure,
    LazyStructure,
    Signature,
    StructurePair,
    explore,
)

logger = logging.getLogger(__name__)

OMEGA = "omega"
EQUIVALENCE_SIG = Signature.of(("R", 2))
POSET_SIG = LINEAR_ORDER_SIG

# предел просмотра ленивых раскладок при поиске n-го элемента
SCAN_LIMIT = 200000


class MenagerieError(ValueError):
    """Базовая ошибка галереи."""


class InconsistentSpecError(MenagerieError):
    """Противоречивая или неподходящая спецификация семейства."""


class StrategyPreconditionError(MenagerieError):
    """Префиксы слишком малы для стратегии Σ на n раундов."""


class CondensationObstruction(MenagerieError):
    """Конденсации нет: бесконечный класс 𝕏 не помещается ни в один конечный класс 𝕐."""


class PosetRequestRejected(MenagerieError):
    """Запрос к оракулу порядка несовместим с текущим префиксом."""


# ============================================
# Класс 𝒞
# ============================================

@dataclass(frozen=True)
class ClassCSpec:
    """
    Спецификация эквивалентности: число одноэлементных классов (или OMEGA),
    размеры конечных классов (≥ 2), число бесконечных классов и флаг
    неограниченного продолжения размеров (max+1, max+2, ...).
    """

    singletons: Union[int, str] = OMEGA
    finite_class_sizes: Tuple[int, ...] = ()
    infinite_classes: int = 0
    unbounded_sizes: bool = False

    def __post_init__(self):
        object.__setattr__(self, "finite_class_sizes", tuple(self.finite_class_sizes))
        if self.singletons != OMEGA and not (isinstance(self.singletons, int) and self.singletons >= 0):
            raise InconsistentSpecError(f"singletons должно быть натуральным числом или {OMEGA!r}")
        bad = [s for s in self.finite_class_sizes if not isinstance(s, int) or s < 2]
        if bad:
            raise InconsistentSpecError(f"Размеры конечных классов должны быть ≥ 2, получено {bad}")
        if self.infinite_classes < 0:
            raise InconsistentSpecError("Число бесконечных классов не может быть отрицательным")

    @property
    def is_finite(self) -> bool:
        return self.singletons != OMEGA and self.infinite_classes == 0 and not self.unbounded_sizes

    @property
    def size(self) -> Optional[int]:
        """Размер универсума для конечной спецификации, иначе None."""
        if not self.is_finite:
            return None
        return self.singletons + sum(self.finite_class_sizes)

    def class_sizes(self) -> Iterator[int]:
        """Размеры конечных классов по порядку (возможно, бесконечная последовательность)."""
        yield from self.finite_class_sizes
        if self.unbounded_sizes:
            yield from itertools.count(max(self.finite_class_sizes, default=1) + 1)

    def to_dict(self) -> Dict:
        return {
            "singletons": self.singletons,
            "finite_class_sizes": list(self.finite_class_sizes),
            "infinite_classes": self.infinite_classes,
            "unbounded_sizes": self.unbounded_sizes,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "ClassCSpec":
        try:
            return cls(
                data.get("singletons", OMEGA),
                tuple(data.get("finite_class_sizes", ())),
                int(data.get("infinite_classes", 0)),
                bool(data.get("unbounded_sizes", False)),
            )
        except (TypeError, AttributeError) as e:
            raise InconsistentSpecError(f"Некорректная спецификация: {e}") from e

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


ClassKey = Tuple[str, int]


def iter_class_keys(spec: ClassCSpec) -> Iterator[ClassKey]:
    """
    Раскладка элементов по классам: по кругу одиночка, по элементу каждого
    бесконечного класса, очередной элемент конечных классов (классы заполняются
    по одному). Исчерпанные потоки пропускаются.
    """

    def singles():
        k = 0
        while spec.singletons == OMEGA or k < spec.singletons:
            yield ("single", k)
            k += 1

    def infinite(i: int):
        while True:
            yield ("inf", i)

    def finite():
        for j, size in enumerate(spec.class_sizes()):
            for _ in range(size):
                yield ("fin", j)

    streams = [singles()] + [infinite(i) for i in range(spec.infinite_classes)] + [finite()]
    while streams:
        for stream in list(streams):
            try:
                yield next(stream)
            except StopIteration:
                streams.remove(stream)


class ClassCLayout:
    """Ленивая раскладка: класс и позиция внутри класса для каждого элемента."""

    def __init__(self, spec: ClassCSpec):
        self.spec = spec
        self._source = iter_class_keys(spec)
        self.keys: List[ClassKey] = []
        self.positions: List[int] = []
        self.members: Dict[ClassKey, List[int]] = {}

    def grow(self, upto: int) -> bool:
        """Разложить первые upto элементов; False, если спецификация конечна и меньше."""
        while len(self.keys) < upto:
            try:
                key = next(self._source)
            except StopIteration:
                return False
            bucket = self.members.setdefault(key, [])
            self.positions.append(len(bucket))
            bucket.append(len(self.keys))
            self.keys.append(key)
        return True

    def key(self, e: int) -> ClassKey:
        if not self.grow(e + 1):
            raise MenagerieError(f"Элемент {e} вне конечной структуры")
        return self.keys[e]

    def position(self, e: int) -> int:
        self.key(e)
        return self.positions[e]

    def element(self, key: ClassKey, p: int) -> int:
        """p-й элемент класса key."""
        while len(self.members.get(key, ())) <= p:
            if len(self.keys) > SCAN_LIMIT or not self.grow(len(self.keys) + 1):
                raise MenagerieError(f"В классе {key} нет элемента с позицией {p}")
        return self.members[key][p]

    def nth(self, predicate: Callable[[int], bool], k: int) -> int:
        """k-й (с нуля) элемент, удовлетворяющий predicate."""
        count = 0
        for e in itertools.count():
            if e > SCAN_LIMIT:
                break
            self.key(e)
            if predicate(e):
                if count == k:
                    return e
                count += 1
        raise MenagerieError(f"Не найден {k}-й элемент за {SCAN_LIMIT} шагов")

    def rank(self, e: int, predicate: Callable[[int], bool]) -> int:
        """Число элементов < e, удовлетворяющих predicate."""
        return sum(1 for d in range(e) if predicate(d))

    def is_single(self, e: int) -> bool:
        return self.key(e)[0] == "single"


def _equivalence_from_layout(layout: ClassCLayout, n: int) -> FiniteStructure:
    rel = []
    for key in layout.members:
        block = [e for e in layout.members[key] if e < n]
        rel.extend(itertools.product(block, repeat=2))
    return FiniteStructure.build(EQUIVALENCE_SIG, n, {"R": rel})


def equivalence_problems(s: FiniteStructure) -> List[str]:
    """Является ли R эквивалентностью: классы — компоненты связности, R — их полные квадраты."""
    rel = s.relation("R")
    graph = nx.Graph()
    graph.add_nodes_from(range(s.n))
    graph.add_edges_from(rel)
    problems = []
    missing_loops = [e for e in range(s.n) if (e, e) not in rel]
    if missing_loops:
        problems.append(f"нет рефлексивности для {missing_loops[:5]}")
    expected = sum(len(c) ** 2 for c in nx.connected_components(graph))
    if expected != len(rel):
        problems.append("R не является объединением полных квадратов классов")
    return problems


def equivalence_classes(s: FiniteStructure) -> List[List[int]]:
    """Классы эквивалентности, упорядоченные по наименьшему элементу."""
    problems = equivalence_problems(s)
    if problems:
        raise MenagerieError(f"Структура не является эквивалентностью: {'; '.join(problems)}")
    graph = nx.Graph()
    graph.add_nodes_from(range(s.n))
    graph.add_edges_from(s.relation("R"))
    return sorted((sorted(c) for c in nx.connected_components(graph)), key=lambda c: c[0])


def build_class_c(spec: ClassCSpec, level: Optional[int] = None) -> Union[FiniteStructure, LazyStructure]:
    """
    Построить эквивалентность по спецификации.

    Args:
        spec: Спецификация семейства
        level: Число элементов префикса; None — вся конечная структура
            или ленивая структура для бесконечной спецификации

    Returns:
        FiniteStructure (префикс) или LazyStructure
    """
    if level is not None:
        if level < 0:
            raise InconsistentSpecError(f"level должно быть ≥ 0, получено {level}")
        layout = ClassCLayout(spec)
        layout.grow(level)
        return _equivalence_from_layout(layout, min(level, len(layout.keys)))
    if spec.is_finite:
        return build_class_c(spec, spec.size)

    layout = ClassCLayout(spec)

    def extender(prefix: FiniteStructure, request: Optional[object]) -> FiniteStructure:
        n = prefix.n
        key = layout.key(n)
        block = [e for e in layout.members[key] if e <= n]
        new = [(n, e) for e in block] + [(e, n) for e in block if e != n]
        return FiniteStructure.build(EQUIVALENCE_SIG, n + 1, {"R": set(prefix.relation("R")) | set(new)})

    return LazyStructure(EQUIVALENCE_SIG, extender, "classC", properties=equivalence_problems)


def check_class_c_truncation(s: FiniteStructure, k: int) -> List[str]:
    """Усечения (𝒞1)/(𝒞2) уровня k: не меньше k одиночек и класс размера ≥ k."""
    classes = equivalence_classes(s)
    problems = []
    singles = sum(1 for c in classes if len(c) == 1)
    if singles < k:
        problems.append(f"(𝒞1): одноэлементных классов {singles} < {k}")
    if k > 0 and max((len(c) for c in classes), default=0) < k:
        problems.append(f"(𝒞2): нет класса размера ≥ {k}")
    return problems


def classify_class_c(spec: ClassCSpec) -> Optional[str]:
    """'fin' (все классы конечны), 'omega' (есть бесконечный класс) или None (не класс 𝒞)."""
    if spec.singletons != OMEGA:
        return None
    if spec.infinite_classes > 0:
        return "omega"
    return "fin" if spec.unbounded_sizes else None


def _require_class_c(spec: ClassCSpec) -> str:
    tag = classify_class_c(spec)
    if tag is None:
        raise InconsistentSpecError(f"Спецификация {spec.to_json()} не задаёт структуру класса 𝒞")
    return tag


def predict_condensable(x_spec: ClassCSpec, y_spec: ClassCSpec) -> bool:
    """𝕏 ≼_c 𝕐 ⟺ 𝕏 ∈ 𝒞_fin или 𝕐 ∈ 𝒞_ω."""
    return _require_class_c(x_spec) == "fin" or _require_class_c(y_spec) == "omega"


def predict_bicondensable(x_spec: ClassCSpec, y_spec: ClassCSpec) -> bool:
    """𝕏 ∼_c 𝕐 ⟺ обе структуры в одной части разбиения {𝒞_fin, 𝒞_ω}."""
    return _require_class_c(x_spec) == _require_class_c(y_spec)


# ============================================
# Стратегия Σ
# ============================================

def claim_strategy_sigma(left: FiniteStructure, right: FiniteStructure, n: int) -> Strategy:
    """
    Явная стратегия II в G_n для префиксов класса 𝒞.

    Повтор элемента — повтор ответа; новый элемент 𝕏 — наименьший свободный
    элемент большого класса Y′; новый элемент 𝕐 — наименьшая свободная одиночка 𝕏.

    Raises:
        StrategyPreconditionError: меньше n одиночек в 𝕏 или нет класса размера ≥ n в 𝕐
    """
    singles = [c[0] for c in equivalence_classes(left) if len(c) == 1]
    if len(singles) < n:
        raise StrategyPreconditionError(f"В 𝕏 {len(singles)} одноэлементных классов, нужно ≥ {n}")
    large = next((c for c in equivalence_classes(right) if len(c) >= n), None)
    if large is None:
        if n > 0:
            raise StrategyPreconditionError(f"В 𝕐 нет класса размера ≥ {n}")
        large = []

    def chooser(pairs: PairSet, rounds_left: int, move: Move) -> Optional[int]:
        mapping = dict(pairs)
        inverse = {y: x for x, y in pairs}
        if move.side == LEFT:
            if move.element in mapping:
                return mapping[move.element]
            return next((y for y in large if y not in inverse), None)
        if move.element in inverse:
            return inverse[move.element]
        return next((x for x in singles if x not in mapping), None)

    return Strategy(chooser, left.n, right.n, "sigma")


# ============================================
# Построитель конденсаций
# ============================================

class _SizeList:
    def __init__(self, spec: ClassCSpec):
        self._source = spec.class_sizes()
        self.values: List[int] = []

    def __getitem__(self, j: int) -> int:
        while len(self.values) <= j:
            try:
                self.values.append(next(self._source))
            except StopIteration:
                raise MenagerieError(f"Конечного класса с номером {j} нет") from None
        return self.values[j]


class InfiniteClassPairing:
    """Неодиночки 𝕏 по порядку → бесконечный класс Y′; одиночки 𝕏 → 𝕐 ∖ Y′."""

    branch = "infinite-class"

    def __init__(self, x_layout: ClassCLayout, y_layout: ClassCLayout):
        self.x = x_layout
        self.y = y_layout
        self.target: ClassKey = ("inf", 0)

    def _outside(self, e: int) -> bool:
        return self.y.key(e) != self.target

    def _x_nonsingle(self, e: int) -> bool:
        return not self.x.is_single(e)

    def forward(self, x: int) -> Tuple[int, str]:
        if self.x.is_single(x):
            return self.y.nth(self._outside, self.x.rank(x, self.x.is_single)), "singleton"
        return self.y.element(self.target, self.x.rank(x, self._x_nonsingle)), "class"

    def backward(self, y: int) -> Tuple[int, str]:
        if self.y.key(y) == self.target:
            return self.x.nth(self._x_nonsingle, self.y.position(y)), "class"
        return self.x.nth(self.x.is_single, self.y.rank(y, self._outside)), "singleton"

    def choices(self) -> List[Tuple[int, int]]:
        return []


class GreedyPairing:
    """
    Все классы конечны: i-й неодноэлементный класс X_i вкладывается в Y_{j_i},
    где j_0 — наименьший с |Y_{j_0}| ≥ |X_0|, а j_i — наименьший с
    |Y_{j_i}| > max(|X_i|, |Y_{j_0}|, ..., |Y_{j_{i-1}}|). Одиночки 𝕏 идут по
    порядку на оставшиеся элементы 𝕐.
    """

    branch = "greedy"

    def __init__(self, x_layout: ClassCLayout, y_layout: ClassCLayout, x_spec: ClassCSpec, y_spec: ClassCSpec):
        self.x = x_layout
        self.y = y_layout
        self.x_sizes = _SizeList(x_spec)
        self.y_sizes = _SizeList(y_spec)
        self.j: List[int] = []
        self._owner: Dict[int, int] = {}
        self._running_max = 0

    def _next_choice(self):
        i = len(self.j)
        need = self.x_sizes[i]
        for j in itertools.count():
            if j > SCAN_LIMIT:
                raise MenagerieError("Не найден подходящий класс 𝕐")
            if j in self._owner:
                continue
            size = self.y_sizes[j]
            if (i == 0 and size >= need) or (i > 0 and size > max(need, self._running_max)):
                self.j.append(j)
                self._owner[j] = i
                self._running_max = max(self._running_max, size)
                return

    def choice(self, i: int) -> int:
        while len(self.j) <= i:
            self._next_choice()
        return self.j[i]

    def owner(self, j: int) -> Optional[int]:
        """Номер i с j_i = j или None, если класс Y_j никогда не выбирается."""
        if not self.j:
            self._next_choice()
        while j not in self._owner and self._running_max < self.y_sizes[j]:
            self._next_choice()
        return self._owner.get(j)

    def _in_image(self, e: int) -> bool:
        kind, j = self.y.key(e)
        if kind != "fin":
            return False
        i = self.owner(j)
        return i is not None and self.y.position(e) < self.x_sizes[i]

    def _outside(self, e: int) -> bool:
        return not self._in_image(e)

    def forward(self, x: int) -> Tuple[int, str]:
        kind, i = self.x.key(x)
        if kind == "single":
            return self.y.nth(self._outside, self.x.rank(x, self.x.is_single)), "singleton"
        return self.y.element(("fin", self.choice(i)), self.x.position(x)), "class"

    def backward(self, y: int) -> Tuple[int, str]:
        if self._in_image(y):
            _, j = self.y.key(y)
            return self.x.element(("fin", self._owner[j]), self.y.position(y)), "class"
        return self.x.nth(self.x.is_single, self.y.rank(y, self._outside)), "singleton"

    def choices(self) -> List[Tuple[int, int]]:
        return list(enumerate(self.j))


@dataclass
class BuilderResult:
    """Префикс конденсации класса 𝒞 вместе с ветвью построения и выбранными j_i."""

    branch: str
    run: ExtensionRun
    left: LazyStructure
    right: LazyStructure
    choices: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def pairs(self) -> PairSet:
        return self.run.pairs

    def to_dict(self) -> Dict:
        return {
            "branch": self.branch,
            "pairs": [list(p) for p in self.pairs],
            "choices": [list(c) for c in self.choices],
            "steps": [step.to_dict() for step in self.run.steps],
        }


def claim_condensation_builder(x_spec: ClassCSpec, y_spec: ClassCSpec, budget: int) -> BuilderResult:
    """
    Построить budget шагов конденсации 𝕏 → 𝕐 для структур класса 𝒞.

    Если у 𝕐 есть бесконечный класс — ветвь «бесконечный класс»; иначе (𝕏 ∈ 𝒞_fin)
    — жадная ветвь с индексами j_i. Каждый шаг проходит check_partial.

    Raises:
        InconsistentSpecError: спецификация не из класса 𝒞
        CondensationObstruction: у 𝕏 есть бесконечный класс, а все классы 𝕐 конечны
    """
    x_tag = _require_class_c(x_spec)
    y_tag = _require_class_c(y_spec)
    if x_tag == "omega" and y_tag == "fin":
        raise CondensationObstruction(
            "Бесконечный класс 𝕏 должен отобразиться внутрь одного класса 𝕐, а все классы 𝕐 конечны"
        )
    x_layout = ClassCLayout(x_spec)
    y_layout = ClassCLayout(y_spec)
    if y_tag == "omega":
        pairing: Union[InfiniteClassPairing, GreedyPairing] = InfiniteClassPairing(x_layout, y_layout)
    else:
        pairing = GreedyPairing(x_layout, y_layout, x_spec, y_spec)

    def contains(f: PairSet) -> bool:
        return all(pairing.forward(x)[0] == y for x, y in f)

    def extend_left(f: PairSet, x: int):
        y, label = pairing.forward(x)
        return f + ((x, y),), label

    def extend_right(f: PairSet, y: int):
        x, label = pairing.backward(y)
        return f + ((x, y),), label

    left = build_class_c(x_spec)
    right = build_class_c(y_spec)
    system = LazyBfsSystem(contains, extend_left, extend_right, pairing.branch)
    run = extend_to_condensation(StructurePair(left, right), system, (), budget)
    logger.debug("Построитель 𝒞 (%s): %d пар", pairing.branch, len(run.pairs))
    return BuilderResult(pairing.branch, run, left, right, pairing.choices())


# ============================================
# Пример I
# ============================================

def phi_k(k: int) -> Formula:
    """Класс размера ≥ k: ∃v0..v{k-1} (попарно различны ∧ R(v0, vi)); R рефлексивно, v0 входит в класс."""
    if k < 1:
        raise InconsistentSpecError("k должно быть ≥ 1")
    distinct = [Neq(i, j) for i in range(k) for j in range(i + 1, k)]
    body: Formula = conj(distinct + [Rel("R", (0, i)) for i in range(1, k)])
    for v in range(k - 1, -1, -1):
        body = Exists(v, body)
    return body


def psi_size_two() -> Formula:
    """Есть класс размера 2: ∃u,v (u≠v ∧ R(u,v) ∧ ∀w (w=u ∨ w=v ∨ ¬R(w,u)))."""
    u, v, w = 0, 1, 2
    rest = Forall(w, Or((Eq(w, u), Eq(w, v), Not(Rel("R", (w, u))))))
    return Exists(u, Exists(v, conj([Neq(u, v), Rel("R", (u, v)), rest])))


@dataclass
class ExampleIWitnesses:
    left: FiniteStructure
    right: FiniteStructure
    phi: Formula
    psi: Formula
    k: int

    def verdicts(self) -> Dict[str, bool]:
        return {
            "X ⊨ ¬φ_k": not model_check(self.left, self.phi),
            "Y ⊨ φ_k": model_check(self.right, self.phi),
            "X ⊨ ψ": model_check(self.left, self.psi),
            "Y ⊨ ¬ψ": not model_check(self.right, self.psi),
        }

    @property
    def all_hold(self) -> bool:
        return all(self.verdicts().values())


def example_I_witnesses(k: int = 4) -> ExampleIWitnesses:
    """
    Усечения уровня k: 𝕏 — k одиночек и классы размеров 2..k-1,
    𝕐 — k одиночек и один класс размера k на месте бесконечного.
    """
    if k < 3:
        raise InconsistentSpecError("Уровень усечения должен быть ≥ 3")
    left = build_class_c(ClassCSpec(k, tuple(range(2, k))))
    right = build_class_c(ClassCSpec(k, (k,)))
    return ExampleIWitnesses(left, right, phi_k(k), psi_size_two(), k)


def example_I_equal_size(k: int = 4) -> Tuple[FiniteStructure, FiniteStructure]:
    """Те же усечения, дополненные одиночками до равного размера."""
    base = example_I_witnesses(k)
    size = max(base.left.n, base.right.n)
    left = build_class_c(ClassCSpec(k + size - base.left.n, tuple(range(2, k))))
    right = build_class_c(ClassCSpec(k + size - base.right.n, (k,)))
    return left, right


# ============================================
# Случайный частичный порядок
# ============================================

def strict_order_problems(s: FiniteStructure) -> List[str]:
    """Проверка строгого порядка через networkx: без петель, ацикличность, транзитивность."""
    graph = nx.DiGraph()
    graph.add_nodes_from(range(s.n))
    graph.add_edges_from(s.relation("<"))
    loops = sorted(a for a, _ in nx.selfloop_edges(graph))
    if loops:
        return [f"нарушена иррефлексивность: {loops[:5]}"]
    if not nx.is_directed_acyclic_graph(graph):
        return ["отношение содержит цикл"]
    missing = set(nx.transitive_closure_dag(graph).edges()) - set(graph.edges())
    if missing:
        return [f"нарушена транзитивность: нет {sorted(missing)[:5]}"]
    return []


def _last_element_problems(s: FiniteStructure) -> List[str]:
    """Строгий порядок на префиксе, если он был строгим до добавления последнего элемента."""
    if s.n == 0:
        return []
    z = s.n - 1
    rel = s.relation("<")
    below = {a for a, b in rel if b == z}
    above = {b for a, b in rel if a == z}
    problems = []
    if z in below:
        problems.append(f"нарушена иррефлексивность: {z}<{z}")
    if below & above:
        problems.append(f"цикл через {z}")
    for a in below:
        for b in above:
            if (a, b) not in rel:
                problems.append(f"нарушена транзитивность: {a}<{z}<{b}")
    for a, b in rel:
        if b in below and (a, z) not in rel:
            problems.append(f"нарушена транзитивность: {a}<{b}<{z}")
        if a in above and (z, b) not in rel:
            problems.append(f"нарушена транзитивность: {z}<{a}<{b}")
    return problems[:5]


@dataclass(frozen=True)
class PosetRequest:
    kind: str
    lower: FrozenSet[int] = frozenset()
    upper: FrozenSet[int] = frozenset()


class RandomPosetOracle:
    """
    Ленивый строгий порядок. На запрос добавляет свежий элемент:
    L < x < G, x < K, x > K или x ∥ K; без запроса — случайное расширение.
    """

    GENERIC_P = 0.5

    def __init__(self, seed: int, initial: Optional[FiniteStructure] = None):
        self.seed = seed
        self._rng = random.Random(seed)
        if initial is not None:
            problems = strict_order_problems(initial)
            if problems:
                raise PosetRequestRejected(f"Начальный префикс не является строгим порядком: {'; '.join(problems)}")
        self.structure = LazyStructure(POSET_SIG, self._extend, "random-poset", initial=initial,
                                       properties=_last_element_problems)
        self.requests: Dict[str, int] = {}

    @classmethod
    def from_relation(cls, n: int, less: Iterable[Sequence[int]], seed: int = 0) -> "RandomPosetOracle":
        return cls(seed, FiniteStructure.build(POSET_SIG, n, {"<": less}))

    @property
    def prefix(self) -> FiniteStructure:
        return self.structure.prefix

    @property
    def size(self) -> int:
        return self.structure.size

    def less(self, a: int, b: int) -> bool:
        return (a, b) in self.prefix.relation("<")

    def incomparable(self, a: int, b: int) -> bool:
        return a != b and not self.less(a, b) and not self.less(b, a)

    def down(self, elements: Iterable[int]) -> Set[int]:
        """Замыкание вниз (вместе с самими элементами)."""
        elements = set(elements)
        return elements | {a for a, b in self.prefix.relation("<") if b in elements}

    def up(self, elements: Iterable[int]) -> Set[int]:
        elements = set(elements)
        return elements | {b for a, b in self.prefix.relation("<") if a in elements}

    def _extend(self, prefix: FiniteStructure, request: Optional[PosetRequest]) -> FiniteStructure:
        z = prefix.n
        if request is None:
            lower, upper = self._generic_sets(prefix)
        elif request.kind == "incomparable":
            lower, upper = set(), set()
        else:
            lower, upper = self.down(request.lower), self.up(request.upper)
        rel = set(prefix.relation("<")) | {(d, z) for d in lower} | {(z, u) for u in upper}
        return FiniteStructure.build(POSET_SIG, z + 1, {"<": rel})

    def _generic_sets(self, prefix: FiniteStructure) -> Tuple[Set[int], Set[int]]:
        n = prefix.n
        lower: Set[int] = set()
        if n and self._rng.random() < self.GENERIC_P:
            lower = self.down({self._rng.randrange(n)})
        candidates = [u for u in range(n) if u not in lower and all(self.less(d, u) for d in lower)]
        upper: Set[int] = set()
        if candidates and self._rng.random() < self.GENERIC_P:
            upper = self.up({self._rng.choice(candidates)})
        return lower, upper

    def _check_elements(self, elements: Iterable[int], name: str) -> FrozenSet[int]:
        elements = frozenset(elements)
        if not elements:
            raise PosetRequestRejected(f"Множество {name} должно быть непустым")
        outside = sorted(e for e in elements if not 0 <= e < self.size)
        if outside:
            raise PosetRequestRejected(f"Элементы {outside} вне префикса 0..{self.size - 1}")
        return elements

    def _request(self, request: PosetRequest) -> int:
        self.structure.extend(request)
        self.requests[request.kind] = self.requests.get(request.kind, 0) + 1
        return self.size - 1

    def request_between(self, lower: Iterable[int], upper: Iterable[int]) -> int:
        """(u1): свежий x с L < x < G. Отказ, если L < G не выполнено."""
        lower = self._check_elements(lower, "L")
        upper = self._check_elements(upper, "G")
        for a in sorted(lower):
            for b in sorted(upper):
                if not self.less(a, b):
                    raise PosetRequestRejected(f"L < G не выполнено: пара ({a}, {b})")
        return self._request(PosetRequest("between", lower, upper))

    def request_below(self, elements: Iterable[int]) -> int:
        """(u2): свежий x < K."""
        return self._request(PosetRequest("below", frozenset(), self._check_elements(elements, "K")))

    def request_above(self, elements: Iterable[int]) -> int:
        """(u2): свежий y > K."""
        return self._request(PosetRequest("above", self._check_elements(elements, "K"), frozenset()))

    def request_incomparable(self, elements: Iterable[int]) -> int:
        """(u2): свежий z ∥ K (изолированный элемент)."""
        self._check_elements(elements, "K")
        return self._request(PosetRequest("incomparable"))

    def extend_generic(self) -> int:
        self.structure.extend(None)
        return self.size - 1

    def explore(self, upto: int) -> FiniteStructure:
        return explore(self.structure, upto)

    def check_strict_order(self) -> List[str]:
        return strict_order_problems(self.prefix)


def random_poset(seed: int) -> RandomPosetOracle:
    return RandomPosetOracle(seed)


def find_bad_pair(oracle: RandomPosetOracle) -> BadCondensation:
    """
    f_0 = {(a0, b0), (a1, b1)} с a0 ∥ a1 и b0 < b1; недостающие элементы
    создаются запросами к оракулу.
    """
    if oracle.size == 0:
        oracle.extend_generic()
    n = oracle.size
    incomparable = next(((a, b) for a in range(n) for b in range(a + 1, n) if oracle.incomparable(a, b)), None)
    if incomparable is None:
        incomparable = (0, oracle.request_incomparable({0}))
    comparable = min(oracle.prefix.relation("<"), default=None)
    if comparable is None:
        comparable = (0, oracle.request_above({0}))
    (a0, a1), (b0, b1) = incomparable, comparable
    return BadCondensation(canonical_pairs([(a0, b0), (a1, b1)]), "<", (a0, a1), (b0, b1))


def _case_label(lower: Set[int], upper: Set[int]) -> str:
    if lower and upper:
        return "case1"
    if upper:
        return "case2"
    if lower:
        return "case3"
    return "case4"


class PosetBackAndForth:
    """
    Система {f ∈ PC(P) : f_0 ⊆ f} с явными шагами: (e1) разбирает четыре случая
    по L_a = {x ∈ dom f : x < a} и G_a = {y ∈ dom f : y > a}, (e2) берёт a ∥ dom f.
    Предпочитается наименьший подходящий существующий элемент, иначе запрос к оракулу.
    """

    def __init__(self, oracle: RandomPosetOracle, bad: BadCondensation):
        self.oracle = oracle
        self.bad = bad

    def contains(self, f: PairSet) -> bool:
        if not set(self.bad.pairs) <= set(f):
            return False
        if any(max(p) >= self.oracle.size for p in f):
            return False
        prefix = self.oracle.prefix
        return not isinstance(check_partial(StructurePair(prefix, prefix), f), ViolationReport)

    def extend_left(self, f: PairSet, a: int) -> Tuple[PairSet, str]:
        oracle = self.oracle
        mapping = dict(f)
        used = set(mapping.values())
        lower = {mapping[x] for x in mapping if oracle.less(x, a)}
        upper = {mapping[y] for y in mapping if oracle.less(a, y)}
        label = _case_label(lower, upper)
        b = next((c for c in range(oracle.size)
                  if c not in used
                  and all(oracle.less(l, c) for l in lower)
                  and all(oracle.less(c, u) for u in upper)), None)
        if b is None:
            if label == "case1":
                b = oracle.request_between(lower, upper)
            elif label == "case2":
                b = oracle.request_below(upper)
            elif label == "case3":
                b = oracle.request_above(lower)
            else:
                b = oracle.extend_generic()
        return f + ((a, b),), label

    def extend_right(self, f: PairSet, b: int) -> Tuple[PairSet, str]:
        oracle = self.oracle
        domain = set(dict(f))
        a = next((c for c in range(oracle.size)
                  if c not in domain and all(oracle.incomparable(c, x) for x in domain)), None)
        if a is None:
            a = oracle.request_incomparable(domain) if domain else oracle.extend_generic()
        return f + ((a, b),), "back"

    def as_system(self) -> LazyBfsSystem:
        return LazyBfsSystem(self.contains, self.extend_left, self.extend_right, "random-poset")


def check_case_constraints(prefix: FiniteStructure, before: PairSet, step: ExtensionStep) -> List[str]:
    """Проверить, что шаг попал ровно в свой случай и выбранный элемент удовлетворяет его ограничениям."""
    rel = prefix.relation("<")
    mapping = dict(before)
    problems = []
    if len(step.added) != 1:
        return [f"шаг {step.index}: добавлено {len(step.added)} пар вместо одной"]
    a, b = step.added[0]
    if step.clause == "e1":
        lower = {mapping[x] for x in mapping if (x, a) in rel}
        upper = {mapping[y] for y in mapping if (a, y) in rel}
        expected = _case_label(lower, upper)
        if step.label != expected:
            problems.append(f"шаг {step.index}: метка {step.label}, ожидался {expected}")
        if b in mapping.values():
            problems.append(f"шаг {step.index}: образ {b} уже занят")
        bad_lower = sorted(l for l in lower if (l, b) not in rel)
        bad_upper = sorted(u for u in upper if (b, u) not in rel)
        if bad_lower or bad_upper:
            problems.append(f"шаг {step.index}: {b} не лежит между f[L_a] и f[G_a] ({bad_lower}, {bad_upper})")
    else:
        if step.label != "back":
            problems.append(f"шаг {step.index}: метка {step.label} для (e2)")
        comparable = sorted(x for x in mapping if (x, a) in rel or (a, x) in rel or x == a)
        if comparable:
            problems.append(f"шаг {step.index}: {a} сравним с {comparable}")
    return problems


@dataclass
class PosetDemoResult:
    evidence: ReversibilityEvidence
    case_problems: List[str]
    order_problems: List[str]
    oracle: RandomPosetOracle

    @property
    def ok(self) -> bool:
        return not self.case_problems and not self.order_problems


def poset_nonreversibility(seed: int, budget: int) -> PosetDemoResult:
    """Построить f_0 и продолжить его budget шагами, проверяя каждый шаг."""
    oracle = random_poset(seed)
    bad = find_bad_pair(oracle)
    system = PosetBackAndForth(oracle, bad).as_system()
    evidence = reversibility_witness(oracle.structure, system, bad, budget)
    prefix = oracle.prefix
    problems = []
    before = bad.pairs
    for step in evidence.run.steps:
        problems.extend(check_case_constraints(prefix, before, step))
        before = step.pairs
    return PosetDemoResult(evidence, problems, oracle.check_strict_order(), oracle)


# ============================================
# Предустановки
# ============================================

CLASS_C_PRESETS: Dict[str, ClassCSpec] = {
    "classC-fin": ClassCSpec(OMEGA, (), 0, True),
    "classC-omega": ClassCSpec(OMEGA, (), 1, False),
}

PRESET_NAMES = ("classC-fin", "classC-omega", "random-poset", "example-I")


def load_preset(name: str, seed: int = 0):
    """Именованное семейство: ленивая структура класса 𝒞, оракул порядка или пример I."""
    if name in CLASS_C_PRESETS:
        return build_class_c(CLASS_C_PRESETS[name])
    if name == "random-poset":
        return random_poset(seed)
    if name == "example-I":
        return example_I_witnesses()
    raise InconsistentSpecError(f"Неизвестная предустановка {name!r}; доступны: {', '.join(PRESET_NAMES)}")
