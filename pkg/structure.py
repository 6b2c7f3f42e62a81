"""
Модуль реляционных структур: сигнатуры, конечные и «ленивые» структуры,
JSON-формат, генераторы случайных структур и перебор корпуса.

Элементы структуры — натуральные числа 0..n-1.
Равенство не хранится как отношение: оно встроено в логику (logic.py).
"""

import itertools
import json
import logging
import random
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

logger = logging.getLogger(__name__)

Tuple_ = Tuple[int, ...]


class StructureError(ValueError):
    """Базовая ошибка модуля структур."""


class SignatureError(StructureError):
    """Некорректная сигнатура или несовпадение сигнатур."""


class StructureParseError(StructureError):
    """Синтаксическая ошибка JSON-документа структуры."""

    def __init__(self, message: str, position: Optional[int] = None):
        if position is not None:
            message = f"{message} (позиция {position})"
        super().__init__(message)
        self.position = position


class ArityMismatchError(StructureError):
    """Длина кортежа не совпадает с арностью отношения."""


class ElementRangeError(StructureError):
    """Элемент кортежа вне универсума."""


class ExtenderError(RuntimeError):
    """Расширитель ленивой структуры нарушил свой контракт (ошибка генератора)."""


@dataclass(frozen=True)
class Signature:
    """Реляционная сигнатура: упорядоченный список (имя, арность)."""

    relations: Tuple[Tuple[str, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple((str(name), int(arity)) for name, arity in self.relations))
        names = [name for name, _ in self.relations]
        if len(set(names)) != len(names):
            raise SignatureError(f"Имена отношений повторяются: {names}")
        for name, arity in self.relations:
            if not name or name == "=" or any(ch.isspace() or ch in "()!" for ch in name):
                raise SignatureError(f"Недопустимое имя отношения: {name!r}")
            if arity < 1:
                raise SignatureError(f"Арность отношения {name} должна быть ≥ 1, получено {arity}")

    @classmethod
    def of(cls, *relations: Tuple[str, int]) -> "Signature":
        """Signature.of(("R", 2), ("S", 1))."""
        return cls(tuple(relations))

    @property
    def names(self) -> List[str]:
        return [name for name, _ in self.relations]

    def arity(self, name: str) -> int:
        for rel_name, arity in self.relations:
            if rel_name == name:
                return arity
        raise SignatureError(f"Отношение {name!r} отсутствует в сигнатуре")

    def __contains__(self, name: str) -> bool:
        return any(rel_name == name for rel_name, _ in self.relations)


@dataclass(frozen=True)
class FiniteStructure:
    """
    Конечная реляционная структура над универсумом 0..n-1.

    Интерпретации хранятся как frozenset кортежей в порядке сигнатуры,
    поэтому равенство структур совпадает с равенством их канонических форм.
    """

    sig: Signature
    n: int
    interpretations: Tuple[FrozenSet[Tuple_], ...] = field(default=())

    def __post_init__(self):
        if self.n < 0:
            raise ElementRangeError(f"Размер универсума должен быть ≥ 0, получено {self.n}")
        interps = tuple(self.interpretations)
        if not interps:
            interps = tuple(frozenset() for _ in self.sig.relations)
        if len(interps) != len(self.sig.relations):
            raise SignatureError("Число интерпретаций не совпадает с числом отношений сигнатуры")
        checked = []
        for (name, arity), tuples in zip(self.sig.relations, interps):
            normalized = set()
            for tup in tuples:
                tup = tuple(int(e) for e in tup)
                if len(tup) != arity:
                    raise ArityMismatchError(f"Кортеж {list(tup)} отношения {name} имеет длину {len(tup)}, ожидается {arity}")
                for e in tup:
                    if e < 0 or e >= self.n:
                        raise ElementRangeError(f"Элемент {e} вне универсума 0..{self.n - 1} (отношение {name})")
                normalized.add(tup)
            checked.append(frozenset(normalized))
        object.__setattr__(self, "interpretations", tuple(checked))

    @classmethod
    def build(cls, sig: Signature, n: int, rels: Optional[Dict[str, Iterable[Sequence[int]]]] = None) -> "FiniteStructure":
        """Собрать структуру из словаря имя → кортежи."""
        rels = rels or {}
        unknown = set(rels) - set(sig.names)
        if unknown:
            raise SignatureError(f"Отношения {sorted(unknown)} отсутствуют в сигнатуре")
        return cls(sig, n, tuple(frozenset(tuple(t) for t in rels.get(name, ())) for name in sig.names))

    @property
    def universe(self) -> range:
        return range(self.n)

    def relation(self, name: str) -> FrozenSet[Tuple_]:
        return self.interpretations[self.sig.names.index(name)]

    def tuples(self, name: str) -> List[Tuple_]:
        """Кортежи отношения в каноническом (лексикографическом) порядке."""
        return sorted(self.relation(name))

    def holds(self, name: str, tup: Sequence[int]) -> bool:
        return tuple(tup) in self.relation(name)

    def items(self) -> Iterator[Tuple[str, FrozenSet[Tuple_]]]:
        return zip(self.sig.names, self.interpretations)

    def restrict(self, k: int) -> "FiniteStructure":
        """Ограничение на начальный отрезок 0..k-1."""
        k = min(k, self.n)
        return FiniteStructure(
            self.sig, k,
            tuple(frozenset(t for t in tuples if all(e < k for e in t)) for tuples in self.interpretations),
        )

    def permute(self, perm: Sequence[int]) -> "FiniteStructure":
        """Изоморфная копия: элемент x переходит в perm[x]."""
        if sorted(perm) != list(range(self.n)):
            raise ElementRangeError(f"{list(perm)} не является перестановкой 0..{self.n - 1}")
        return FiniteStructure(
            self.sig, self.n,
            tuple(frozenset(tuple(perm[e] for e in t) for t in tuples) for tuples in self.interpretations),
        )

    def __repr__(self) -> str:
        return f"FiniteStructure({serialize_structure(self)})"


Structure = Union[FiniteStructure, "LazyStructure"]

Extender = Callable[[FiniteStructure, Optional[object]], FiniteStructure]
PropertyCheck = Callable[[FiniteStructure], List[str]]


class LazyStructure:
    """
    Счётная структура, заданная конечным префиксом и расширителем.

    Префиксы только растут концевыми расширениями: отношения на старых элементах
    никогда не меняются. Доступ к одному экземпляру должен быть последовательным.
    """

    def __init__(self, sig: Signature, extender: Extender, family_tag: str,
                 initial: Optional[FiniteStructure] = None,
                 properties: Optional[PropertyCheck] = None):
        """
        Args:
            sig: Сигнатура
            extender: Функция (префикс, запрос) → строго больший префикс
            family_tag: Семейство генератора (см. menagerie.py)
            initial: Начальный префикс (по умолчанию пустой)
            properties: Проверка конечных свойств семейства; возвращает список нарушений
        """
        self.sig = sig
        self.family_tag = family_tag
        self._extender = extender
        self._properties = properties
        self._prefix = initial if initial is not None else FiniteStructure(sig, 0)
        if self._prefix.sig != sig:
            raise SignatureError("Сигнатура начального префикса не совпадает с сигнатурой структуры")

    @property
    def prefix(self) -> FiniteStructure:
        """Текущий исследованный префикс."""
        return self._prefix

    @property
    def size(self) -> int:
        return self._prefix.n

    def extend(self, request: Optional[object] = None) -> FiniteStructure:
        """
        Попросить расширитель увеличить префикс (с необязательным запросом).

        Raises:
            ExtenderError: префикс не вырос, изменил старые отношения или нарушил свойства семейства
        """
        old = self._prefix
        try:
            new = self._extender(old, request)
        except ExtenderError:
            raise
        except Exception as e:
            raise ExtenderError(f"Расширитель семейства {self.family_tag} не смог расширить префикс: {e}") from e
        if new.sig != self.sig:
            raise ExtenderError("Расширитель вернул структуру другой сигнатуры")
        if new.n <= old.n:
            raise ExtenderError(f"Расширитель семейства {self.family_tag} не увеличил префикс ({old.n} → {new.n})")
        if new.restrict(old.n) != old:
            raise ExtenderError(f"Расширитель семейства {self.family_tag} изменил отношения на старых элементах")
        self._prefix = new
        self.verify_family_properties()
        logger.debug("Префикс %s вырос: %d → %d", self.family_tag, old.n, new.n)
        return new

    def verify_family_properties(self):
        """Проверить конечные свойства семейства на текущем префиксе."""
        if self._properties is None:
            return
        problems = self._properties(self._prefix)
        if problems:
            raise ExtenderError(f"Префикс семейства {self.family_tag} нарушает свойства: {'; '.join(problems)}")

    def explore(self, upto: int) -> FiniteStructure:
        return explore(self, upto)

    def __repr__(self) -> str:
        return f"LazyStructure({self.family_tag}, explored={self.size})"


def explore(s: LazyStructure, upto: int) -> FiniteStructure:
    """
    Исследовать ленивую структуру до upto элементов.

    Args:
        s: Ленивая структура
        upto: Нужное число элементов (меньшее значение даёт ограничение префикса)

    Returns:
        Префикс ровно из upto элементов, согласованный со всеми прежними префиксами
    """
    if upto < 0:
        raise ElementRangeError(f"upto должно быть ≥ 0, получено {upto}")
    while s.size < upto:
        s.extend(None)
    return s.prefix.restrict(upto)


@dataclass(frozen=True)
class StructurePair:
    """Пара структур одной сигнатуры (𝕏, 𝕐)."""

    left: Structure
    right: Structure

    def __post_init__(self):
        if self.left.sig != self.right.sig:
            raise SignatureError("Структуры пары имеют разные сигнатуры")

    @property
    def sig(self) -> Signature:
        return self.left.sig

    def reversed(self) -> "StructurePair":
        return StructurePair(self.right, self.left)


# ============================================
# JSON-формат
# ============================================

def serialize_structure(s: FiniteStructure) -> str:
    """Каноническая сериализация: ключи sig, n, rels; кортежи отсортированы; без пробелов."""
    payload = {
        "sig": [[name, arity] for name, arity in s.sig.relations],
        "n": s.n,
        "rels": {name: [list(t) for t in s.tuples(name)] for name in s.sig.names},
    }
    return json.dumps(payload, separators=(",", ":"), ensure_ascii=False)


def structure_to_dict(s: FiniteStructure) -> Dict:
    return json.loads(serialize_structure(s))


def structure_from_dict(data: Dict) -> FiniteStructure:
    """Собрать структуру из уже разобранного JSON-объекта."""
    if not isinstance(data, dict):
        raise StructureParseError("Документ структуры должен быть JSON-объектом")
    for key in ("sig", "n", "rels"):
        if key not in data:
            raise StructureParseError(f"Отсутствует ключ {key!r}")
    raw_sig = data["sig"]
    if not isinstance(raw_sig, list) or not all(
        isinstance(r, list) and len(r) == 2 and isinstance(r[0], str) and isinstance(r[1], int) for r in raw_sig
    ):
        raise StructureParseError("Ключ 'sig' должен быть списком пар [имя, арность]")
    sig = Signature(tuple((r[0], r[1]) for r in raw_sig))
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise StructureParseError("Ключ 'n' должен быть целым числом")
    rels = data["rels"]
    if not isinstance(rels, dict):
        raise StructureParseError("Ключ 'rels' должен быть объектом")
    for name, tuples in rels.items():
        if not isinstance(tuples, list) or not all(
            isinstance(t, list) and all(isinstance(e, int) and not isinstance(e, bool) for e in t) for t in tuples
        ):
            raise StructureParseError(f"Кортежи отношения {name!r} должны быть списками целых чисел")
        if name in sig:
            arity = sig.arity(name)
            for t in tuples:
                if len(t) != arity:
                    raise ArityMismatchError(f"Кортеж {t} отношения {name} имеет длину {len(t)}, ожидается {arity}")
    return FiniteStructure.build(sig, n, rels)


def parse_structure(text: str) -> FiniteStructure:
    """
    Разобрать JSON-документ структуры.

    Raises:
        StructureParseError: синтаксическая ошибка (с позицией)
        ArityMismatchError: длина кортежа не совпадает с арностью
        ElementRangeError: элемент вне универсума
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise StructureParseError(f"Ошибка синтаксиса JSON: {e.msg}", position=e.pos) from e
    return structure_from_dict(data)


def load_structure(path: str) -> FiniteStructure:
    """Прочитать структуру из файла."""
    with open(path, "r", encoding="utf-8") as f:
        return parse_structure(f.read())


def save_structure(s: FiniteStructure, path: str):
    """Сохранить структуру в файл."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(serialize_structure(s))


# ============================================
# Генераторы
# ============================================

def generate_random(sig: Signature, n: int, density: float, seed: int) -> FiniteStructure:
    """
    Случайная структура: каждый возможный кортеж включается независимо с вероятностью density.

    Args:
        sig: Сигнатура
        n: Размер универсума
        density: Вероятность включения кортежа (0..1)
        seed: Seed генератора (результат детерминирован)
    """
    if n < 0:
        raise ElementRangeError(f"n должно быть ≥ 0, получено {n}")
    rng = random.Random(seed)
    density = float(density)
    rels = {}
    for name, arity in sig.relations:
        rels[name] = [t for t in itertools.product(range(n), repeat=arity) if rng.random() < density]
    return FiniteStructure.build(sig, n, rels)


def enumerate_structures(sig: Signature, n: int) -> Iterator[FiniteStructure]:
    """Перебрать все структуры сигнатуры sig на универсуме размера n."""
    slots = [(name, list(itertools.product(range(n), repeat=arity))) for name, arity in sig.relations]
    choices = [itertools.product((False, True), repeat=len(tuples)) for _, tuples in slots]
    for masks in itertools.product(*[list(c) for c in choices]):
        rels = {
            name: [t for t, keep in zip(tuples, mask) if keep]
            for (name, tuples), mask in zip(slots, masks)
        }
        yield FiniteStructure.build(sig, n, rels)


def count_structures(sig: Signature, n: int) -> int:
    return 2 ** sum(n ** arity for _, arity in sig.relations)


def add_random_tuples(s: FiniteStructure, density: float, seed: int) -> FiniteStructure:
    """Добавить к структуре случайные кортежи (каждый отсутствующий — с вероятностью density)."""
    rng = random.Random(seed)
    rels = {}
    for name, arity in s.sig.relations:
        current = s.relation(name)
        extra = [t for t in itertools.product(range(s.n), repeat=arity) if t not in current and rng.random() < density]
        rels[name] = list(current) + extra
    return FiniteStructure.build(s.sig, s.n, rels)


def random_permutation(n: int, seed: int) -> List[int]:
    perm = list(range(n))
    random.Random(seed).shuffle(perm)
    return perm


# ============================================
# Ленивые структуры
# ============================================

LINEAR_ORDER_SIG = Signature.of(("<", 2))


def omega_chain() -> LazyStructure:
    """Ленивая цепь ω: 0 < 1 < 2 < ..., по одному элементу за расширение."""

    def extender(prefix: FiniteStructure, request: Optional[object]) -> FiniteStructure:
        n = prefix.n
        less = set(prefix.relation("<")) | {(i, n) for i in range(n)}
        return FiniteStructure.build(LINEAR_ORDER_SIG, n + 1, {"<": less})

    def properties(prefix: FiniteStructure) -> List[str]:
        expected = {(i, j) for i in range(prefix.n) for j in range(prefix.n) if i < j}
        return [] if set(prefix.relation("<")) == expected else ["префикс не является цепью 0<1<...<k-1"]

    return LazyStructure(LINEAR_ORDER_SIG, extender, "omega-chain", properties=properties)


def lazy_from_finite(s: FiniteStructure, family_tag: str = "finite") -> LazyStructure:
    """Обернуть конечную структуру: расширение невозможно, исследование ограничено её размером."""

    def extender(prefix: FiniteStructure, request: Optional[object]) -> FiniteStructure:
        if prefix.n >= s.n:
            raise ExtenderError(f"Конечная структура ({s.n} элементов) не может быть расширена")
        return s.restrict(prefix.n + 1)

    return LazyStructure(s.sig, extender, family_tag)


def current_prefix(s: Structure) -> FiniteStructure:
    """Конечная структура как есть, для ленивой — её исследованный префикс."""
    return s.prefix if isinstance(s, LazyStructure) else s
