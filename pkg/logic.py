"""
Модуль формул: синтаксис фрагментов ℘ (R-позитивные), 𝒩 (R-негативные) и полной
логики первого порядка, s-выражения, проверка выполнимости на конечных структурах,
ранг кванторов, двойственность φ^¬ и случайная генерация формул.

Переменные — натуральные индексы v0, v1, ...
Константы True/False кодируются атомами v0=v0 и v0≠v0 и считаются предложениями.
"""

import itertools
import logging
import random
import re
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple, Union

import config
from structure import FiniteStructure, Signature

logger = logging.getLogger(__name__)

Valuation = Mapping[int, int]


class FormulaError(ValueError):
    """Базовая ошибка модуля формул."""


class FormulaSyntaxError(FormulaError):
    """Ошибка разбора s-выражения."""

    def __init__(self, message: str, position: Optional[int] = None):
        if position is not None:
            message = f"{message} (токен {position})"
        super().__init__(message)
        self.position = position


class UncoveredVariableError(FormulaError):
    """Оценка не покрывает свободную переменную формулы."""


class FragmentTag(Enum):
    """Наиболее узкий фрагмент, которому принадлежит формула."""

    POSITIVE = "positive"
    NEGATIVE = "negative"
    FULL_FO = "full_fo"


# ============================================
# Узлы синтаксического дерева
# ============================================

@dataclass(frozen=True)
class Eq:
    i: int
    j: int


@dataclass(frozen=True)
class Neq:
    i: int
    j: int


@dataclass(frozen=True)
class Rel:
    name: str
    args: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class NegRel:
    name: str
    args: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    items: Tuple["Formula", ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if not self.items:
            raise FormulaError("Пустая конъюнкция: используйте TRUE")


@dataclass(frozen=True)
class Or:
    items: Tuple["Formula", ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if not self.items:
            raise FormulaError("Пустая дизъюнкция: используйте FALSE")


@dataclass(frozen=True)
class Exists:
    var: int
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: int
    body: "Formula"


Formula = Union[Eq, Neq, Rel, NegRel, Not, And, Or, Exists, Forall]

TRUE = Eq(0, 0)
FALSE = Neq(0, 0)

ATOMS = (Eq, Neq, Rel, NegRel)


def conj(items: Iterable[Formula]) -> Formula:
    items = tuple(items)
    if not items:
        return TRUE
    return items[0] if len(items) == 1 else And(items)


def disj(items: Iterable[Formula]) -> Formula:
    items = tuple(items)
    if not items:
        return FALSE
    return items[0] if len(items) == 1 else Or(items)


def _is_constant(phi: Formula) -> bool:
    return isinstance(phi, (Eq, Neq)) and phi.i == phi.j


def free_variables(phi: Formula) -> Set[int]:
    """Множество свободных переменных формулы."""
    if isinstance(phi, (Eq, Neq)):
        return set() if phi.i == phi.j else {phi.i, phi.j}
    if isinstance(phi, (Rel, NegRel)):
        return set(phi.args)
    if isinstance(phi, Not):
        return free_variables(phi.body)
    if isinstance(phi, (And, Or)):
        result: Set[int] = set()
        for item in phi.items:
            result |= free_variables(item)
        return result
    if isinstance(phi, (Exists, Forall)):
        return free_variables(phi.body) - {phi.var}
    raise FormulaError(f"Неизвестный узел формулы: {phi!r}")


def is_sentence(phi: Formula) -> bool:
    return not free_variables(phi)


def _nodes(phi: Formula) -> Iterator[Formula]:
    yield phi
    if isinstance(phi, (Not, Exists, Forall)):
        yield from _nodes(phi.body)
    elif isinstance(phi, (And, Or)):
        for item in phi.items:
            yield from _nodes(item)


def quantifier_rank(phi: Formula) -> int:
    """Ранг кванторов: атомы — 0, связки — максимум, квантор — 1 + ранг тела."""
    if isinstance(phi, ATOMS):
        return 0
    if isinstance(phi, Not):
        return quantifier_rank(phi.body)
    if isinstance(phi, (And, Or)):
        return max(quantifier_rank(item) for item in phi.items)
    if isinstance(phi, (Exists, Forall)):
        return 1 + quantifier_rank(phi.body)
    raise FormulaError(f"Неизвестный узел формулы: {phi!r}")


def in_fragment(phi: Formula, tag: FragmentTag) -> bool:
    """
    Принадлежность фрагменту.

    Формулы только с равенствами лежат и в ℘, и в 𝒩.
    """
    kinds = {type(node) for node in _nodes(phi)}
    if tag is FragmentTag.POSITIVE:
        return Not not in kinds and NegRel not in kinds
    if tag is FragmentTag.NEGATIVE:
        return Not not in kinds and Rel not in kinds
    return True


def fragment_of(phi: Formula) -> FragmentTag:
    """Наиболее узкий тег: Positive, если φ ∈ ℘; иначе Negative, если φ ∈ 𝒩; иначе FullFO."""
    if in_fragment(phi, FragmentTag.POSITIVE):
        return FragmentTag.POSITIVE
    if in_fragment(phi, FragmentTag.NEGATIVE):
        return FragmentTag.NEGATIVE
    return FragmentTag.FULL_FO


def neg_dual(phi: Formula) -> Formula:
    """
    Двойственная формула φ^¬: атомы меняются на отрицания, (¬φ)^¬ = φ,
    ∃ ↔ ∀ и ∧ ↔ ∨. Выполнено φ^¬ ↔ ¬φ, а фрагменты ℘ и 𝒩 меняются местами.
    """
    if isinstance(phi, Eq):
        return Neq(phi.i, phi.j)
    if isinstance(phi, Neq):
        return Eq(phi.i, phi.j)
    if isinstance(phi, Rel):
        return NegRel(phi.name, phi.args)
    if isinstance(phi, NegRel):
        return Rel(phi.name, phi.args)
    if isinstance(phi, Not):
        return phi.body
    if isinstance(phi, And):
        return Or(tuple(neg_dual(item) for item in phi.items))
    if isinstance(phi, Or):
        return And(tuple(neg_dual(item) for item in phi.items))
    if isinstance(phi, Exists):
        return Forall(phi.var, neg_dual(phi.body))
    if isinstance(phi, Forall):
        return Exists(phi.var, neg_dual(phi.body))
    raise FormulaError(f"Неизвестный узел формулы: {phi!r}")


def close_existentially(phi: Formula) -> Formula:
    """Замкнуть свободные переменные кванторами ∃ (внешний — наименьшая переменная)."""
    result = phi
    for var in sorted(free_variables(phi), reverse=True):
        result = Exists(var, result)
    return result


# ============================================
# Выполнимость
# ============================================

def _eval(s: FiniteStructure, phi: Formula, val: Dict[int, int]) -> bool:
    if isinstance(phi, Eq):
        return phi.i == phi.j or val[phi.i] == val[phi.j]
    if isinstance(phi, Neq):
        return phi.i != phi.j and val[phi.i] != val[phi.j]
    if isinstance(phi, Rel):
        return tuple(val[v] for v in phi.args) in s.relation(phi.name)
    if isinstance(phi, NegRel):
        return tuple(val[v] for v in phi.args) not in s.relation(phi.name)
    if isinstance(phi, Not):
        return not _eval(s, phi.body, val)
    if isinstance(phi, And):
        return all(_eval(s, item, val) for item in phi.items)
    if isinstance(phi, Or):
        return any(_eval(s, item, val) for item in phi.items)
    if isinstance(phi, (Exists, Forall)):
        saved = val.get(phi.var)
        had = phi.var in val
        want_any = isinstance(phi, Exists)
        result = not want_any
        for e in range(s.n):
            val[phi.var] = e
            if _eval(s, phi.body, val) == want_any:
                result = want_any
                break
        if had:
            val[phi.var] = saved
        else:
            val.pop(phi.var, None)
        return result
    raise FormulaError(f"Неизвестный узел формулы: {phi!r}")


def _check_relations(s: FiniteStructure, phi: Formula):
    for node in _nodes(phi):
        if isinstance(node, (Rel, NegRel)):
            if node.name not in s.sig:
                raise FormulaError(f"Отношение {node.name!r} отсутствует в сигнатуре структуры")
            if len(node.args) != s.sig.arity(node.name):
                raise FormulaError(f"Атом {node.name} имеет {len(node.args)} аргументов, ожидается {s.sig.arity(node.name)}")


def model_check(s: FiniteStructure, phi: Formula, val: Optional[Valuation] = None) -> bool:
    """
    Проверить 𝕏 ⊨ φ[val] (тарская семантика, кванторы по конечному универсуму).

    Raises:
        UncoveredVariableError: оценка не покрывает свободную переменную
    """
    val = dict(val or {})
    missing = free_variables(phi) - set(val)
    if missing:
        raise UncoveredVariableError(f"Оценка не покрывает свободные переменные {sorted(missing)}")
    for var, e in val.items():
        if e < 0 or e >= s.n:
            raise FormulaError(f"Значение v{var}={e} вне универсума 0..{s.n - 1}")
    _check_relations(s, phi)
    return _eval(s, phi, val)


def all_valuations(variables: Sequence[int], elements: Sequence[int]) -> Iterator[Dict[int, int]]:
    """Все оценки переменных variables элементами elements."""
    variables = list(variables)
    for values in itertools.product(elements, repeat=len(variables)):
        yield dict(zip(variables, values))


# ============================================
# Сохранение формул
# ============================================

def first_unpreserved(source: FiniteStructure, target: FiniteStructure,
                      sentences: Iterable[Formula]) -> Optional[Formula]:
    """Первое предложение, истинное в source и ложное в target (или None)."""
    for phi in sentences:
        if model_check(source, phi) and not model_check(target, phi):
            return phi
    return None


def _require_fragment(sentences: Sequence[Formula], tag: FragmentTag):
    for phi in sentences:
        if not in_fragment(phi, tag):
            raise FormulaError(f"Формула {format_formula(phi)} не принадлежит фрагменту {tag.value}")


def positive_below(x: FiniteStructure, y: FiniteStructure, sentences: Sequence[Formula]) -> Optional[Formula]:
    """Проверка 𝕏 ⪻_℘ 𝕐 на выборке: контрпример или None."""
    _require_fragment(sentences, FragmentTag.POSITIVE)
    return first_unpreserved(x, y, sentences)


def negative_below(y: FiniteStructure, x: FiniteStructure, sentences: Sequence[Formula]) -> Optional[Formula]:
    """Проверка 𝕐 ⪻_𝒩 𝕏 на выборке: контрпример или None."""
    _require_fragment(sentences, FragmentTag.NEGATIVE)
    return first_unpreserved(y, x, sentences)


def pn_equivalent(x: FiniteStructure, y: FiniteStructure,
                  positive: Sequence[Formula], negative: Sequence[Formula]) -> Optional[Formula]:
    """Проверка 𝕏 ≡_{℘∪𝒩} 𝕐 на выборке: первое различающее предложение или None."""
    _require_fragment(positive, FragmentTag.POSITIVE)
    _require_fragment(negative, FragmentTag.NEGATIVE)
    for phi in list(positive) + list(negative):
        if model_check(x, phi) != model_check(y, phi):
            return phi
    return None


def preserves_along(left: FiniteStructure, right: FiniteStructure, mapping: Mapping[int, int],
                    phi: Formula) -> Optional[Dict[int, int]]:
    """
    Проверить 𝕏 ⊨ φ[x̄] ⟹ 𝕐 ⊨ φ[f x̄] для всех x̄ из dom f.

    Returns:
        Оценка-контрпример или None
    """
    variables = sorted(free_variables(phi))
    for val in all_valuations(variables, sorted(mapping)):
        if model_check(left, phi, val) and not model_check(right, phi, {v: mapping[e] for v, e in val.items()}):
            return val
    return None


# ============================================
# S-выражения
# ============================================

def format_formula(phi: Formula) -> str:
    """Напечатать формулу как s-выражение."""
    if isinstance(phi, Eq):
        return f"(= {phi.i} {phi.j})"
    if isinstance(phi, Neq):
        return f"(!= {phi.i} {phi.j})"
    if isinstance(phi, Rel):
        return "(" + " ".join([phi.name] + [str(a) for a in phi.args]) + ")"
    if isinstance(phi, NegRel):
        return "(" + " ".join(["!" + phi.name] + [str(a) for a in phi.args]) + ")"
    if isinstance(phi, Not):
        return f"(not {format_formula(phi.body)})"
    if isinstance(phi, And):
        return "(and " + " ".join(format_formula(item) for item in phi.items) + ")"
    if isinstance(phi, Or):
        return "(or " + " ".join(format_formula(item) for item in phi.items) + ")"
    if isinstance(phi, Exists):
        return f"(exists {phi.var} {format_formula(phi.body)})"
    if isinstance(phi, Forall):
        return f"(forall {phi.var} {format_formula(phi.body)})"
    raise FormulaError(f"Неизвестный узел формулы: {phi!r}")


def _tokenize(text: str) -> List[str]:
    return re.findall(r"[()]|[^()\s]+", text)


def _parse_var(token: str, position: int) -> int:
    if not token.isdigit():
        raise FormulaSyntaxError(f"Ожидался индекс переменной, получено {token!r}", position)
    return int(token)


def _parse_expr(tokens: List[str], pos: int) -> Tuple[Formula, int]:
    if pos >= len(tokens):
        raise FormulaSyntaxError("Неожиданный конец формулы", pos)
    if tokens[pos] != "(":
        raise FormulaSyntaxError(f"Ожидалась '(' , получено {tokens[pos]!r}", pos)
    pos += 1
    if pos >= len(tokens) or tokens[pos] in "()":
        raise FormulaSyntaxError("Ожидалась голова s-выражения", pos)
    head = tokens[pos]
    pos += 1

    if head in ("and", "or", "not", "exists", "forall"):
        var = None
        if head in ("exists", "forall"):
            if pos >= len(tokens):
                raise FormulaSyntaxError("Неожиданный конец формулы", pos)
            var = _parse_var(tokens[pos], pos)
            pos += 1
        children = []
        while pos < len(tokens) and tokens[pos] != ")":
            child, pos = _parse_expr(tokens, pos)
            children.append(child)
        if pos >= len(tokens):
            raise FormulaSyntaxError("Не хватает ')'", pos)
        pos += 1
        if head in ("and", "or"):
            if not children:
                raise FormulaSyntaxError(f"Пустая связка '{head}': используйте (= 0 0) или (!= 0 0)", pos)
            return (And(tuple(children)) if head == "and" else Or(tuple(children))), pos
        if len(children) != 1:
            raise FormulaSyntaxError(f"'{head}' ожидает ровно одну подформулу", pos)
        if head == "not":
            return Not(children[0]), pos
        return (Exists(var, children[0]) if head == "exists" else Forall(var, children[0])), pos

    args = []
    while pos < len(tokens) and tokens[pos] not in "()":
        args.append(_parse_var(tokens[pos], pos))
        pos += 1
    if pos >= len(tokens) or tokens[pos] != ")":
        raise FormulaSyntaxError("Аргументы атома должны быть индексами переменных", pos)
    pos += 1
    if head in ("=", "!="):
        if len(args) != 2:
            raise FormulaSyntaxError(f"'{head}' ожидает два аргумента", pos)
        return (Eq(*args) if head == "=" else Neq(*args)), pos
    if not args:
        raise FormulaSyntaxError(f"Атом {head!r} без аргументов", pos)
    if head.startswith("!"):
        return NegRel(head[1:], tuple(args)), pos
    return Rel(head, tuple(args)), pos


def parse_formula(text: str) -> Formula:
    """
    Разобрать формулу из s-выражения:
    (= i j), (!= i j), (R i j ...), (!R i j ...), (not f), (and f ...), (or f ...), (exists i f), (forall i f).
    """
    tokens = _tokenize(text)
    formula, pos = _parse_expr(tokens, 0)
    if pos != len(tokens):
        raise FormulaSyntaxError(f"Лишние токены после формулы: {tokens[pos:]}", pos)
    return formula


# ============================================
# Случайные формулы
# ============================================

class FormulaSampler:
    """
    Случайное блуждание по грамматике с бюджетом ранга.

    Вероятности берутся из config (SAMPLER_*), результат детерминирован seed.
    """

    def __init__(self, sig: Signature, seed: int, fragment: FragmentTag = FragmentTag.POSITIVE,
                 max_vars: int = 2):
        if max_vars < 1:
            raise FormulaError("max_vars должно быть ≥ 1")
        self.sig = sig
        self.rng = random.Random(seed)
        self.fragment = fragment
        self.max_vars = max_vars
        self.p_quantifier = config.SAMPLER_P_QUANTIFIER
        self.p_connective = config.SAMPLER_P_CONNECTIVE
        self.p_equality = config.SAMPLER_P_EQUALITY
        self.p_negation = config.SAMPLER_P_NEGATION
        self.max_width = max(2, config.SAMPLER_MAX_WIDTH)
        self.max_depth = config.SAMPLER_MAX_DEPTH

    def sample(self, max_rank: int, scope: Sequence[int]) -> Formula:
        """
        Одна формула ранга ≤ max_rank со свободными переменными из scope.

        Бюджет уменьшен на |scope|: ∃-замыкание результата имеет ранг ≤ max_rank.
        """
        scope = tuple(sorted(set(scope)))
        return self._gen(max(0, max_rank - len(scope)), scope, 0)

    def _gen(self, budget: int, scope: Tuple[int, ...], depth: int) -> Formula:
        phi = self._gen_positive(budget, scope, depth)
        if self.fragment is FragmentTag.FULL_FO and self.rng.random() < self.p_negation:
            return Not(phi)
        return phi

    def _gen_positive(self, budget: int, scope: Tuple[int, ...], depth: int) -> Formula:
        r = self.rng.random()
        if budget > 0 and (not scope or r < self.p_quantifier):
            fresh = [v for v in range(self.max_vars) if v not in scope]
            var = fresh[0] if fresh else self.rng.randrange(self.max_vars)
            body = self._gen(budget - 1, tuple(sorted(set(scope) | {var})), depth)
            return Exists(var, body) if self.rng.random() < 0.5 else Forall(var, body)
        if depth < self.max_depth and r < self.p_quantifier + self.p_connective:
            width = self.rng.randint(2, self.max_width)
            items = tuple(self._gen(budget, scope, depth + 1) for _ in range(width))
            return And(items) if self.rng.random() < 0.5 else Or(items)
        return self._atom(scope)

    def _atom(self, scope: Tuple[int, ...]) -> Formula:
        if not scope:
            return TRUE if self.rng.random() < 0.5 else FALSE
        if not self.sig.relations or self.rng.random() < self.p_equality:
            i, j = self.rng.choice(scope), self.rng.choice(scope)
            return Eq(i, j) if self.rng.random() < 0.5 else Neq(i, j)
        name, arity = self.rng.choice(self.sig.relations)
        args = tuple(self.rng.choice(scope) for _ in range(arity))
        if self.fragment is FragmentTag.FULL_FO and self.rng.random() < 0.5:
            return NegRel(name, args)
        return Rel(name, args)


def sample_formulas(sig: Signature, fragment: FragmentTag, max_rank: int, max_vars: int,
                    count: int, seed: int, sentences: bool = False) -> List[Formula]:
    """
    Выборка формул заданного фрагмента.

    Args:
        sig: Сигнатура
        fragment: POSITIVE, NEGATIVE (двойственные к позитивным) или FULL_FO
        max_rank: Максимальный ранг кванторов
        max_vars: Переменные v0..v{max_vars-1}
        count: Число формул
        seed: Seed
        sentences: Генерировать предложения (без свободных переменных)
    """
    base = FragmentTag.POSITIVE if fragment is FragmentTag.NEGATIVE else fragment
    sampler = FormulaSampler(sig, seed, base, max_vars)
    scope = () if sentences else tuple(range(max_vars))
    result = [sampler.sample(max_rank, scope) for _ in range(count)]
    if fragment is FragmentTag.NEGATIVE:
        result = [neg_dual(phi) for phi in result]
    return result


def sample_positive_formulas(sig: Signature, max_rank: int, max_vars: int, count: int, seed: int) -> List[Formula]:
    """Позитивные формулы ранга ≤ max_rank со свободными переменными среди v0..v{max_vars-1}."""
    return sample_formulas(sig, FragmentTag.POSITIVE, max_rank, max_vars, count, seed)


def sample_positive_sentences(sig: Signature, max_rank: int, max_vars: int, count: int, seed: int) -> List[Formula]:
    return sample_formulas(sig, FragmentTag.POSITIVE, max_rank, max_vars, count, seed, sentences=True)


def sample_negative_sentences(sig: Signature, max_rank: int, max_vars: int, count: int, seed: int) -> List[Formula]:
    return sample_formulas(sig, FragmentTag.NEGATIVE, max_rank, max_vars, count, seed, sentences=True)
