"""
Демонстрации на структурах-свидетелях: необратимость случайного порядка,
класс 𝒞 и пример I. Каждая демонстрация возвращает Report.
"""

import logging
import time
from typing import Callable, Dict

import config
from condensation import NotCondensable, decide_condensable
from games import solve_game, verify_strategy
from logic import negative_below, positive_below, sample_negative_sentences, sample_positive_sentences
from menagerie import (
    CLASS_C_PRESETS,
    ClassCSpec,
    CondensationObstruction,
    EQUIVALENCE_SIG,
    OMEGA,
    build_class_c,
    check_class_c_truncation,
    claim_condensation_builder,
    claim_strategy_sigma,
    example_I_equal_size,
    example_I_witnesses,
    poset_nonreversibility,
    predict_condensable,
)
from report import Report
from structure import StructurePair

logger = logging.getLogger(__name__)


class DemoError(ValueError):
    """Неизвестная демонстрация."""


def demo_random_poset(budget: int, seed: int) -> Report:
    """Плохая пара f_0 и budget сертифицированных шагов (e1)/(e2) на случайном порядке."""
    start = time.time()
    result = poset_nonreversibility(config.derive_seed(seed, "random-poset"), budget)
    evidence = result.evidence
    report = Report(f"demo random-poset-nonrev --budget {budget}", seed)
    report.verdicts = {
        "все шаги прошли check_partial": len(evidence.run.steps) == budget,
        "каждый шаг попал в свой случай": not result.case_problems,
        "префикс — строгий порядок": not result.order_problems,
        "сертификат плохой пары сохранён": evidence.checked_steps == budget,
    }
    report.witnesses = {
        "bad": evidence.bad.to_dict(),
        "prefix_size": result.oracle.size,
        "pairs": len(evidence.run.pairs),
    }
    report.stats = {"histogram": evidence.histogram(), "requests": dict(sorted(result.oracle.requests.items()))}
    if result.case_problems or result.order_problems:
        report.stats["problems"] = (result.case_problems + result.order_problems)[:20]
    report.seconds = time.time() - start
    return report


def demo_class_c(budget: int, seed: int) -> Report:
    """
    Класс 𝒞: построитель конденсаций в обеих ветвях, препятствие 𝒞_ω → 𝒞_fin
    и стратегия Σ на усечениях, проверенная случайными линиями игрока I.
    """
    start = time.time()
    fin = CLASS_C_PRESETS["classC-fin"]
    omega = CLASS_C_PRESETS["classC-omega"]
    report = Report(f"demo classC --budget {budget}", seed)

    infinite = claim_condensation_builder(fin, omega, budget)
    greedy = claim_condensation_builder(fin, ClassCSpec(OMEGA, (3, 5), 0, True), budget)
    try:
        claim_condensation_builder(omega, fin, budget)
        obstruction = False
    except CondensationObstruction as e:
        logger.debug("Препятствие: %s", e)
        obstruction = True

    rounds = 3
    left = build_class_c(fin, 12)
    right = build_class_c(omega, 12)
    truncation_ok = not check_class_c_truncation(left, rounds) and not check_class_c_truncation(right, rounds)
    sigma = claim_strategy_sigma(left, right, rounds)
    pair = StructurePair(left, right)
    failures = verify_strategy(pair, sigma, rounds, sample=500, seed=config.derive_seed(seed, "classC"))

    report.verdicts = {
        "ветвь 'бесконечный класс': префикс построен": len(infinite.pairs) == budget,
        "жадная ветвь: префикс построен": len(greedy.pairs) == budget,
        "𝒞_ω → 𝒞_fin: препятствие": obstruction,
        "предсказание ≼_c совпадает": predict_condensable(fin, omega) and not predict_condensable(omega, fin),
        "усечения удовлетворяют (𝒞1)/(𝒞2)": truncation_ok,
        "Σ выигрывает все проверенные линии": not failures,
        "решатель: II выигрывает": solve_game(pair, rounds).ii_wins,
    }
    report.witnesses = {
        "infinite_class": infinite.to_dict()["pairs"],
        "greedy": greedy.to_dict()["pairs"],
        "greedy_choices": [list(c) for c in greedy.choices],
    }
    report.stats = {"sigma_table": len(sigma.table), "lines_checked": 500}
    report.seconds = time.time() - start
    return report


def demo_example_I(budget: int, seed: int) -> Report:
    """Четыре вердикта выполнимости примера I, ≡_℘ на выборке и отсутствие конденсации 𝕐 → 𝕏."""
    start = time.time()
    witnesses = example_I_witnesses()
    report = Report("demo example-I", seed)
    report.verdicts = dict(witnesses.verdicts())

    rank = config.CROSSVAL_SENTENCE_RANK
    count = budget or 200
    positive = sample_positive_sentences(EQUIVALENCE_SIG, rank, rank, count, config.derive_seed(seed, "example-I:p"))
    negative = sample_negative_sentences(EQUIVALENCE_SIG, rank, rank, count, config.derive_seed(seed, "example-I:n"))
    x, y = witnesses.left, witnesses.right
    report.verdicts["X ⪻_℘ Y на выборке"] = positive_below(x, y, positive) is None
    report.verdicts["Y ⪻_℘ X на выборке"] = positive_below(y, x, positive) is None
    report.verdicts["Y ⪻_𝒩 X на выборке"] = negative_below(y, x, negative) is None

    left, right = example_I_equal_size(witnesses.k)
    verdict = decide_condensable(StructurePair(right, left))
    report.verdicts["Y ⋠_c X на равных усечениях"] = isinstance(verdict, NotCondensable)
    report.witnesses = {"k": witnesses.k, "sizes": [x.n, y.n], "equal_size": left.n}
    report.stats = {"sentences": len(positive) + len(negative)}
    report.seconds = time.time() - start
    return report


DEMOS: Dict[str, Callable[[int, int], Report]] = {
    "random-poset-nonrev": demo_random_poset,
    "classC": demo_class_c,
    "example-I": demo_example_I,
}


def run_demo(name: str, budget: int, seed: int) -> Report:
    if name not in DEMOS:
        raise DemoError(f"Неизвестная демонстрация {name!r}; доступны: {', '.join(DEMOS)}")
    return DEMOS[name](budget, seed)
