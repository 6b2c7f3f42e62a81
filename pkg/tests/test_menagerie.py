"""Тесты структур-свидетелей: класс 𝒞, стратегия Σ, построитель конденсаций, пример I, случайный порядок."""

import pytest

from condensation import NotCondensable, check_partial, decide_condensable, PartialCondensation
from conftest import R2
from games import solve_game, verify_strategy
from logic import model_check, quantifier_rank
from menagerie import (
    CLASS_C_PRESETS,
    ClassCSpec,
    CondensationObstruction,
    InconsistentSpecError,
    OMEGA,
    POSET_SIG,
    PosetRequestRejected,
    RandomPosetOracle,
    StrategyPreconditionError,
    build_class_c,
    check_class_c_truncation,
    claim_condensation_builder,
    claim_strategy_sigma,
    classify_class_c,
    equivalence_classes,
    equivalence_problems,
    example_I_equal_size,
    example_I_witnesses,
    find_bad_pair,
    iter_class_keys,
    load_preset,
    phi_k,
    poset_nonreversibility,
    predict_bicondensable,
    predict_condensable,
    psi_size_two,
    random_poset,
    strict_order_problems,
)
from structure import FiniteStructure, LazyStructure, StructurePair, explore

FIN = CLASS_C_PRESETS["classC-fin"]
OMEGA_SPEC = CLASS_C_PRESETS["classC-omega"]


# ---- класс 𝒞 ----

def test_spec_validation():
    with pytest.raises(InconsistentSpecError):
        ClassCSpec(3, (1,))
    with pytest.raises(InconsistentSpecError):
        ClassCSpec(-1)
    with pytest.raises(InconsistentSpecError):
        ClassCSpec.from_dict({"finite_class_sizes": 5})


def test_spec_json_and_size():
    spec = ClassCSpec(2, (3,))
    assert spec.is_finite and spec.size == 5
    assert ClassCSpec.from_dict(spec.to_dict()) == spec
    assert spec.to_json() == '{"singletons":2,"finite_class_sizes":[3],"infinite_classes":0,"unbounded_sizes":false}'
    assert FIN.size is None


def test_layout_round_robin():
    keys = [key for key, _ in zip(iter_class_keys(FIN), range(6))]
    assert keys == [("single", 0), ("fin", 0), ("single", 1), ("fin", 0), ("single", 2), ("fin", 1)]
    finite = list(iter_class_keys(ClassCSpec(2, (3,))))
    assert finite == [("single", 0), ("fin", 0), ("single", 1), ("fin", 0), ("fin", 0)]


def test_finite_spec_builds_whole_structure():
    s = build_class_c(ClassCSpec(2, (3,)))
    assert isinstance(s, FiniteStructure)
    assert equivalence_classes(s) == [[0], [1, 3, 4], [2]]


def test_lazy_and_level_prefixes_agree():
    lazy = build_class_c(OMEGA_SPEC)
    assert isinstance(lazy, LazyStructure)
    assert explore(lazy, 7) == build_class_c(OMEGA_SPEC, 7)
    assert equivalence_classes(build_class_c(OMEGA_SPEC, 7)) == [[0], [1, 3, 5], [2], [4], [6]]


def test_level_caps_finite_spec():
    assert build_class_c(ClassCSpec(1, (2,)), 10).n == 3


def test_equivalence_problems():
    broken = FiniteStructure.build(R2, 3, {"R": [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2)]})
    assert equivalence_problems(broken)
    assert equivalence_problems(FiniteStructure.build(R2, 2, {"R": [(0, 0)]}))
    assert equivalence_problems(build_class_c(FIN, 20)) == []


def test_truncation_conditions():
    assert check_class_c_truncation(build_class_c(OMEGA_SPEC, 7), 3) == []
    problems = check_class_c_truncation(build_class_c(OMEGA_SPEC, 3), 3)
    assert len(problems) == 1 and "(𝒞2)" in problems[0]
    assert len(check_class_c_truncation(build_class_c(OMEGA_SPEC, 2), 3)) == 2


def test_classification_and_predictions():
    assert classify_class_c(FIN) == "fin"
    assert classify_class_c(OMEGA_SPEC) == "omega"
    assert classify_class_c(ClassCSpec(3, (2,))) is None
    assert predict_condensable(FIN, OMEGA_SPEC)
    assert not predict_condensable(OMEGA_SPEC, FIN)
    assert predict_condensable(FIN, FIN)
    assert predict_bicondensable(OMEGA_SPEC, ClassCSpec(OMEGA, (2,), 2, True))
    with pytest.raises(InconsistentSpecError):
        predict_condensable(ClassCSpec(3), FIN)


# ---- стратегия Σ ----

@pytest.mark.parametrize("rounds", [1, 2, 3])
def test_sigma_wins_every_line(rounds):
    left = build_class_c(FIN, 7)
    right = build_class_c(OMEGA_SPEC, 7)
    pair = StructurePair(left, right)
    sigma = claim_strategy_sigma(left, right, rounds)
    assert verify_strategy(pair, sigma, rounds) == []
    assert solve_game(pair, rounds).ii_wins


def test_sigma_preconditions():
    with pytest.raises(StrategyPreconditionError):
        claim_strategy_sigma(build_class_c(OMEGA_SPEC, 2), build_class_c(OMEGA_SPEC, 7), 3)
    with pytest.raises(StrategyPreconditionError):
        claim_strategy_sigma(build_class_c(FIN, 7), build_class_c(ClassCSpec(7), 7), 2)


# ---- построитель конденсаций ----

def test_builder_infinite_class_branch():
    result = claim_condensation_builder(FIN, OMEGA_SPEC, 12)
    assert result.branch == "infinite-class"
    assert len(result.pairs) == 12
    assert result.pairs[:3] == ((0, 0), (1, 1), (2, 2))
    prefix = StructurePair(result.left.prefix, result.right.prefix)
    assert isinstance(check_partial(prefix, result.pairs), PartialCondensation)


def test_builder_greedy_branch():
    result = claim_condensation_builder(FIN, ClassCSpec(OMEGA, (3, 5), 0, True), 12)
    assert result.branch == "greedy"
    assert len(result.pairs) == 12
    assert result.choices[:2] == [(0, 0), (1, 1)]
    assert set(result.run.histogram()) <= {"singleton", "class"}


def test_builder_obstruction():
    with pytest.raises(CondensationObstruction):
        claim_condensation_builder(OMEGA_SPEC, FIN, 10)
    with pytest.raises(InconsistentSpecError):
        claim_condensation_builder(ClassCSpec(3, (2,)), FIN, 10)


def test_obstruction_is_visible_on_finite_truncations():
    # класс из 4 элементов не помещается в классы размера ≤ 3
    x = build_class_c(ClassCSpec(5, (4,)))
    y = build_class_c(ClassCSpec(6, (3,)))
    assert isinstance(decide_condensable(StructurePair(x, y)), NotCondensable)
    assert not isinstance(decide_condensable(StructurePair(y, x)), NotCondensable)


# ---- пример I ----

def test_example_I_verdicts():
    witnesses = example_I_witnesses(4)
    assert witnesses.all_hold
    assert witnesses.left.n == 9 and witnesses.right.n == 8
    with pytest.raises(InconsistentSpecError):
        example_I_witnesses(2)


def test_phi_k_and_psi(b2):
    assert [quantifier_rank(phi_k(k)) for k in (1, 2, 4)] == [1, 2, 4]
    assert model_check(b2, phi_k(1))
    assert model_check(b2, phi_k(2))
    assert not model_check(b2, phi_k(3))
    assert not model_check(FiniteStructure.build(R2, 0), phi_k(1))
    b2_plus = FiniteStructure.build(R2, 3, {"R": [(0, 0), (0, 1), (1, 0), (1, 1), (2, 2)]})
    a2_plus = FiniteStructure.build(R2, 3, {"R": [(0, 0), (1, 1), (2, 2)]})
    assert model_check(b2_plus, psi_size_two())
    assert not model_check(a2_plus, psi_size_two())


def test_example_I_equal_size_is_not_condensable_backwards():
    left, right = example_I_equal_size(4)
    assert left.n == right.n == 9
    assert isinstance(decide_condensable(StructurePair(right, left)), NotCondensable)


# ---- случайный частичный порядок ----

def test_strict_order_problems():
    chain = FiniteStructure.build(POSET_SIG, 3, {"<": [(0, 1), (1, 2), (0, 2)]})
    assert strict_order_problems(chain) == []
    assert strict_order_problems(FiniteStructure.build(POSET_SIG, 2, {"<": [(0, 0)]}))
    assert strict_order_problems(FiniteStructure.build(POSET_SIG, 2, {"<": [(0, 1), (1, 0)]}))
    assert strict_order_problems(FiniteStructure.build(POSET_SIG, 3, {"<": [(0, 1), (1, 2)]}))


def test_oracle_requests():
    oracle = RandomPosetOracle.from_relation(3, [(0, 1), (1, 2), (0, 2)])
    z = oracle.request_between({0}, {2})
    assert oracle.less(0, z) and oracle.less(z, 2)
    below = oracle.request_below({0})
    assert oracle.less(below, 0) and oracle.less(below, 2)
    above = oracle.request_above({1})
    assert oracle.less(2, above) is False and oracle.less(0, above)
    isolated = oracle.request_incomparable({0, 1})
    assert all(oracle.incomparable(isolated, e) for e in range(isolated))
    assert oracle.requests == {"between": 1, "below": 1, "above": 1, "incomparable": 1}
    assert oracle.check_strict_order() == []


def test_oracle_rejects_inconsistent_requests():
    oracle = RandomPosetOracle.from_relation(2, [])
    with pytest.raises(PosetRequestRejected):
        oracle.request_between({0}, {1})
    with pytest.raises(PosetRequestRejected):
        oracle.request_below({5})
    with pytest.raises(PosetRequestRejected):
        oracle.request_above(set())
    assert oracle.size == 2
    with pytest.raises(PosetRequestRejected):
        RandomPosetOracle.from_relation(2, [(0, 1), (1, 0)])


def test_generic_extensions_stay_strict_orders_and_are_deterministic():
    first = random_poset(3)
    second = random_poset(3)
    assert first.explore(40) == second.explore(40)
    assert first.check_strict_order() == []


def test_bad_pair_certificate():
    oracle = random_poset(11)
    oracle.explore(6)
    bad = find_bad_pair(oracle)
    a0, a1 = bad.tuple
    b0, b1 = bad.image
    assert oracle.incomparable(a0, a1)
    assert oracle.less(b0, b1)
    assert set(bad.pairs) == {(a0, b0), (a1, b1)}


def test_poset_nonreversibility_200_steps():
    result = poset_nonreversibility(3, 200)
    assert result.ok
    assert result.evidence.checked_steps == 200
    histogram = result.evidence.histogram()
    assert sum(histogram.values()) == 200
    assert set(histogram) <= {"case1", "case2", "case3", "case4", "back"}
    assert histogram.get("back") == 100


def test_presets():
    assert isinstance(load_preset("classC-fin"), LazyStructure)
    assert isinstance(load_preset("random-poset", 4), RandomPosetOracle)
    assert load_preset("example-I").k == 4
    with pytest.raises(InconsistentSpecError):
        load_preset("rado")
