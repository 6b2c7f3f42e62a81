"""Тесты логики: фрагменты, ранг, выполнимость, двойственность, разбор s-выражений, генератор."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import R2
from logic import (
    And,
    Eq,
    Exists,
    FALSE,
    Forall,
    FormulaError,
    FormulaSyntaxError,
    FragmentTag,
    NegRel,
    Neq,
    Not,
    Or,
    Rel,
    TRUE,
    UncoveredVariableError,
    all_valuations,
    close_existentially,
    format_formula,
    fragment_of,
    free_variables,
    in_fragment,
    model_check,
    neg_dual,
    negative_below,
    parse_formula,
    pn_equivalent,
    positive_below,
    preserves_along,
    quantifier_rank,
    sample_formulas,
    sample_negative_sentences,
    sample_positive_formulas,
    sample_positive_sentences,
)
from structure import enumerate_structures

# ∃v0∃v1(¬v0=v1 ∧ R(v0,v1))
TWO_RELATED = Exists(0, Exists(1, And((Neq(0, 1), Rel("R", (0, 1))))))


def test_two_related_on_b2_and_a2(a2, b2):
    assert model_check(b2, TWO_RELATED) is True
    assert model_check(a2, TWO_RELATED) is False


def test_free_variables_and_rank():
    phi = And((Rel("R", (0, 1)), Exists(1, Forall(2, Rel("R", (1, 2))))))
    assert free_variables(phi) == {0, 1}
    assert quantifier_rank(phi) == 2
    assert free_variables(Eq(3, 3)) == set()
    assert quantifier_rank(Not(TWO_RELATED)) == 2


def test_fragment_tags():
    assert fragment_of(TWO_RELATED) is FragmentTag.POSITIVE
    assert fragment_of(neg_dual(TWO_RELATED)) is FragmentTag.NEGATIVE
    assert fragment_of(Not(Rel("R", (0, 0)))) is FragmentTag.FULL_FO
    assert fragment_of(And((Rel("R", (0, 1)), NegRel("R", (1, 0))))) is FragmentTag.FULL_FO
    # только равенства: лежит в обоих фрагментах
    eq_only = Exists(0, Exists(1, Neq(0, 1)))
    assert in_fragment(eq_only, FragmentTag.POSITIVE)
    assert in_fragment(eq_only, FragmentTag.NEGATIVE)
    assert fragment_of(eq_only) is FragmentTag.POSITIVE


def test_neg_dual_shape():
    assert neg_dual(TWO_RELATED) == Forall(0, Forall(1, Or((Eq(0, 1), NegRel("R", (0, 1))))))
    assert neg_dual(Not(Rel("R", (0, 0)))) == Rel("R", (0, 0))
    assert neg_dual(TRUE) == FALSE


def test_uncovered_variable_is_an_error(a2):
    with pytest.raises(UncoveredVariableError):
        model_check(a2, Rel("R", (0, 1)), {0: 0})


def test_unknown_relation_is_an_error(a2):
    with pytest.raises(FormulaError):
        model_check(a2, Exists(0, Rel("S", (0,))))


def test_valuation_out_of_range_is_an_error(a2):
    with pytest.raises(FormulaError):
        model_check(a2, Rel("R", (0, 0)), {0: 5})


def test_close_existentially():
    phi = Rel("R", (1, 0))
    closed = close_existentially(phi)
    assert closed == Exists(0, Exists(1, phi))
    assert free_variables(closed) == set()


def test_parse_and_format():
    text = "(exists 0 (exists 1 (and (!= 0 1) (R 0 1))))"
    assert parse_formula(text) == TWO_RELATED
    assert format_formula(TWO_RELATED) == text
    assert parse_formula("(forall 2 (or (= 2 0) (!R 2 0)))") == Forall(2, Or((Eq(2, 0), NegRel("R", (2, 0)))))
    assert parse_formula("(not (R 0 0))") == Not(Rel("R", (0, 0)))
    assert parse_formula("(and (R 0 1))") == And((Rel("R", (0, 1)),))
    assert format_formula(parse_formula("(or (= 0 1))")) == "(or (= 0 1))"


@pytest.mark.parametrize("text", [
    "(R 0 1",
    "(exists x (R 0 0))",
    "(not (R 0 0) (R 1 1))",
    "(R 0 1) extra",
    "(= 0)",
    "()",
    "(and)",
    "(or)",
])
def test_parse_errors(text):
    with pytest.raises(FormulaSyntaxError):
        parse_formula(text)


def test_positive_preservation_samples(a2, b2):
    sentences = sample_positive_sentences(R2, 2, 2, 200, 5)
    assert all(in_fragment(phi, FragmentTag.POSITIVE) for phi in sentences)
    # A2 ≼_c B2: позитивные предложения переносятся A2 → B2
    assert positive_below(a2, b2, sentences) is None
    assert positive_below(b2, a2, [TWO_RELATED]) == TWO_RELATED


def test_negative_preservation_samples(a2, b2):
    sentences = sample_negative_sentences(R2, 2, 2, 200, 6)
    assert all(in_fragment(phi, FragmentTag.NEGATIVE) for phi in sentences)
    assert negative_below(b2, a2, sentences) is None


def test_fragment_is_enforced(a2, b2):
    with pytest.raises(FormulaError):
        positive_below(a2, b2, [Not(TWO_RELATED)])
    with pytest.raises(FormulaError):
        negative_below(b2, a2, [TWO_RELATED])


def test_pn_equivalent_finds_separator(a2, b2):
    assert pn_equivalent(a2, b2, [TWO_RELATED], []) == TWO_RELATED
    assert pn_equivalent(a2, a2, [TWO_RELATED], [neg_dual(TWO_RELATED)]) is None


def test_preserves_along_identity(a2, b2):
    mapping = {0: 0, 1: 1}
    assert preserves_along(a2, b2, mapping, Rel("R", (0, 1))) is None
    assert preserves_along(b2, a2, mapping, Rel("R", (0, 1))) == {0: 0, 1: 1}


def test_sampler_is_deterministic_and_rank_bounded():
    first = sample_formulas(R2, FragmentTag.FULL_FO, 3, 3, 50, 42)
    assert first == sample_formulas(R2, FragmentTag.FULL_FO, 3, 3, 50, 42)
    assert all(quantifier_rank(phi) <= 3 for phi in first)
    assert all(free_variables(phi) <= {0, 1, 2} for phi in first)
    sentences = sample_formulas(R2, FragmentTag.POSITIVE, 2, 2, 50, 1, sentences=True)
    assert all(not free_variables(phi) for phi in sentences)


def test_sampled_formula_closes_within_rank():
    [phi] = sample_positive_formulas(R2, 2, 1, 1, 9)
    closed = close_existentially(phi)
    assert not free_variables(closed)
    assert quantifier_rank(closed) <= 2


@pytest.mark.parametrize("max_rank, max_vars", [(1, 1), (2, 1), (3, 2), (2, 3)])
def test_closure_rank_bound_over_seeds(max_rank, max_vars):
    for phi in sample_positive_formulas(R2, max_rank, max_vars, 100, 31):
        assert quantifier_rank(phi) <= max_rank
        if max_vars <= max_rank:
            assert quantifier_rank(close_existentially(phi)) <= max_rank


SMALL_STRUCTURES = [s for n in range(0, 3) for s in enumerate_structures(R2, n)]


@pytest.mark.property_based
@given(st.integers(0, 2 ** 32), st.sampled_from(SMALL_STRUCTURES))
@settings(max_examples=200, deadline=None)
def test_duality_pointwise(seed, s):
    phi = sample_formulas(R2, FragmentTag.FULL_FO, 3, 2, 1, seed)[0]
    dual = neg_dual(phi)
    for val in all_valuations(sorted(free_variables(phi)), range(s.n)):
        assert model_check(s, dual, val) == (not model_check(s, phi, val))


@pytest.mark.property_based
@given(st.integers(0, 2 ** 32))
@settings(max_examples=200, deadline=None)
def test_duality_flips_fragments(seed):
    phi = sample_formulas(R2, FragmentTag.POSITIVE, 3, 2, 1, seed)[0]
    assert in_fragment(phi, FragmentTag.POSITIVE)
    assert in_fragment(neg_dual(phi), FragmentTag.NEGATIVE)
    assert neg_dual(neg_dual(phi)) == phi


@pytest.mark.property_based
@given(st.integers(0, 2 ** 32))
@settings(max_examples=100, deadline=None)
def test_format_parse_agree(seed):
    phi = sample_formulas(R2, FragmentTag.FULL_FO, 2, 3, 1, seed)[0]
    assert parse_formula(format_formula(phi)) == phi


DUALITY_FORMULAS = 1000


def _assert_pointwise_duality(formulas, structures):
    for phi in formulas:
        dual = neg_dual(phi)
        variables = sorted(free_variables(phi))
        for s in structures:
            for val in all_valuations(variables, range(s.n)):
                assert model_check(s, dual, val) == (not model_check(s, phi, val))


@pytest.mark.slow
def test_duality_suite_up_to_three_elements():
    formulas = sample_formulas(R2, FragmentTag.FULL_FO, 3, 2, DUALITY_FORMULAS, 2024)
    _assert_pointwise_duality(formulas, [s for n in range(0, 4) for s in enumerate_structures(R2, n)])

    positive = sample_formulas(R2, FragmentTag.POSITIVE, 3, 2, DUALITY_FORMULAS, 2025)
    assert all(in_fragment(phi, FragmentTag.POSITIVE) for phi in positive)
    assert all(in_fragment(neg_dual(phi), FragmentTag.NEGATIVE) for phi in positive)


@pytest.mark.slow
@pytest.mark.exhaustive
def test_duality_suite_on_all_four_element_structures():
    formulas = sample_formulas(R2, FragmentTag.FULL_FO, 3, 2, DUALITY_FORMULAS, 2024)
    _assert_pointwise_duality(formulas, list(enumerate_structures(R2, 4)))
