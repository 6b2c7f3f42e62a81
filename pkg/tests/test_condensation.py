"""Тесты частичных конденсаций, поиска ≼_c / ∼_c и обратимости конечных структур."""

import itertools

import networkx as nx
import pytest
from networkx.algorithms.isomorphism import DiGraphMatcher
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import R2
from condensation import (
    CondensationError,
    CondensationWitness,
    NotCondensable,
    PartialCondensation,
    ViolationReport,
    check_partial,
    compose,
    decide_bicondensable,
    decide_condensable,
    enumerate_condensations,
    finite_reversibility_sanity,
    is_automorphism,
    is_condensation,
    restrictions,
    witness_from_json,
)
from structure import (
    FiniteStructure,
    Signature,
    StructurePair,
    add_random_tuples,
    enumerate_structures,
    generate_random,
    random_permutation,
)


def test_identity_from_a2_to_b2_is_partial(ab):
    assert check_partial(ab, [(0, 0), (1, 1)]) == PartialCondensation(((0, 0), (1, 1)))


def test_identity_from_b2_to_a2_is_rejected(ba):
    report = check_partial(ba, [(0, 0), (1, 1)])
    assert isinstance(report, ViolationReport)
    assert report.kind == "relation"
    assert report.tuple == (0, 1)
    assert report.image == (0, 1)


def test_empty_map_is_always_partial(ab, ba):
    assert check_partial(ab, []) == PartialCondensation(())
    assert check_partial(ba, []) == PartialCondensation(())


def test_functionality_and_injectivity(ab):
    assert check_partial(ab, [(0, 0), (0, 1)]).kind == "equality"
    assert check_partial(ab, [(0, 1), (1, 1)]).kind == "inequality"


def test_duplicate_pairs_are_collapsed(ab):
    assert check_partial(ab, [(1, 1), (0, 0), (1, 1)]).pairs == ((0, 0), (1, 1))


def test_out_of_range_is_an_error(ab):
    with pytest.raises(CondensationError):
        check_partial(ab, [(0, 5)])


def test_decide_condensable_examples(a2, b2, ab, ba):
    witness = decide_condensable(ab)
    assert isinstance(witness, CondensationWitness)
    assert witness.mapping == (0, 1)
    refusal = decide_condensable(ba)
    assert isinstance(refusal, NotCondensable)
    assert refusal.reason == "exhaustion"
    assert decide_condensable(StructurePair(a2, a2)).mapping == (0, 1)


def test_cardinality_mismatch(a2):
    three = FiniteStructure.build(R2, 3)
    verdict = decide_condensable(StructurePair(a2, three))
    assert isinstance(verdict, NotCondensable)
    assert verdict.reason == "cardinality"


def test_bicondensability(a2, b2, ab):
    result = decide_bicondensable(ab)
    assert not result.bicondensable
    assert result.failing_direction == "Y->X"
    assert decide_bicondensable(StructurePair(a2, a2)).bicondensable
    assert decide_bicondensable(StructurePair(b2, b2.permute([1, 0]))).bicondensable


def test_isomorphic_copies_are_bicondensable():
    s = FiniteStructure.build(R2, 3, {"R": [(0, 1), (1, 2), (2, 2)]})
    assert decide_bicondensable(StructurePair(s, s.permute([2, 0, 1]))).bicondensable


def test_finite_reversibility_of_a2_and_b2(a2, b2):
    for s in (a2, b2):
        proof = finite_reversibility_sanity(s)
        assert set(proof.condensations) == {(0, 1), (1, 0)}
        assert proof.automorphisms == proof.condensations


def test_is_condensation_and_automorphism(ab, b2):
    assert is_condensation(ab, [1, 0])
    assert not is_condensation(ab, [0, 0])
    assert is_automorphism(b2, [1, 0])
    assert compose([1, 0], [1, 0]) == (0, 1)


def _grown_copy(s: FiniteStructure, seed: int) -> FiniteStructure:
    return add_random_tuples(s, 0.3, seed).permute(random_permutation(s.n, seed + 1))


@pytest.mark.property_based
@given(st.integers(0, 5), st.integers(0, 2 ** 32), st.integers(0, 2 ** 32), st.integers(0, 2 ** 32))
@settings(max_examples=100, deadline=None)
def test_condensations_compose(n, seed_x, seed_y, seed_z):
    x = generate_random(R2, n, 0.4, seed_x)
    y = _grown_copy(x, seed_y)
    z = _grown_copy(y, seed_z)
    f = decide_condensable(StructurePair(x, y))
    g = decide_condensable(StructurePair(y, z))
    assert isinstance(f, CondensationWitness)
    assert isinstance(g, CondensationWitness)
    composite = compose(f.mapping, g.mapping)
    result = check_partial(StructurePair(x, z), enumerate(composite))
    assert isinstance(result, PartialCondensation)
    assert len(result.pairs) == n


def test_witness_restrictions_are_partial(ab):
    witness = decide_condensable(ab)
    f = check_partial(ab, witness.pairs)
    assert len(list(restrictions(f))) == 4
    assert all(isinstance(check_partial(ab, g.pairs), PartialCondensation) for g in restrictions(f))


def test_witness_json():
    assert witness_from_json("[[1,0],[0,1]]").pairs == ((0, 1), (1, 0))
    with pytest.raises(CondensationError):
        witness_from_json('{"x": 1}')


def _brute_force(pair):
    return any(is_condensation(pair, perm) for perm in itertools.permutations(range(pair.left.n)))


@pytest.mark.property_based
@given(st.integers(0, 4), st.integers(0, 2 ** 32), st.integers(0, 2 ** 32), st.floats(0.1, 0.9))
@settings(max_examples=150, deadline=None)
def test_search_matches_brute_force(n, seed_x, seed_y, density):
    sig = Signature.of(("R", 2), ("S", 1))
    pair = StructurePair(generate_random(sig, n, density, seed_x), generate_random(sig, n, density, seed_y))
    verdict = decide_condensable(pair)
    assert isinstance(verdict, CondensationWitness) == _brute_force(pair)
    if isinstance(verdict, CondensationWitness):
        assert is_condensation(pair, verdict.mapping)
        f = check_partial(pair, verdict.pairs)
        assert all(isinstance(check_partial(pair, g.pairs), PartialCondensation) for g in restrictions(f))


def test_search_matches_brute_force_on_all_pairs_of_size_two():
    corpus = list(enumerate_structures(R2, 2))
    for left, right in itertools.product(corpus, repeat=2):
        pair = StructurePair(left, right)
        assert isinstance(decide_condensable(pair), CondensationWitness) == _brute_force(pair)
        assert len(list(enumerate_condensations(pair))) == sum(
            is_condensation(pair, perm) for perm in itertools.permutations(range(2))
        )


@pytest.mark.slow
def test_finite_reversibility_on_all_structures_up_to_four():
    for n in range(0, 5):
        for s in enumerate_structures(R2, n):
            finite_reversibility_sanity(s)


def _as_digraph(s: FiniteStructure) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(s.universe)
    graph.add_edges_from(s.relation("R"))
    return graph


@pytest.mark.parametrize("n", [1, 2, 3])
def test_automorphisms_match_graph_matcher(n):
    for s in itertools.islice(enumerate_structures(R2, n), 0, None, 7):
        graph = _as_digraph(s)
        expected = {tuple(m[i] for i in range(n)) for m in DiGraphMatcher(graph, graph).isomorphisms_iter()}
        assert set(finite_reversibility_sanity(s).automorphisms) == expected
