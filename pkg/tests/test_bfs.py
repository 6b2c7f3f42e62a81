"""Тесты систем «туда-обратно»: проверка (e1)/(e2), наибольшая система, построение конденсации."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bfs import (
    BfsSystem,
    ExtensionFailure,
    InvalidMemberError,
    LazyBfsSystem,
    PreconditionError,
    certificate_holds,
    extend_to_condensation,
    find_bad_certificate,
    is_restriction_closed,
    maximal_bfs,
    restriction_closure,
    reversibility_witness,
    verify_bfs,
)
from condensation import CondensationWitness, decide_condensable
from conftest import R2
from games import enumerate_partial_condensations
from structure import FiniteStructure, StructurePair, generate_random, omega_chain

IDENTITY_RESTRICTIONS = [(), ((0, 0),), ((1, 1),), ((0, 0), (1, 1))]


def test_restrictions_of_identity_form_a_bfs(ab):
    assert verify_bfs(ab, IDENTITY_RESTRICTIONS) is None


def test_singleton_empty_system_fails_e1(ab):
    counterexample = verify_bfs(ab, [()])
    assert (counterexample.member, counterexample.element, counterexample.clause) == ((), 0, "e1")
    assert "e1" in counterexample.message


def test_empty_system_is_reported(ab):
    assert verify_bfs(ab, []).clause == "nonempty"


def test_non_partial_member_is_invalid(ba):
    with pytest.raises(InvalidMemberError):
        verify_bfs(ba, [((0, 0), (1, 1))])


@pytest.mark.parametrize("members", [
    [()],
    [(), ((0, 0),), ((1, 1),)],
    "all",
])
def test_no_bfs_from_b2_to_a2(ba, members):
    if members == "all":
        members = enumerate_partial_condensations(ba)
    assert verify_bfs(ba, members) is not None


def test_maximal_bfs(ab, ba):
    system = maximal_bfs(ab)
    assert len(system) == 7
    assert system.closed
    assert ((0, 1), (1, 0)) in system
    assert maximal_bfs(ba) is None


def test_extend_to_identity(ab):
    run = extend_to_condensation(ab, maximal_bfs(ab), ())
    assert run.witness == CondensationWitness((0, 1))
    assert [step.clause for step in run.steps] == ["e1", "e2"]
    assert run.steps[1].added == ((1, 1),)


def test_extension_from_a_given_seed(ab):
    system = BfsSystem(frozenset(IDENTITY_RESTRICTIONS))
    run = extend_to_condensation(ab, system, [(1, 1)])
    assert run.witness.mapping == (0, 1)


def test_extension_preconditions(ab):
    system = BfsSystem(frozenset(IDENTITY_RESTRICTIONS))
    with pytest.raises(PreconditionError):
        extend_to_condensation(ab, system, [(0, 1)])
    lazy = StructurePair(omega_chain(), omega_chain())
    with pytest.raises(PreconditionError):
        extend_to_condensation(lazy, LazyBfsSystem(lambda f: True, lambda f, x: None, lambda f, y: None), ())


def test_extension_failure_is_reported(ab):
    with pytest.raises(ExtensionFailure):
        extend_to_condensation(ab, BfsSystem(frozenset({()})), ())


def test_lazy_identity_on_omega_chain():
    chain = omega_chain()
    pair = StructurePair(chain, chain)
    system = LazyBfsSystem(
        contains=lambda f: all(x == y for x, y in f),
        extend_left=lambda f, x: (f + ((x, x),), "forth"),
        extend_right=lambda f, y: (f + ((y, y),), "back"),
    )
    run = extend_to_condensation(pair, system, (), budget=6)
    assert run.pairs == tuple((k, k) for k in range(6))
    assert run.histogram() == {"back": 3, "forth": 3}
    assert run.witness is None


def test_restriction_closure():
    closure = restriction_closure([((0, 0), (1, 1))])
    assert closure == frozenset(IDENTITY_RESTRICTIONS)
    assert is_restriction_closed(closure)
    assert not is_restriction_closed([((0, 0), (1, 1))])


def test_bad_certificate():
    s = FiniteStructure.build(R2, 2, {"R": [(0, 0)]})
    bad = find_bad_certificate(s, [(1, 0)])
    assert (bad.relation, bad.tuple, bad.image) == ("R", (1, 1), (0, 0))
    assert certificate_holds(s, bad, [(1, 0), (0, 1)])
    assert not certificate_holds(s, bad, [(1, 1)])
    assert find_bad_certificate(s, [(0, 0)]) is None


def test_finite_structures_have_no_reversibility_witness():
    s = FiniteStructure.build(R2, 2, {"R": [(0, 0)]})
    bad = find_bad_certificate(s, [(1, 0)])
    with pytest.raises(PreconditionError):
        reversibility_witness(s, BfsSystem(frozenset({bad.pairs})), bad, 5)


@pytest.mark.property_based
@given(st.integers(0, 3), st.integers(0, 2 ** 32), st.integers(0, 2 ** 32))
@settings(max_examples=80, deadline=None)
def test_maximal_bfs_is_a_bfs_and_matches_search(n, seed_x, seed_y):
    pair = StructurePair(generate_random(R2, n, 0.5, seed_x), generate_random(R2, n, 0.5, seed_y))
    system = maximal_bfs(pair)
    assert (system is not None) == isinstance(decide_condensable(pair), CondensationWitness)
    if system is not None:
        assert verify_bfs(pair, system.members) is None
        assert verify_bfs(pair, restriction_closure(system.members)) is None
        run = extend_to_condensation(pair, system, ())
        assert run.witness is not None
