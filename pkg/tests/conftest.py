"""Общие фикстуры: A2 (тождественная эквивалентность) и B2 (один класс из двух элементов)."""

import pytest

from structure import Signature, FiniteStructure, StructurePair

R2 = Signature.of(("R", 2))


def make_a2() -> FiniteStructure:
    return FiniteStructure.build(R2, 2, {"R": [(0, 0), (1, 1)]})


def make_b2() -> FiniteStructure:
    return FiniteStructure.build(R2, 2, {"R": [(0, 0), (0, 1), (1, 0), (1, 1)]})


@pytest.fixture
def a2():
    return make_a2()


@pytest.fixture
def b2():
    return make_b2()


@pytest.fixture
def ab(a2, b2):
    """𝕏 = A2, 𝕐 = B2: конденсируемая пара."""
    return StructurePair(a2, b2)


@pytest.fixture
def ba(a2, b2):
    """𝕏 = B2, 𝕐 = A2: неконденсируемая пара."""
    return StructurePair(b2, a2)
