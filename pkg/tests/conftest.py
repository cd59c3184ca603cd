"""Pytest configuration and shared fixtures."""

from fractions import Fraction

import pytest
from hypothesis import settings

from src.conecert.space import ConeKind, ConeSpec, FiniteProbSpace

# Configure hypothesis for minimum 100 iterations per property test
settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")


@pytest.fixture
def two_atom_space():
    """Two atoms with P0 = (3/5, 2/5)."""
    return FiniteProbSpace(atoms=("w1", "w2"), weights=(Fraction(3, 5), Fraction(2, 5)))


@pytest.fixture
def two_atom_cone(two_atom_space):
    """Convex cone generated by X = (1, -1)."""
    return ConeSpec(space=two_atom_space, generators=(two_atom_space.random_variable([1, -1]),))


@pytest.fixture
def two_atom_linear(two_atom_space):
    """Linear space spanned by X = (1, -1)."""
    return ConeSpec(
        space=two_atom_space,
        generators=(two_atom_space.random_variable([1, -1]),),
        kind=ConeKind.LINEAR,
    )


@pytest.fixture
def arbitrage_cone(two_atom_space):
    """Cone generated by the arbitrage (1, 0)."""
    return ConeSpec(space=two_atom_space, generators=(two_atom_space.random_variable([1, 0]),))
