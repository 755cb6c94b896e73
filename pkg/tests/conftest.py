"""Shared fixtures: algebras, star products and the projection corpus."""

from fractions import Fraction

import pytest

from starmod.core.algebras import AlgebraDescriptor, constant, element, zero
from starmod.core.bundle import ClassicalProjection, classical_direct_sum
from starmod.core.scalars import GaussianRational
from starmod.core.star import moyal_star

QUARTER = Fraction(1, 4)
PLUS_I4 = GaussianRational(0, QUARTER)
MINUS_I4 = GaussianRational(0, -QUARTER)


@pytest.fixture
def torus():
    return AlgebraDescriptor.torus(1)


@pytest.fixture
def half_torus():
    return AlgebraDescriptor.torus(Fraction(1, 2))


@pytest.fixture
def commutative_torus():
    return AlgebraDescriptor.torus(0)


@pytest.fixture
def plane():
    return AlgebraDescriptor.canonical_plane(1)


@pytest.fixture
def plane4():
    return AlgebraDescriptor.canonical_plane(2)


@pytest.fixture
def torus_star(torus):
    return moyal_star(torus, 4)


def constant_projection(descriptor):
    """diag(1, 0)."""
    return ClassicalProjection(
        [[constant(descriptor, 1), zero(descriptor)], [zero(descriptor), zero(descriptor)]],
        hermitian=True,
    )


def one_angle_projection(descriptor):
    """½ + ½[[cos 2q₁, sin 2q₁], [sin 2q₁, −cos 2q₁]]; depends on q₁ only."""
    return ClassicalProjection(
        [
            [element(descriptor, {(0, 0): Fraction(1, 2), (2, 0): QUARTER, (-2, 0): QUARTER}),
             element(descriptor, {(2, 0): MINUS_I4, (-2, 0): PLUS_I4})],
            [element(descriptor, {(2, 0): MINUS_I4, (-2, 0): PLUS_I4}),
             element(descriptor, {(0, 0): Fraction(1, 2), (2, 0): -QUARTER, (-2, 0): -QUARTER})],
        ],
        hermitian=True,
    )


def two_angle_projection(descriptor):
    """v v* for v = (cos q₁, e^{iq₂} sin q₁)."""
    return ClassicalProjection(
        [
            [element(descriptor, {(0, 0): Fraction(1, 2), (2, 0): QUARTER, (-2, 0): QUARTER}),
             element(descriptor, {(2, -1): MINUS_I4, (-2, -1): PLUS_I4})],
            [element(descriptor, {(2, 1): MINUS_I4, (-2, 1): PLUS_I4}),
             element(descriptor, {(0, 0): Fraction(1, 2), (2, 0): -QUARTER, (-2, 0): -QUARTER})],
        ],
        hermitian=True,
    )


def block_projection(descriptor):
    """4×4 block diag(two-angle, diag(0, 1))."""
    lower = ClassicalProjection(
        [[zero(descriptor), zero(descriptor)], [zero(descriptor), constant(descriptor, 1)]],
        hermitian=True,
    )
    return classical_direct_sum(two_angle_projection(descriptor), lower)


def sum_projection(descriptor):
    """one-angle ⊕ constant."""
    return classical_direct_sum(one_angle_projection(descriptor), constant_projection(descriptor))


CORPUS = {
    "constant": (constant_projection, 1),
    "one-angle": (one_angle_projection, 1),
    "two-angle": (two_angle_projection, 1),
    "block": (block_projection, 2),
    "direct-sum": (sum_projection, 2),
}


@pytest.fixture
def corpus():
    """name -> (builder, classical rank)."""
    return CORPUS
