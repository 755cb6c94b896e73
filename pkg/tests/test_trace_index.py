from fractions import Fraction

import pytest

from conftest import constant_projection, one_angle_projection, two_angle_projection
from starmod.core.algebras import AlgebraDescriptor, constant, monomial, zero
from starmod.core.bundle import deform_projection, projection_direct_sum
from starmod.core.errors import UnsupportedOperationError
from starmod.core.matrix import StarMatrix
from starmod.core.sampling import Sampler
from starmod.core.scalars import ONE
from starmod.core.series import FormalSeries
from starmod.core.star import moyal_star
from starmod.core.trace_index import (
    cyclicity_check,
    cyclicity_suite,
    index,
    index_invariance_check,
    trace_functional,
)

K = 4


def test_trace_functional_reads_zero_modes(torus):
    f = FormalSeries(torus, 2, [constant(torus, 3), monomial(torus, (1, 0)), constant(torus, Fraction(1, 2))])
    assert trace_functional(f).to_strings() == ["3", "0", "1/2"]


def test_trace_functional_needs_torus(plane):
    with pytest.raises(UnsupportedOperationError):
        trace_functional(FormalSeries.zero(plane, 2))


@pytest.mark.parametrize("theta", [1, Fraction(1, 2)])
def test_cyclicity_on_random_pairs(theta):
    star = moyal_star(AlgebraDescriptor.torus(theta), K)
    report = cyclicity_suite(star, Sampler(17), 50)
    assert report.passed
    assert report.conventions == {"normalization": "unit-volume"}


def test_cyclicity_of_noncommuting_monomials(torus_star, torus):
    A = StarMatrix.from_classical(torus_star, [[monomial(torus, (1, 0))]])
    B = StarMatrix.from_classical(torus_star, [[monomial(torus, (-1, 1))]])
    assert cyclicity_check(A, B) is None


@pytest.mark.parametrize("name", ["constant", "one-angle", "two-angle", "block", "direct-sum"])
def test_index_order_zero_is_rank(corpus, torus, name):
    builder, rank = corpus[name]
    value = index(deform_projection(builder(torus), moyal_star(torus, K)))
    assert value.classical == rank
    assert value.rank == rank
    assert value.series.order == K


def test_index_of_two_angle_projection(torus):
    value = index(deform_projection(two_angle_projection(torus), moyal_star(torus, K)))
    assert value.series[0] == ONE
    assert len(value.to_strings()) == K + 1


def test_index_is_additive(torus):
    star = moyal_star(torus, K)
    D = deform_projection(two_angle_projection(torus), star)
    E = deform_projection(one_angle_projection(torus), star)
    assert index(projection_direct_sum(D, E)) == index(D) + index(E)


def _conjugators(star, descriptor):
    shear = StarMatrix.identity(star, 2) + StarMatrix.unit(star, 2, 1, 2).shift(1)
    diagonal = StarMatrix.from_classical(star, [
        [monomial(descriptor, (1, 0)), zero(descriptor)],
        [zero(descriptor), monomial(descriptor, (0, 1))],
    ])
    mixed = StarMatrix.from_classical(star, [
        [constant(descriptor, 1), monomial(descriptor, (1, 1))],
        [zero(descriptor), monomial(descriptor, (-1, 0), 2)],
    ]) + StarMatrix.unit(star, 2, 2, 1, 3).shift(2)
    return [shear, diagonal, mixed]


@pytest.mark.parametrize("which", [0, 1, 2])
def test_index_invariant_under_conjugation(torus, which):
    star = moyal_star(torus, K)
    D = deform_projection(one_angle_projection(torus), star)
    report = index_invariance_check(D, _conjugators(star, torus)[which])
    assert report.passed
    assert report.original == report.conjugated


def test_index_invariance_of_constant_projection(torus):
    star = moyal_star(torus, K)
    D = deform_projection(constant_projection(torus), star)
    report = index_invariance_check(D, _conjugators(star, torus)[2])
    assert report.first_failing_order is None
    assert report.original.to_strings() == ["1", "0", "0", "0", "0"]
