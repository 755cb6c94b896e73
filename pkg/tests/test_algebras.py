from fractions import Fraction

import pytest

from starmod.core.algebras import (
    AlgebraDescriptor,
    alg_conjugate,
    alg_derive,
    alg_integrate,
    constant,
    derive_multi,
    element,
    monomial,
    poisson_bracket,
    unit_inverse,
)
from starmod.core.errors import (
    DescriptorMismatchError,
    IndexRangeError,
    PreconditionError,
    SingularError,
    UnsupportedOperationError,
)
from starmod.core.scalars import GaussianRational, I
from starmod.core.series import FormalSeries, ScalarSeries, first_difference


def test_descriptor_rejects_odd_dimension():
    with pytest.raises(PreconditionError, match="dim must be even"):
        AlgebraDescriptor.plane([[0, 1, 0], [-1, 0, 0], [0, 0, 0]])


def test_descriptor_rejects_symmetric_tensor():
    with pytest.raises(PreconditionError):
        AlgebraDescriptor.plane([[0, 1], [1, 0]])


def test_canonical_plane_pairs():
    d = AlgebraDescriptor.canonical_plane(2)
    assert d.dim == 4
    assert (1, 3, Fraction(1)) in d.poisson_pairs()
    assert (3, 1, Fraction(-1)) in d.poisson_pairs()


def test_theta_only_on_torus(plane):
    with pytest.raises(UnsupportedOperationError):
        plane.theta


def test_torus_derivative(torus):
    f = monomial(torus, (2, -1), 3)
    assert alg_derive(f, 1) == monomial(torus, (2, -1), GaussianRational(0, 6))
    assert alg_derive(f, 2) == monomial(torus, (2, -1), GaussianRational(0, -3))


def test_plane_derivative(plane):
    f = element(plane, {(2, 1): 5, (0, 3): 1})
    assert alg_derive(f, 1) == monomial(plane, (1, 1), 10)
    assert derive_multi(f, (0, 3)) == constant(plane, 6)


def test_direction_out_of_range(plane):
    with pytest.raises(IndexRangeError):
        alg_derive(monomial(plane, (1, 0)), 3)


def test_negative_plane_exponent(plane):
    with pytest.raises(IndexRangeError):
        monomial(plane, (-1, 0))


def test_conjugation_flips_modes(torus):
    f = monomial(torus, (1, 2), I)
    assert alg_conjugate(f) == monomial(torus, (-1, -2), -I)


def test_torus_integral_is_zero_mode(torus):
    f = element(torus, {(0, 0): 3, (1, 0): 7})
    assert alg_integrate(f) == 3


def test_plane_has_no_integral(plane):
    with pytest.raises(UnsupportedOperationError):
        alg_integrate(constant(plane, 1))


def test_poisson_bracket_of_coordinates(plane):
    x, p = monomial(plane, (1, 0)), monomial(plane, (0, 1))
    assert poisson_bracket(x, p) == constant(plane, 1)
    assert poisson_bracket(p, x) == constant(plane, -1)


def test_mixed_descriptors_rejected(torus, plane):
    with pytest.raises(DescriptorMismatchError):
        constant(torus, 1) + constant(plane, 1)


def test_unit_inverse(torus, plane):
    assert unit_inverse(monomial(torus, (1, -2), 2)) == monomial(torus, (-1, 2), Fraction(1, 2))
    with pytest.raises(SingularError):
        unit_inverse(element(torus, {(0, 0): 1, (1, 0): 1}))
    with pytest.raises(SingularError):
        unit_inverse(monomial(plane, (1, 0)))


def test_series_shift_and_difference(torus):
    f = FormalSeries.from_element(monomial(torus, (1, 0)), 3)
    shifted = f.shift(2)
    assert shifted.first_nonzero_order() == 2
    assert first_difference(f, f + shifted) == 2
    assert first_difference(f, f) is None
    assert f.shift(4).is_zero()


def test_series_truncation_mismatch(torus):
    with pytest.raises(DescriptorMismatchError):
        FormalSeries.zero(torus, 2) + FormalSeries.zero(torus, 3)


def test_scalar_series_strings():
    s = ScalarSeries.of([1, Fraction(-1, 2), GaussianRational(0, 1)])
    assert s.to_strings() == ["1", "-1/2", "i"]
    assert (s - s).first_nonzero_order() is None
