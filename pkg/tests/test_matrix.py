from fractions import Fraction

import pytest

from conftest import two_angle_projection
from starmod.core.algebras import constant, element, monomial, zero
from starmod.core.errors import DimensionMismatchError, PreconditionError, SingularError
from starmod.core.matrix import (
    StarMatrix,
    classical_inverse,
    classical_product,
    direct_sum,
    mat_adjoint,
    mat_star_mul,
    mat_trace,
    star_inv_sqrt,
    star_inverse,
)
from starmod.core.sampling import Sampler
from starmod.core.scalars import GaussianRational
from starmod.core.series import FormalSeries
from starmod.core.star import moyal_star

K = 4


def _random_matrix(sampler, star, n):
    return StarMatrix(star, [[sampler.series(star.descriptor, star.order) for _ in range(n)] for _ in range(n)])


def test_scalar_example_inverse(torus):
    star = moyal_star(torus, K)
    A = StarMatrix(star, [[FormalSeries(torus, K, [constant(torus, 2), monomial(torus, (1, 0))])]])
    B = star_inverse(A)
    assert B[0, 0][0] == constant(torus, Fraction(1, 2))
    assert B[0, 0][1] == monomial(torus, (1, 0), Fraction(-1, 4))
    assert mat_star_mul(A, B) == StarMatrix.identity(star, 1)
    assert mat_star_mul(B, A) == StarMatrix.identity(star, 1)


def test_inverse_of_lambda_perturbed_identity(torus_star, torus):
    U = StarMatrix.identity(torus_star, 2) + StarMatrix.unit(torus_star, 2, 1, 2).shift(1)
    V = star_inverse(U)
    assert mat_star_mul(U, V) == StarMatrix.identity(torus_star, 2)
    assert V == StarMatrix.identity(torus_star, 2) - StarMatrix.unit(torus_star, 2, 1, 2).shift(1)


def test_inverse_of_monomial_diagonal(torus_star, torus):
    U = StarMatrix.from_classical(torus_star, [
        [monomial(torus, (1, 0)), zero(torus)],
        [zero(torus), monomial(torus, (0, 1))],
    ])
    V = star_inverse(U)
    assert mat_star_mul(U, V) == StarMatrix.identity(torus_star, 2)
    assert mat_star_mul(V, U) == StarMatrix.identity(torus_star, 2)


def test_inverse_with_random_higher_orders(torus_star, torus):
    sampler = Sampler(4)
    U = StarMatrix.from_classical(torus_star, [
        [monomial(torus, (1, 1)), monomial(torus, (0, 2))],
        [zero(torus), constant(torus, 3)],
    ])
    noise = _random_matrix(sampler, torus_star, 2).shift(1)
    U = U + noise
    V = star_inverse(U)
    assert mat_star_mul(U, V) == StarMatrix.identity(torus_star, 2)


def test_singular_order_zero(torus_star, torus):
    U = StarMatrix.from_classical(torus_star, [[element(torus, {(0, 0): 1, (1, 0): 1})]])
    with pytest.raises(SingularError):
        star_inverse(U)


def test_supplied_classical_inverse_is_verified(torus_star, torus):
    U = StarMatrix.identity(torus_star, 2)
    wrong = [[constant(torus, 2), zero(torus)], [zero(torus), constant(torus, 1)]]
    with pytest.raises(SingularError):
        star_inverse(U, wrong)


def test_classical_inverse_faddeev_leverrier(plane):
    x = monomial(plane, (1, 0))
    A = [
        [constant(plane, 1), x, x * x],
        [zero(plane), constant(plane, 1), x],
        [zero(plane), zero(plane), constant(plane, 2)],
    ]
    B = classical_inverse(A)
    identity = [[constant(plane, 1 if i == j else 0) for j in range(3)] for i in range(3)]
    assert classical_product(A, B) == identity
    assert classical_product(B, A) == identity


def test_inverse_square_root_of_central_scalar(torus):
    star = moyal_star(torus, 3)
    c = constant(torus, 1)
    A = StarMatrix(star, [[FormalSeries(torus, 3, [constant(torus, 1), c])]])
    S = star_inv_sqrt(A)
    expected = [1, Fraction(-1, 2), Fraction(3, 8), Fraction(-5, 16)]
    assert [S[0, 0][r] for r in range(4)] == [constant(torus, v) for v in expected]
    assert mat_star_mul(mat_star_mul(S, S), A) == StarMatrix.identity(star, 1)


def test_inverse_square_root_of_noncommuting_matrix(torus):
    star = moyal_star(torus, 3)
    P0 = two_angle_projection(torus).lift(star)
    defect = (mat_star_mul(P0, P0) - P0).scale(4)
    assert not defect.is_zero()
    A = StarMatrix.identity(star, 2) + defect
    S = star_inv_sqrt(A)
    identity = StarMatrix.identity(star, 2)
    assert mat_star_mul(mat_star_mul(S, S), A) == identity
    assert mat_star_mul(A, mat_star_mul(S, S)) == identity
    assert mat_star_mul(S, A) == mat_star_mul(A, S)


def test_inverse_square_root_requires_unit_leading_term(torus_star):
    with pytest.raises(PreconditionError):
        star_inv_sqrt(StarMatrix.scalar(torus_star, 2, 2))


def test_trace_and_adjoint(torus_star, torus):
    A = StarMatrix.from_classical(torus_star, [
        [monomial(torus, (1, 0)), monomial(torus, (0, 1), GaussianRational(0, 1))],
        [zero(torus), constant(torus, 2)],
    ])
    assert mat_trace(A)[0] == element(torus, {(1, 0): 1, (0, 0): 2})
    adjoint = mat_adjoint(A)
    assert adjoint[1, 0][0] == monomial(torus, (0, -1), GaussianRational(0, -1))
    assert mat_adjoint(adjoint) == A


def test_star_product_is_associative_on_matrices(torus_star):
    sampler = Sampler(9)
    A, B, C = (_random_matrix(sampler, torus_star, 2) for _ in range(3))
    assert mat_star_mul(mat_star_mul(A, B), C) == mat_star_mul(A, mat_star_mul(B, C))


def test_shapes_checked(torus_star):
    with pytest.raises(DimensionMismatchError):
        mat_star_mul(StarMatrix.zeros(torus_star, 2, 3), StarMatrix.zeros(torus_star, 2, 3))
    with pytest.raises(DimensionMismatchError):
        mat_trace(StarMatrix.zeros(torus_star, 2, 3))


def test_direct_sum_blocks(torus_star):
    D = direct_sum(StarMatrix.identity(torus_star, 1), StarMatrix.scalar(torus_star, 2, 3))
    assert D.shape == (3, 3)
    assert D == StarMatrix.from_classical(torus_star, [
        [constant(torus_star.descriptor, v) for v in row]
        for row in ([1, 0, 0], [0, 3, 0], [0, 0, 3])
    ])
