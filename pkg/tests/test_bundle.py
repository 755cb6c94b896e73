from fractions import Fraction
from types import SimpleNamespace

import pytest

from conftest import constant_projection, one_angle_projection, two_angle_projection
from starmod.core.algebras import AlgebraDescriptor, constant, element, monomial, zero
from starmod.core.bundle import (
    BIMODULE_LAWS,
    METRIC_LAWS,
    ClassicalProjection,
    CocycleData,
    HermitianForm,
    bimodule_suite,
    check_fullness,
    conjugate_projection,
    corner_project,
    deform_projection,
    endo_left_act,
    endo_product,
    equivalence_suite,
    hermitian_metric,
    metric_suite,
    module_equivalence,
    module_right_act,
    projection_direct_sum,
    solve_two_chart_cocycle,
    verify_cocycle,
)
from starmod.core.errors import (
    IndeterminateError,
    InconsistencyError,
    MembershipError,
    NoEquivalenceError,
    PreconditionError,
    UnsupportedOperationError,
)
from starmod.core.matrix import StarMatrix, mat_adjoint, mat_star_mul, star_inverse
from starmod.core.sampling import Sampler
from starmod.core.star import moyal_star, perturbed_star

K = 4
THETAS = [0, 1, Fraction(1, 2)]
CORPUS_NAMES = ["constant", "one-angle", "two-angle", "block", "direct-sum"]


@pytest.mark.parametrize("theta", THETAS)
@pytest.mark.parametrize("name", CORPUS_NAMES)
def test_deformed_projection_is_idempotent(corpus, name, theta):
    descriptor = AlgebraDescriptor.torus(theta)
    builder, _ = corpus[name]
    P0 = builder(descriptor)
    D = deform_projection(P0, moyal_star(descriptor, K))
    assert D.idempotency_defect() is None
    assert D.P.classical() == P0.grid
    assert D.hermitian
    assert mat_adjoint(D.P) == D.P
    if theta == 0:
        assert D.P == P0.lift(D.star)


def test_one_angle_projection_needs_no_correction(torus):
    P0 = one_angle_projection(torus)
    D = deform_projection(P0, moyal_star(torus, K))
    assert D.P.is_classical()


def test_two_angle_projection_is_genuinely_deformed(torus):
    P0 = two_angle_projection(torus)
    D = deform_projection(P0, moyal_star(torus, K))
    assert any(not f.is_zero() for row in D.P.order_part(1) for f in row)


def test_deformation_on_the_plane(plane):
    P0 = constant_projection(plane)
    D = deform_projection(P0, moyal_star(plane, K))
    assert D.P == P0.lift(D.star)
    assert D.idempotency_defect() is None


def test_non_idempotent_rejected(torus):
    with pytest.raises(PreconditionError):
        ClassicalProjection([[constant(torus, 2)]])


def test_hermitian_flag_checked(torus):
    with pytest.raises(PreconditionError):
        ClassicalProjection(
            [[constant(torus, 1), monomial(torus, (1, 0))], [zero(torus), zero(torus)]],
            hermitian=True,
        )


def test_non_hermitian_projection_is_still_deformed(torus):
    P0 = ClassicalProjection([[constant(torus, 1), monomial(torus, (1, 0))], [zero(torus), zero(torus)]])
    D = deform_projection(P0, moyal_star(torus, K))
    assert D.idempotency_defect() is None
    assert not D.hermitian
    with pytest.raises(UnsupportedOperationError):
        HermitianForm(D.module())


def test_direct_sum_of_deformations(torus):
    star = moyal_star(torus, K)
    D = deform_projection(two_angle_projection(torus), star)
    E = deform_projection(constant_projection(torus), star)
    S = projection_direct_sum(D, E)
    assert S.size == 4
    assert S.idempotency_defect() is None


@pytest.mark.parametrize("name, rank", [("constant", 1), ("two-angle", 1), ("block", 2), ("direct-sum", 2)])
def test_fullness_from_constant_trace(corpus, torus, name, rank):
    builder, _ = corpus[name]
    report = check_fullness(builder(torus))
    assert report.full
    assert report.rank == rank


def test_fullness_of_zero_projection(torus):
    report = check_fullness(ClassicalProjection([[zero(torus)]]))
    assert not report.full
    assert report.rank == 0


def test_fullness_with_nilpotent_off_diagonal(plane):
    x = monomial(plane, (1, 0))
    P0 = ClassicalProjection([[constant(plane, 1), x], [zero(plane), zero(plane)]])
    assert check_fullness(P0).full
    idempotent = ClassicalProjection([[constant(plane, 1), zero(plane)], [x, zero(plane)]])
    assert check_fullness(idempotent).rank == 1


def test_module_membership(torus):
    star = moyal_star(torus, K)
    D = deform_projection(two_angle_projection(torus), star)
    module = D.module()
    phi = module.basis_column(1)
    assert module.contains(phi.column)
    assert module.element(phi.column) == phi
    outside = StarMatrix.column(star, [star.zero(), star.unit()])
    with pytest.raises(MembershipError):
        module.element(outside)


def test_right_action_stays_in_module(torus):
    star = moyal_star(torus, K)
    D = deform_projection(two_angle_projection(torus), star)
    module = D.module()
    phi = module.basis_column(2)
    moved = module_right_act(phi, star.lift(monomial(torus, (0, 1))))
    assert module.contains(moved.column)


def test_corner_membership_checked(torus):
    star = moyal_star(torus, K)
    D = deform_projection(constant_projection(torus), star)
    outside = StarMatrix.unit(star, 2, 2, 2)
    with pytest.raises(MembershipError):
        endo_product(outside, D.P, D)
    inside = corner_project(StarMatrix.scalar(star, 2, 5), D)
    assert endo_product(inside, D.P, D) == inside


@pytest.mark.parametrize("name, count", [("constant", 20), ("one-angle", 20), ("direct-sum", 20), ("two-angle", 2)])
def test_bimodule_laws(corpus, torus, name, count):
    builder, _ = corpus[name]
    D = deform_projection(builder(torus), moyal_star(torus, K))
    report = bimodule_suite(D, Sampler(21), count)
    assert [c.name for c in report.checks] == list(BIMODULE_LAWS)
    assert report.passed, [(c.name, c.first_failing_order) for c in report.checks]


@pytest.mark.parametrize("name, count", [("constant", 20), ("one-angle", 20), ("two-angle", 2)])
def test_metric_laws(corpus, torus, name, count):
    builder, _ = corpus[name]
    D = deform_projection(builder(torus), moyal_star(torus, K))
    report = metric_suite(D, Sampler(22), count)
    assert [c.name for c in report.checks] == list(METRIC_LAWS)
    assert report.passed, [(c.name, c.first_failing_order) for c in report.checks]


def test_metric_is_positive_on_basis_column(torus):
    D = deform_projection(constant_projection(torus), moyal_star(torus, K))
    phi = D.module().basis_column(1)
    assert hermitian_metric(phi, phi, D) == D.star.unit()


def _conjugators(star, descriptor):
    lifted = StarMatrix.identity(star, 2) + StarMatrix.unit(star, 2, 1, 2).shift(1)
    monomial_diag = StarMatrix.from_classical(star, [
        [monomial(descriptor, (1, 0)), zero(descriptor)],
        [zero(descriptor), monomial(descriptor, (0, 1))],
    ])
    return {"lambda-unipotent": lifted, "monomial-diagonal": monomial_diag}


@pytest.mark.parametrize("conjugator", ["lambda-unipotent", "monomial-diagonal"])
@pytest.mark.parametrize("name", ["constant", "one-angle"])
def test_module_equivalence_against_conjugated_deformation(corpus, torus, name, conjugator):
    star = moyal_star(torus, K)
    builder, _ = corpus[name]
    D = deform_projection(builder(torus), star)
    U = _conjugators(star, torus)[conjugator]
    conjugated = conjugate_projection(D, U)
    direct = deform_projection(conjugated.classical, star)
    E = module_equivalence(direct, conjugated)
    assert E.intertwining_defect() is None
    assert E.V.classical() == StarMatrix.identity(star, 2).classical()
    assert equivalence_suite(E, Sampler(5), 5).passed


def test_module_equivalence_of_identical_deformations_is_identity(torus):
    D = deform_projection(two_angle_projection(torus), moyal_star(torus, K))
    E = module_equivalence(D, D)
    assert E.V == StarMatrix.identity(D.star, 2)


def test_module_equivalence_inverse(torus):
    star = moyal_star(torus, K)
    D = deform_projection(constant_projection(torus), star)
    U = StarMatrix.identity(star, 2) + StarMatrix.unit(star, 2, 1, 2).shift(1)
    E = module_equivalence(D, conjugate_projection(D, U))
    back = E.inverse()
    assert mat_star_mul(back.V, E.V) == StarMatrix.identity(star, 2)
    assert back.intertwining_defect() is None


def test_module_equivalence_needs_same_classical_limit(torus):
    star = moyal_star(torus, K)
    D = deform_projection(constant_projection(torus), star)
    E = deform_projection(one_angle_projection(torus), star)
    with pytest.raises(NoEquivalenceError):
        module_equivalence(D, E)


# Čech cocycles


def _transition(star, descriptor, sampler):
    base = StarMatrix.from_classical(star, [
        [monomial(descriptor, (1, 0)), monomial(descriptor, (1, 1))],
        [zero(descriptor), monomial(descriptor, (0, -1))],
    ])
    noise = StarMatrix(star, [[sampler.series(descriptor, star.order, max_terms=1) for _ in range(2)]
                              for _ in range(2)])
    return base + noise.shift(1)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_two_chart_solver_passes(torus, seed):
    star = moyal_star(torus, K)
    C = solve_two_chart_cocycle(_transition(star, torus, Sampler(seed)), charts=("U", "V"))
    report = verify_cocycle(C, star)
    assert report.passed
    assert [c.name for c in report.checks] == ["pair U,V", "pair V,U"]


@pytest.mark.parametrize("order", [1, 2, 3])
def test_perturbed_entry_detected_at_its_order(torus, order):
    star = moyal_star(torus, K)
    C = solve_two_chart_cocycle(_transition(star, torus, Sampler(4)))
    C.overlaps[("a", "b")] = C.overlaps[("a", "b")] + StarMatrix.unit(star, 2, 2, 1).shift(order)
    report = verify_cocycle(C, star)
    assert not report.passed
    assert report.check("pair a,b").first_failing_order == order


def test_three_chart_cocycle(torus):
    star = moyal_star(torus, K)
    sampler = Sampler(6)
    ab = _transition(star, torus, sampler)
    bc = StarMatrix.identity(star, 2) + StarMatrix.unit(star, 2, 1, 2).shift(1)
    ba, cb = star_inverse(ab), star_inverse(bc)
    ca = star_inverse(mat_star_mul(ab, bc))
    ac = star_inverse(ca)
    C = CocycleData(
        ["a", "b", "c"],
        {("a", "b"): ab, ("b", "a"): ba, ("b", "c"): bc, ("c", "b"): cb, ("c", "a"): ca, ("a", "c"): ac},
        [("a", "b", "c")],
    )
    assert verify_cocycle(C, star).passed


def test_cocycle_classical_consistency(torus):
    star = moyal_star(torus, K)
    with pytest.raises(InconsistencyError):
        CocycleData(["a", "b"], {("a", "b"): StarMatrix.scalar(star, 2, 2), ("b", "a"): StarMatrix.identity(star, 2)})
    with pytest.raises(InconsistencyError):
        CocycleData(["a"], {("a", "b"): StarMatrix.identity(star, 2)})


def test_cocycle_under_perturbed_product(torus):
    star = moyal_star(torus, K)
    C = solve_two_chart_cocycle(_transition(star, torus, Sampler(8)))
    assert not verify_cocycle(C, perturbed_star(torus, K)).passed



def test_non_constant_trace_is_indeterminate(plane):
    fake = SimpleNamespace(trace=lambda: element(plane, {(0, 0): 1, (1, 1): 1}))
    with pytest.raises(IndeterminateError):
        check_fullness(fake)
    fractional = SimpleNamespace(trace=lambda: constant(plane, Fraction(3, 2)))
    with pytest.raises(IndeterminateError):
        check_fullness(fractional)


def test_projected_columns_are_members(torus):
    star = moyal_star(torus, K)
    D = deform_projection(two_angle_projection(torus), star)
    module = D.module()
    phi = module.project(StarMatrix.column(star, [star.unit(), star.lift(monomial(torus, (0, 1)))]))
    assert module.contains(phi.column)


def test_corner_algebra_acts_on_module(torus):
    star = moyal_star(torus, K)
    D = deform_projection(one_angle_projection(torus), star)
    module = D.module()
    phi = module.basis_column(1)
    A = corner_project(StarMatrix.from_classical(star, [
        [monomial(torus, (0, 1)), zero(torus)],
        [zero(torus), constant(torus, 2)],
    ]), D)
    moved = endo_left_act(A, phi, D)
    assert module.contains(moved.column)
    assert endo_left_act(D.P, phi, D) == phi


def test_sum_of_squares_reproduces_metric(torus):
    D = deform_projection(two_angle_projection(torus), moyal_star(torus, K))
    h = HermitianForm(D.module())
    phi = D.module().basis_column(2)
    factors = h.sum_of_squares(phi)
    assert len(factors) == 2
    star = D.star
    total = star.zero()
    for f in factors:
        total = total + star.multiply(f.conjugate(), f)
    assert total == hermitian_metric(phi, phi, D)
    assert not total.is_zero()
