"""Deformed projections, projective modules, their endomorphism algebra and fiber metric.

A classical projection P₀ is deformed into P with P⋆P = P; the module is P⋆𝒜^N with the
right action given by componentwise ⋆, the endomorphisms are the corner P⋆M_N⋆P with unit P.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from starmod.core.algebras import AlgebraElement, constant, zero
from starmod.core.errors import (
    DescriptorMismatchError,
    DimensionMismatchError,
    IndeterminateError,
    InconsistencyError,
    MembershipError,
    NoEquivalenceError,
    PreconditionError,
    UnsupportedOperationError,
)
from starmod.core.matrix import (
    ClassicalGrid,
    StarMatrix,
    classical_product,
    direct_sum,
    first_matrix_difference,
    mat_adjoint,
    mat_star_mul,
    star_inv_sqrt,
    star_inverse,
)
from starmod.core.reports import CheckReport
from starmod.core.sampling import Sampler
from starmod.core.scalars import HALF
from starmod.core.series import FormalSeries, first_difference
from starmod.core.star import StarProduct
from starmod.infrastructure.config import ORDERING_CONVENTION

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------------------
# Projections
# ---------------------------------------------------------------------------------------


def _grid_adjoint(grid: ClassicalGrid) -> ClassicalGrid:
    n = len(grid)
    return [[grid[j][i].conjugate() for j in range(n)] for i in range(n)]


class ClassicalProjection:
    """Idempotent N×N matrix P₀ over the undeformed algebra.

    With hermitian=True the projection is also checked to be self-adjoint.
    """

    def __init__(self, grid: Sequence[Sequence[AlgebraElement]], hermitian: bool = False) -> None:
        rows = [list(row) for row in grid]
        if not rows or any(len(row) != len(rows) for row in rows):
            raise DimensionMismatchError("A projection must be a non-empty square matrix")
        descriptor = rows[0][0].descriptor
        if any(f.descriptor != descriptor for row in rows for f in row):
            raise DescriptorMismatchError("Projection entries over different algebras")
        if classical_product(rows, rows) != rows:
            raise PreconditionError("P0 is not idempotent under the undeformed product")
        if hermitian and _grid_adjoint(rows) != rows:
            raise PreconditionError("P0 was declared hermitian but P0* != P0")
        self.descriptor = descriptor
        self.grid: ClassicalGrid = rows
        self.hermitian = hermitian

    @property
    def size(self) -> int:
        return len(self.grid)

    def trace(self) -> AlgebraElement:
        total = zero(self.descriptor)
        for i in range(self.size):
            total = total + self.grid[i][i]
        return total

    def is_self_adjoint(self) -> bool:
        return _grid_adjoint(self.grid) == self.grid

    def lift(self, star: StarProduct) -> StarMatrix:
        if star.descriptor != self.descriptor:
            raise DescriptorMismatchError("Projection and star product live on different algebras")
        return StarMatrix.from_classical(star, self.grid)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ClassicalProjection):
            return NotImplemented
        return self.grid == other.grid

    def __hash__(self) -> int:
        return hash(tuple(tuple(row) for row in self.grid))

    def __repr__(self) -> str:
        return f"ClassicalProjection(N={self.size}, hermitian={self.hermitian})"


@dataclass(frozen=True)
class DeformedProjection:
    """P with P⋆P = P mod λ^{K+1} and classical limit P₀."""

    P: StarMatrix
    classical: ClassicalProjection
    star: StarProduct
    hermitian: bool = False

    @property
    def size(self) -> int:
        return self.P.n_rows

    def idempotency_defect(self) -> Optional[int]:
        """First λ-order where P⋆P and P differ."""
        return first_matrix_difference(mat_star_mul(self.P, self.P), self.P)

    def module(self) -> "DeformedModule":
        return DeformedModule(self)


def deform_projection(P0: ClassicalProjection, star: StarProduct) -> DeformedProjection:
    """P = ½ + (P₀ − ½) ⋆ (1 + 4(P₀⋆P₀ − P₀))^{-1/2}."""
    N = P0.size
    P0m = P0.lift(star)
    identity = StarMatrix.identity(star, N)
    delta = (mat_star_mul(P0m, P0m) - P0m).scale(4)
    log.debug(f"deform_projection: N={N}, K={star.order}, classical defect vanishes: {delta.is_zero()}")
    S = star_inv_sqrt(identity + delta)
    half = StarMatrix.scalar(star, N, HALF)
    P = half + mat_star_mul(P0m - half, S)
    return DeformedProjection(P, P0, star, hermitian=P0.hermitian and star.hermitian)


def conjugate_projection(
    D: DeformedProjection, U: StarMatrix, classical_inv: Optional[ClassicalGrid] = None
) -> DeformedProjection:
    """U⋆P⋆U⁻¹ for a star-invertible U; its classical part is U₀P₀U₀⁻¹."""
    if U.star is not D.star and (U.star.descriptor != D.star.descriptor or U.star.order != D.star.order):
        raise DescriptorMismatchError("Conjugating matrix uses a different star product")
    if U.shape != D.P.shape:
        raise DimensionMismatchError(f"Conjugating matrix {U.shape} against projection {D.P.shape}")
    U_inv = star_inverse(U, classical_inv)
    P = mat_star_mul(mat_star_mul(U, D.P), U_inv)
    U0 = U.classical()
    P0 = classical_product(classical_product(U0, D.classical.grid), U_inv.classical())
    hermitian = D.hermitian and mat_adjoint(P) == P
    return DeformedProjection(P, ClassicalProjection(P0, hermitian=hermitian), D.star, hermitian=hermitian)


def classical_direct_sum(P: ClassicalProjection, Q: ClassicalProjection) -> ClassicalProjection:
    if P.descriptor != Q.descriptor:
        raise DescriptorMismatchError("Direct sum of projections over different algebras")
    n, m = P.size, Q.size
    grid = [list(row) + [zero(P.descriptor)] * m for row in P.grid]
    grid += [[zero(P.descriptor)] * n + list(row) for row in Q.grid]
    return ClassicalProjection(grid, hermitian=P.hermitian and Q.hermitian)


def projection_direct_sum(D: DeformedProjection, E: DeformedProjection) -> DeformedProjection:
    """diag(P, Q); idempotent whenever both blocks are."""
    return DeformedProjection(
        direct_sum(D.P, E.P),
        classical_direct_sum(D.classical, E.classical),
        D.star,
        hermitian=D.hermitian and E.hermitian,
    )


@dataclass(frozen=True)
class FullnessReport:
    full: bool
    rank: int


def check_fullness(P0: ClassicalProjection) -> FullnessReport:
    """Full iff tr P₀ is a constant positive integer, which is then the rank."""
    trace = P0.trace()
    if trace.is_zero():
        return FullnessReport(full=False, rank=0)
    if not trace.is_constant():
        raise IndeterminateError(f"Non-constant classical trace {trace!r}: rank is not locally constant data")
    value = trace.constant_value()
    if not value.is_integer() or value.re <= 0:
        raise IndeterminateError(f"Classical trace {value} is not a positive integer")
    return FullnessReport(full=True, rank=int(value.re))


# ---------------------------------------------------------------------------------------
# Module, corner algebra and metric
# ---------------------------------------------------------------------------------------


class ModuleElement:
    """Column φ with P⋆φ = φ; build through DeformedModule.element or .project."""

    __slots__ = ("module", "column")

    def __init__(self, module: "DeformedModule", column: StarMatrix) -> None:
        self.module = module
        self.column = column

    @property
    def components(self) -> List[FormalSeries]:
        return self.column.column_entries()

    def classical(self) -> List[AlgebraElement]:
        return [s[0] for s in self.components]

    def __add__(self, other: "ModuleElement") -> "ModuleElement":
        return ModuleElement(self.module, self.column + other.column)

    def __sub__(self, other: "ModuleElement") -> "ModuleElement":
        return ModuleElement(self.module, self.column - other.column)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModuleElement):
            return NotImplemented
        return self.column == other.column

    def __hash__(self) -> int:
        return hash(self.column)

    def __repr__(self) -> str:
        return f"ModuleElement(N={self.column.n_rows})"


class DeformedModule:
    """The right module P⋆𝒜^N."""

    def __init__(self, projection: DeformedProjection) -> None:
        self.projection = projection

    @property
    def star(self) -> StarProduct:
        return self.projection.star

    def contains(self, column: StarMatrix) -> bool:
        return mat_star_mul(self.projection.P, column) == column

    def element(self, column: StarMatrix) -> ModuleElement:
        if column.shape != (self.projection.size, 1):
            raise DimensionMismatchError(f"Module elements are {self.projection.size}x1 columns, got {column.shape}")
        if not self.contains(column):
            raise MembershipError("Column is not fixed by the projection: P⋆φ != φ")
        return ModuleElement(self, column)

    def project(self, column: StarMatrix) -> ModuleElement:
        """P⋆v, always a member."""
        if column.shape != (self.projection.size, 1):
            raise DimensionMismatchError(f"Module elements are {self.projection.size}x1 columns, got {column.shape}")
        return ModuleElement(self, mat_star_mul(self.projection.P, column))

    def basis_column(self, j: int) -> ModuleElement:
        """j-th column of P (1-based), a member since P⋆P = P."""
        P = self.projection.P
        return ModuleElement(self, StarMatrix.column(P.star, P.column_entries(j - 1)))


def _same_projection(phi: ModuleElement, D: DeformedProjection) -> None:
    if phi.module.projection is not D and phi.module.projection.P != D.P:
        raise MembershipError("Element belongs to the module of a different projection")


def module_right_act(phi: ModuleElement, f: FormalSeries) -> ModuleElement:
    """φ • f, componentwise φᵢ ⋆ f."""
    star = phi.module.star
    return ModuleElement(phi.module, StarMatrix.column(star, [star.multiply(c, f) for c in phi.components]))


def _check_corner(A: StarMatrix, D: DeformedProjection, name: str) -> None:
    if A.shape != D.P.shape:
        raise DimensionMismatchError(f"{name} has shape {A.shape}, projection {D.P.shape}")
    if mat_star_mul(mat_star_mul(D.P, A), D.P) != A:
        raise MembershipError(f"{name} is not in the corner algebra: P⋆{name}⋆P != {name}")


def corner_project(A: StarMatrix, D: DeformedProjection) -> StarMatrix:
    """P⋆A⋆P, an element of the corner algebra."""
    return mat_star_mul(mat_star_mul(D.P, A), D.P)


def endo_product(A: StarMatrix, B: StarMatrix, D: DeformedProjection) -> StarMatrix:
    """A ⋆′ B in the corner algebra with unit P."""
    _check_corner(A, D, "A")
    _check_corner(B, D, "B")
    return mat_star_mul(A, B)


def endo_left_act(A: StarMatrix, phi: ModuleElement, D: DeformedProjection) -> ModuleElement:
    """A •′ φ = A ⋆ φ."""
    _check_corner(A, D, "A")
    _same_projection(phi, D)
    return ModuleElement(phi.module, mat_star_mul(A, phi.column))


def hermitian_metric(phi: ModuleElement, psi: ModuleElement, D: DeformedProjection) -> FormalSeries:
    """h(φ, ψ) = Σᵢ conj(φᵢ) ⋆ ψᵢ."""
    if not D.hermitian:
        raise UnsupportedOperationError("The fiber metric needs a hermitian projection and star product")
    _same_projection(phi, D)
    _same_projection(psi, D)
    star = D.star
    total = star.zero()
    for a, b in zip(phi.components, psi.components):
        total = total + star.multiply(a.conjugate(), b)
    return total


class HermitianForm:
    """The fiber metric of a hermitian deformed module."""

    def __init__(self, module: DeformedModule) -> None:
        if not module.projection.hermitian:
            raise UnsupportedOperationError("The fiber metric needs a hermitian projection and star product")
        self.module = module

    def __call__(self, phi: ModuleElement, psi: ModuleElement) -> FormalSeries:
        return hermitian_metric(phi, psi, self.module.projection)

    def sum_of_squares(self, phi: ModuleElement) -> List[FormalSeries]:
        """Factors fᵢ with h(φ, φ) = Σ conj(fᵢ) ⋆ fᵢ."""
        factors = list(phi.components)
        star = self.module.star
        total = star.zero()
        for f in factors:
            total = total + star.multiply(f.conjugate(), f)
        if total != self(phi, phi):
            raise InconsistencyError("Sum-of-squares factors do not reproduce h(φ, φ)")
        return factors


@dataclass(frozen=True)
class ModuleEquivalence:
    """T(φ) = V⋆φ from the module of `source` to the module of `target`."""

    V: StarMatrix
    source: DeformedProjection
    target: DeformedProjection

    def apply(self, phi: ModuleElement) -> ModuleElement:
        _same_projection(phi, self.source)
        return ModuleElement(self.target.module(), mat_star_mul(self.V, phi.column))

    def intertwining_defect(self) -> Optional[int]:
        """First λ-order where V⋆P and P′⋆V differ."""
        return first_matrix_difference(mat_star_mul(self.V, self.source.P), mat_star_mul(self.target.P, self.V))

    def inverse(self) -> "ModuleEquivalence":
        return ModuleEquivalence(star_inverse(self.V), self.target, self.source)


def module_equivalence(D: DeformedProjection, D_prime: DeformedProjection) -> ModuleEquivalence:
    """V = P′⋆P + (I−P′)⋆(I−P), which satisfies V⋆P = P′⋆V and V = I + O(λ)."""
    if D.star.descriptor != D_prime.star.descriptor or D.star.order != D_prime.star.order:
        raise DescriptorMismatchError("Deformations over different star products")
    if D.size != D_prime.size:
        raise DimensionMismatchError(f"Projections of size {D.size} and {D_prime.size}")
    if D.classical != D_prime.classical:
        raise NoEquivalenceError("Classical projections differ, so the deformations are not comparable")
    P, Q = D.P, D_prime.P
    identity = StarMatrix.identity(D.star, D.size)
    V = mat_star_mul(Q, P) + mat_star_mul(identity - Q, identity - P)
    return ModuleEquivalence(V, D, D_prime)


# ---------------------------------------------------------------------------------------
# Čech cocycles
# ---------------------------------------------------------------------------------------


Overlap = Tuple[str, str]


@dataclass
class CocycleData:
    """Transition matrices Φ_{αβ} on chart overlaps plus the triples to check."""

    chart_ids: List[str]
    overlaps: Dict[Overlap, StarMatrix]
    triples: List[Tuple[str, str, str]] = field(default_factory=list)

    def __post_init__(self) -> None:
        charts = set(self.chart_ids)
        for a, b in self.overlaps:
            if a not in charts or b not in charts:
                raise InconsistencyError(f"Overlap ({a}, {b}) names an unknown chart")
        for a, b, c in self.triples:
            for pair in ((a, b), (b, c), (c, a)):
                if pair not in self.overlaps:
                    raise InconsistencyError(f"Triple ({a}, {b}, {c}) needs the overlap {pair}")
        self._check_classical()

    def _check_classical(self) -> None:
        for (a, b), M in self.overlaps.items():
            if (b, a) not in self.overlaps or a == b:
                continue
            product = classical_product(M.classical(), self.overlaps[(b, a)].classical())
            if product != _classical_identity_like(M):
                raise InconsistencyError(f"Order-0 matrices on ({a}, {b}) do not form a classical cocycle")
        for a, b, c in self.triples:
            product = classical_product(
                classical_product(self.overlaps[(a, b)].classical(), self.overlaps[(b, c)].classical()),
                self.overlaps[(c, a)].classical(),
            )
            if product != _classical_identity_like(self.overlaps[(a, b)]):
                raise InconsistencyError(f"Order-0 matrices on ({a}, {b}, {c}) do not form a classical cocycle")

    def pairs(self) -> List[Overlap]:
        """Ordered pairs (α, β) whose reverse overlap is present too."""
        return [(a, b) for (a, b) in self.overlaps if a != b and (b, a) in self.overlaps]


def _classical_identity_like(M: StarMatrix) -> ClassicalGrid:
    descriptor = M.star.descriptor
    return [[constant(descriptor, 1 if i == j else 0) for j in range(M.n_rows)] for i in range(M.n_rows)]


def verify_cocycle(C: CocycleData, star: StarProduct) -> CheckReport:
    """Φ_{αβ}⋆Φ_{βα} = 𝟙 per pair and Φ_{αβ}⋆Φ_{βγ}⋆Φ_{γα} = 𝟙 per triple."""
    matrices = {pair: StarMatrix(star, M.entries) for pair, M in C.overlaps.items()}
    report = CheckReport("cocycle", conventions={"ordering": ORDERING_CONVENTION})
    for a, b in C.pairs():
        M = matrices[(a, b)]
        identity = StarMatrix.identity(star, M.n_rows)
        check = report.add(f"pair {a},{b}")
        check.record(first_matrix_difference(mat_star_mul(M, matrices[(b, a)]), identity), (a, b))
    for a, b, c in C.triples:
        M = matrices[(a, b)]
        identity = StarMatrix.identity(star, M.n_rows)
        product = mat_star_mul(mat_star_mul(M, matrices[(b, c)]), matrices[(c, a)])
        check = report.add(f"triple {a},{b},{c}")
        check.record(first_matrix_difference(product, identity), (a, b, c))
    log.info(f"Cocycle check: {len(report.checks)} identities, passed={report.passed}")
    return report


def solve_two_chart_cocycle(
    Phi_ab: StarMatrix,
    classical_inv: Optional[ClassicalGrid] = None,
    charts: Tuple[str, str] = ("a", "b"),
) -> CocycleData:
    """Two-chart cocycle with Φ_{βα} = star_inverse(Φ_{αβ})."""
    a, b = charts
    Phi_ba = star_inverse(Phi_ab, classical_inv)
    return CocycleData([a, b], {(a, b): Phi_ab, (b, a): Phi_ba})


# ---------------------------------------------------------------------------------------
# Randomized law suites
# ---------------------------------------------------------------------------------------

BIMODULE_LAWS = (
    "right-associativity",
    "right-unit",
    "corner-associativity",
    "corner-unit",
    "bimodule-compatibility",
)
METRIC_LAWS = ("metric-linearity", "metric-symmetry", "metric-adjoint", "metric-sum-of-squares")


def _random_series(sampler: Sampler, star: StarProduct) -> FormalSeries:
    return sampler.series(star.descriptor, star.order, max_terms=1)


def _random_column(sampler: Sampler, star: StarProduct, n: int) -> StarMatrix:
    return StarMatrix.column(star, [_random_series(sampler, star) for _ in range(n)])


def _random_matrix(sampler: Sampler, star: StarProduct, n: int) -> StarMatrix:
    return StarMatrix(star, [[_random_series(sampler, star) for _ in range(n)] for _ in range(n)])


def _column_difference(a: ModuleElement, b: ModuleElement) -> Optional[int]:
    return first_matrix_difference(a.column, b.column)


def bimodule_suite(D: DeformedProjection, sampler: Sampler, count: int) -> CheckReport:
    """Right-module, corner-algebra and compatibility laws on random data."""
    star, N = D.star, D.size
    module = D.module()
    report = CheckReport("bimodule", conventions={"ordering": star.convention})
    right_assoc, right_unit, corner_assoc, corner_unit, compat = (report.add(n) for n in BIMODULE_LAWS)
    unit = star.unit()
    for i in range(count):
        phi = module.project(_random_column(sampler, star, N))
        f, g = _random_series(sampler, star), _random_series(sampler, star)
        A = corner_project(_random_matrix(sampler, star, N), D)
        B = corner_project(_random_matrix(sampler, star, N), D)
        witness = (i,)

        right_assoc.record(
            _column_difference(module_right_act(module_right_act(phi, f), g),
                               module_right_act(phi, star.multiply(f, g))),
            witness,
        )
        right_unit.record(_column_difference(module_right_act(phi, unit), phi), witness)
        corner_assoc.record(
            _column_difference(endo_left_act(endo_product(A, B, D), phi, D),
                               endo_left_act(A, endo_left_act(B, phi, D), D)),
            witness,
        )
        corner_unit.record(_column_difference(endo_left_act(D.P, phi, D), phi), witness)
        compat.record(
            _column_difference(endo_left_act(A, module_right_act(phi, f), D),
                               module_right_act(endo_left_act(A, phi, D), f)),
            witness,
        )
        log.debug(f"bimodule_suite: sample {i + 1}/{count}")
    return report


def metric_suite(D: DeformedProjection, sampler: Sampler, count: int) -> CheckReport:
    """Fiber-metric laws and the sum-of-squares identity on random data."""
    star, N = D.star, D.size
    module = D.module()
    h = HermitianForm(module)
    report = CheckReport("metric", conventions={"ordering": star.convention})
    linear, symmetric, adjoint, squares = (report.add(n) for n in METRIC_LAWS)
    for i in range(count):
        phi = module.project(_random_column(sampler, star, N))
        psi = module.project(_random_column(sampler, star, N))
        f = _random_series(sampler, star)
        A = corner_project(_random_matrix(sampler, star, N), D)
        witness = (i,)

        linear.record(first_difference(h(phi, module_right_act(psi, f)), star.multiply(h(phi, psi), f)), witness)
        symmetric.record(first_difference(h(phi, psi), h(psi, phi).conjugate()), witness)
        adjoint.record(
            first_difference(h(endo_left_act(A, phi, D), psi),
                             h(phi, endo_left_act(mat_adjoint(A), psi, D))),
            witness,
        )
        try:
            h.sum_of_squares(phi)
            squares.record(None, witness)
        except InconsistencyError:
            squares.record(0, witness)
        log.debug(f"metric_suite: sample {i + 1}/{count}")
    return report


EQUIVALENCE_LAWS = ("intertwining", "classical-identity", "right-module-morphism")


def equivalence_suite(E: ModuleEquivalence, sampler: Sampler, count: int) -> CheckReport:
    """V⋆P = P′⋆V, cl(V) = I and T(φ•f) = T(φ)•f on random data."""
    star = E.source.star
    report = CheckReport("module equivalence", conventions={"ordering": star.convention})
    intertwining, classical, morphism = (report.add(n) for n in EQUIVALENCE_LAWS)
    intertwining.record(E.intertwining_defect(), ("V",))
    identity = _classical_identity_like(E.V)
    classical.record(None if E.V.classical() == identity else 0, ("V",))
    module = E.source.module()
    for i in range(count):
        phi = module.project(_random_column(sampler, star, E.source.size))
        f = _random_series(sampler, star)
        morphism.record(
            _column_difference(E.apply(module_right_act(phi, f)), module_right_act(E.apply(phi), f)), (i,)
        )
    return report
