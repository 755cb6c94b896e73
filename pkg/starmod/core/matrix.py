"""Matrices over a formal star algebra."""

import logging
from fractions import Fraction
from typing import List, Optional, Sequence

from starmod.core.algebras import AlgebraElement, constant, unit_inverse, zero
from starmod.core.errors import DescriptorMismatchError, DimensionMismatchError, PreconditionError, SingularError
from starmod.core.scalars import GaussianRational, Number
from starmod.core.series import FormalSeries, first_difference
from starmod.core.star import StarProduct

log = logging.getLogger(__name__)

ClassicalGrid = List[List[AlgebraElement]]


class StarMatrix:
    """n_rows × n_cols grid of FormalSeries multiplied with a fixed star product."""

    __slots__ = ("star", "n_rows", "n_cols", "entries")

    def __init__(self, star: StarProduct, entries: Sequence[Sequence[FormalSeries]]) -> None:
        rows = [tuple(row) for row in entries]
        if not rows or not rows[0]:
            raise DimensionMismatchError("A star matrix needs at least one row and one column")
        if any(len(row) != len(rows[0]) for row in rows):
            raise DimensionMismatchError("Ragged star matrix")
        for row in rows:
            for s in row:
                if s.descriptor != star.descriptor or s.order != star.order:
                    raise DescriptorMismatchError("Matrix entry does not match the star product")
        self.star = star
        self.n_rows = len(rows)
        self.n_cols = len(rows[0])
        self.entries = tuple(rows)

    # Constructors

    @classmethod
    def from_classical(cls, star: StarProduct, grid: Sequence[Sequence[AlgebraElement]]) -> "StarMatrix":
        return cls(star, [[star.lift(f) for f in row] for row in grid])

    @classmethod
    def identity(cls, star: StarProduct, n: int) -> "StarMatrix":
        return cls.scalar(star, n, 1)

    @classmethod
    def scalar(cls, star: StarProduct, n: int, c: Number) -> "StarMatrix":
        return cls(star, [[star.lift(constant(star.descriptor, c if i == j else 0)) for j in range(n)]
                          for i in range(n)])

    @classmethod
    def zeros(cls, star: StarProduct, rows: int, cols: int) -> "StarMatrix":
        return cls(star, [[star.zero() for _ in range(cols)] for _ in range(rows)])

    @classmethod
    def unit(cls, star: StarProduct, n: int, i: int, j: int, c: Number = 1) -> "StarMatrix":
        """c·E_{ij} with 1-based indices."""
        return cls(star, [[star.lift(constant(star.descriptor, c if (a, b) == (i - 1, j - 1) else 0))
                           for b in range(n)] for a in range(n)])

    @classmethod
    def column(cls, star: StarProduct, components: Sequence[FormalSeries]) -> "StarMatrix":
        return cls(star, [[c] for c in components])

    # Shape helpers

    @property
    def shape(self) -> tuple:
        return (self.n_rows, self.n_cols)

    def is_square(self) -> bool:
        return self.n_rows == self.n_cols

    def __getitem__(self, index) -> FormalSeries:
        i, j = index
        return self.entries[i][j]

    def _check_same(self, other: "StarMatrix") -> None:
        if other.star is not self.star and (
            other.star.descriptor != self.star.descriptor or other.star.order != self.star.order
        ):
            raise DescriptorMismatchError("Star matrices over different star products")

    def _check_shape(self, other: "StarMatrix") -> None:
        self._check_same(other)
        if self.shape != other.shape:
            raise DimensionMismatchError(f"Shape mismatch: {self.shape} vs {other.shape}")

    def _map(self, fn) -> "StarMatrix":
        return StarMatrix(self.star, [[fn(s) for s in row] for row in self.entries])

    # Linear structure

    def __add__(self, other: "StarMatrix") -> "StarMatrix":
        self._check_shape(other)
        return StarMatrix(self.star, [[a + b for a, b in zip(r1, r2)]
                                      for r1, r2 in zip(self.entries, other.entries)])

    def __sub__(self, other: "StarMatrix") -> "StarMatrix":
        self._check_shape(other)
        return StarMatrix(self.star, [[a - b for a, b in zip(r1, r2)]
                                      for r1, r2 in zip(self.entries, other.entries)])

    def __neg__(self) -> "StarMatrix":
        return self._map(lambda s: -s)

    def scale(self, c: Number) -> "StarMatrix":
        return self._map(lambda s: s.scale(c))

    def shift(self, power: int = 1) -> "StarMatrix":
        """Multiply every entry by λ^power."""
        return self._map(lambda s: s.shift(power))

    def __matmul__(self, other: "StarMatrix") -> "StarMatrix":
        return mat_star_mul(self, other)

    # Classical data

    def classical(self) -> ClassicalGrid:
        return [[s[0] for s in row] for row in self.entries]

    def order_part(self, r: int) -> ClassicalGrid:
        return [[s[r] for s in row] for row in self.entries]

    def is_zero(self) -> bool:
        return all(s.is_zero() for row in self.entries for s in row)

    def is_classical(self) -> bool:
        return all(s.is_classical() for row in self.entries for s in row)

    def column_entries(self, j: int = 0) -> List[FormalSeries]:
        return [row[j] for row in self.entries]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StarMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def __repr__(self) -> str:
        return f"StarMatrix({self.n_rows}x{self.n_cols}, K={self.star.order})"


def mat_star_mul(A: StarMatrix, B: StarMatrix) -> StarMatrix:
    """(A ⋆ B)_{ik} = Σ_j A_{ij} ⋆ B_{jk}."""
    A._check_same(B)
    if A.n_cols != B.n_rows:
        raise DimensionMismatchError(f"Cannot multiply {A.shape} by {B.shape}")
    star = A.star
    rows = []
    for i in range(A.n_rows):
        row = []
        for k in range(B.n_cols):
            total = star.zero()
            for j in range(A.n_cols):
                a, b = A.entries[i][j], B.entries[j][k]
                if a.is_zero() or b.is_zero():
                    continue
                total = total + star.multiply(a, b)
            row.append(total)
        rows.append(row)
    return StarMatrix(star, rows)


def mat_adjoint(A: StarMatrix) -> StarMatrix:
    """Conjugate transpose, conjugating every λ-coefficient."""
    return StarMatrix(A.star, [[A.entries[i][j].conjugate() for i in range(A.n_rows)]
                               for j in range(A.n_cols)])


def mat_trace(A: StarMatrix) -> FormalSeries:
    if not A.is_square():
        raise DimensionMismatchError(f"Trace of a non-square {A.shape} matrix")
    total = A.star.zero()
    for i in range(A.n_rows):
        total = total + A.entries[i][i]
    return total


def direct_sum(A: StarMatrix, B: StarMatrix) -> StarMatrix:
    """Block diagonal matrix diag(A, B)."""
    A._check_same(B)
    star = A.star
    rows = [list(row) + [star.zero()] * B.n_cols for row in A.entries]
    rows += [[star.zero()] * A.n_cols + list(row) for row in B.entries]
    return StarMatrix(star, rows)


def first_matrix_difference(A: StarMatrix, B: StarMatrix) -> Optional[int]:
    """Lowest λ-order where A and B differ in some entry."""
    A._check_shape(B)
    orders = [
        first_difference(a, b)
        for r1, r2 in zip(A.entries, B.entries)
        for a, b in zip(r1, r2)
    ]
    found = [o for o in orders if o is not None]
    return min(found) if found else None


# ---------------------------------------------------------------------------------------
# Classical (order-0) matrix algebra over the commutative coefficient algebra
# ---------------------------------------------------------------------------------------


def _classical_mul(A: ClassicalGrid, B: ClassicalGrid) -> ClassicalGrid:
    descriptor = A[0][0].descriptor
    n, m, p = len(A), len(B), len(B[0])
    result = []
    for i in range(n):
        row = []
        for k in range(p):
            total = zero(descriptor)
            for j in range(m):
                if not A[i][j].is_zero() and not B[j][k].is_zero():
                    total = total + A[i][j] * B[j][k]
            row.append(total)
        result.append(row)
    return result


def _classical_identity(descriptor, n: int, c: Number = 1) -> ClassicalGrid:
    return [[constant(descriptor, c if i == j else 0) for j in range(n)] for i in range(n)]


def classical_product(A: ClassicalGrid, B: ClassicalGrid) -> ClassicalGrid:
    """Undeformed matrix product."""
    return _classical_mul(A, B)


def classical_inverse(A: ClassicalGrid) -> ClassicalGrid:
    """Inverse over the commutative algebra by the Faddeev-LeVerrier recursion.

    The recursion divides only by integers, giving det(A) and adj(A); the inverse exists
    exactly when det(A) is a unit of the algebra.
    """
    n = len(A)
    if any(len(row) != n for row in A):
        raise DimensionMismatchError("Classical inverse of a non-square matrix")
    descriptor = A[0][0].descriptor
    M = [[zero(descriptor) for _ in range(n)] for _ in range(n)]
    c = constant(descriptor, 1)
    for k in range(1, n + 1):
        M = [[M[i][j] + c if i == j else M[i][j] for j in range(n)] for i in range(n)]
        AM = _classical_mul(A, M)
        trace = zero(descriptor)
        for i in range(n):
            trace = trace + AM[i][i]
        c = trace.scale(GaussianRational(Fraction(-1, k)))
        if k < n:
            M = AM
    # after the loop: c = c_0 and M = M_n, with det(A) = (-1)^n c_0 and adj(A) = (-1)^{n-1} M_n
    det = c.scale((-1) ** n)
    try:
        det_inverse = unit_inverse(det)
    except SingularError as e:
        raise SingularError(f"Order-0 matrix is not invertible: determinant {det!r} is not a unit") from e
    sign = (-1) ** (n - 1)
    return [[M[i][j].scale(sign) * det_inverse for j in range(n)] for i in range(n)]


def _verify_classical_inverse(A: ClassicalGrid, B: ClassicalGrid) -> bool:
    n = len(A)
    descriptor = A[0][0].descriptor
    identity = _classical_identity(descriptor, n)
    return _classical_mul(A, B) == identity and _classical_mul(B, A) == identity


def star_inverse(A: StarMatrix, classical_inv: Optional[ClassicalGrid] = None) -> StarMatrix:
    """B with A⋆B = B⋆A = I mod λ^{K+1}, solved order by order from B₀ = A₀⁻¹."""
    if not A.is_square():
        raise DimensionMismatchError(f"Star inverse of a non-square {A.shape} matrix")
    star, n, K = A.star, A.n_rows, A.star.order
    A0 = A.classical()
    if classical_inv is None:
        B0 = classical_inverse(A0)
    else:
        B0 = [list(row) for row in classical_inv]
        if not _verify_classical_inverse(A0, B0):
            raise SingularError("Supplied classical inverse does not invert the order-0 matrix")

    coeffs = [[[B0[i][j]] for j in range(n)] for i in range(n)]
    B = StarMatrix(star, [[FormalSeries(star.descriptor, K, coeffs[i][j]) for j in range(n)] for i in range(n)])
    for r in range(1, K + 1):
        defect = mat_star_mul(A, B).order_part(r)
        correction = _classical_mul(B0, defect)
        for i in range(n):
            for j in range(n):
                coeffs[i][j].append(-correction[i][j])
        B = StarMatrix(star, [[FormalSeries(star.descriptor, K, coeffs[i][j]) for j in range(n)]
                              for i in range(n)])
        log.debug(f"star_inverse: solved order {r}/{K}")
    return B


def _binomial_minus_half(k: int) -> Fraction:
    value = Fraction(1)
    for j in range(1, k + 1):
        value = value * (Fraction(-1, 2) - j + 1) / j
    return value


def star_inv_sqrt(A: StarMatrix) -> StarMatrix:
    """S = Σ_k binom(-1/2, k) Δ^{⋆k} for A = I + Δ with Δ vanishing at order 0."""
    if not A.is_square():
        raise DimensionMismatchError(f"Inverse square root of a non-square {A.shape} matrix")
    star, n = A.star, A.n_rows
    identity = StarMatrix.identity(star, n)
    delta = A - identity
    if any(not s[0].is_zero() for row in delta.entries for s in row):
        raise PreconditionError("Inverse square root needs A = I + O(λ)")

    result = identity
    power = identity
    for k in range(1, star.order + 1):
        power = mat_star_mul(power, delta)
        if power.is_zero():
            break
        result = result + power.scale(GaussianRational(_binomial_minus_half(k)))
        log.debug(f"star_inv_sqrt: added Δ^{k}")
    return result
