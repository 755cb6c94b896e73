"""Integer-matrix helpers for lattice automorphisms (GL(n, Z))."""

from typing import Sequence, Tuple

import sympy

from starmod.core.errors import DimensionMismatchError, PreconditionError
from starmod.core.scalars import ZERO, GaussianRational

IntMatrix = Tuple[Tuple[int, ...], ...]


def to_int_matrix(rows: Sequence[Sequence[int]]) -> IntMatrix:
    matrix = tuple(tuple(int(v) for v in row) for row in rows)
    if any(len(row) != len(matrix) for row in matrix):
        raise DimensionMismatchError(f"Expected a square integer matrix, got {rows!r}")
    for row, original in zip(matrix, rows):
        if any(int(v) != v for v in original):
            raise PreconditionError(f"Non-integer entry in {rows!r}")
    return matrix


def identity_matrix(n: int) -> IntMatrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def determinant(rows: IntMatrix) -> int:
    if not rows:
        return 1
    return int(sympy.Matrix(rows).det())


def is_unimodular(rows: IntMatrix) -> bool:
    return determinant(rows) in (1, -1)


def unimodular_inverse(rows: IntMatrix) -> IntMatrix:
    """Exact inverse of a determinant ±1 integer matrix."""
    if not rows:
        return rows
    if not is_unimodular(rows):
        raise PreconditionError(f"Matrix {rows!r} is not invertible over the integers")
    inverse = sympy.Matrix(rows).inv()
    return tuple(tuple(int(inverse[i, j]) for j in range(len(rows))) for i in range(len(rows)))


def matmul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    if not a:
        return a
    product = sympy.Matrix(a) * sympy.Matrix(b)
    return tuple(tuple(int(product[i, j]) for j in range(product.cols)) for i in range(product.rows))


def apply(rows: IntMatrix, vector: Sequence[GaussianRational]) -> Tuple[GaussianRational, ...]:
    """Matrix times a vector of Gaussian rationals."""
    if len(vector) != len(rows):
        raise DimensionMismatchError(f"Vector of length {len(vector)} against {len(rows)}x{len(rows)} matrix")
    result = []
    for row in rows:
        total = ZERO
        for a, v in zip(row, vector):
            if a:
                total = total + v * a
        result.append(total)
    return tuple(result)


def apply_int(rows: IntMatrix, vector: Sequence[int]) -> Tuple[int, ...]:
    return tuple(sum(a * v for a, v in zip(row, vector)) for row in rows)
