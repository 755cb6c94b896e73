"""Truncated formal power series in λ."""

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from starmod.core.algebras import AlgebraDescriptor, AlgebraElement, constant, zero
from starmod.core.errors import DescriptorMismatchError, PreconditionError
from starmod.core.scalars import ZERO, GaussianRational, Number, format_scalar


class FormalSeries:
    """Σ_{r=0}^{K} λ^r coeffs[r], understood mod λ^{K+1}.

    λ is treated as real: conjugation acts on the coefficients only.
    """

    __slots__ = ("descriptor", "order", "coeffs")

    def __init__(
        self,
        descriptor: AlgebraDescriptor,
        order: int,
        coeffs: Optional[Sequence[AlgebraElement]] = None,
    ) -> None:
        if order < 0:
            raise PreconditionError(f"Truncation order must be non-negative, got {order}")
        coeffs = list(coeffs or [])
        if len(coeffs) > order + 1:
            coeffs = coeffs[: order + 1]
        for c in coeffs:
            if c.descriptor != descriptor:
                raise DescriptorMismatchError("Series coefficients over a foreign descriptor")
        coeffs += [zero(descriptor)] * (order + 1 - len(coeffs))
        self.descriptor = descriptor
        self.order = order
        self.coeffs: Tuple[AlgebraElement, ...] = tuple(coeffs)

    @classmethod
    def from_element(cls, f: AlgebraElement, order: int) -> "FormalSeries":
        return cls(f.descriptor, order, [f])

    @classmethod
    def scalar(cls, descriptor: AlgebraDescriptor, order: int, c: Number) -> "FormalSeries":
        return cls(descriptor, order, [constant(descriptor, c)])

    @classmethod
    def zero(cls, descriptor: AlgebraDescriptor, order: int) -> "FormalSeries":
        return cls(descriptor, order)

    def check_compatible(self, other: "FormalSeries") -> None:
        if self.descriptor != other.descriptor:
            raise DescriptorMismatchError(f"Descriptor mismatch: {self.descriptor} vs {other.descriptor}")
        if self.order != other.order:
            raise DescriptorMismatchError(f"Truncation mismatch: K={self.order} vs K={other.order}")

    def __getitem__(self, r: int) -> AlgebraElement:
        return self.coeffs[r]

    def __add__(self, other: "FormalSeries") -> "FormalSeries":
        self.check_compatible(other)
        return FormalSeries(self.descriptor, self.order, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "FormalSeries") -> "FormalSeries":
        self.check_compatible(other)
        return FormalSeries(self.descriptor, self.order, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "FormalSeries":
        return FormalSeries(self.descriptor, self.order, [-a for a in self.coeffs])

    def scale(self, c: Number) -> "FormalSeries":
        return FormalSeries(self.descriptor, self.order, [a.scale(c) for a in self.coeffs])

    def shift(self, power: int = 1) -> "FormalSeries":
        """Multiply by λ^power, dropping what falls beyond K."""
        return FormalSeries(self.descriptor, self.order, [zero(self.descriptor)] * power + list(self.coeffs))

    def conjugate(self) -> "FormalSeries":
        return FormalSeries(self.descriptor, self.order, [a.conjugate() for a in self.coeffs])

    def map(self, fn) -> "FormalSeries":
        return FormalSeries(self.descriptor, self.order, [fn(a) for a in self.coeffs])

    @property
    def classical(self) -> AlgebraElement:
        """Classical limit (λ = 0)."""
        return self.coeffs[0]

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def is_classical(self) -> bool:
        return all(c.is_zero() for c in self.coeffs[1:])

    def first_nonzero_order(self) -> Optional[int]:
        for r, c in enumerate(self.coeffs):
            if not c.is_zero():
                return r
        return None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FormalSeries):
            return NotImplemented
        return (
            self.descriptor == other.descriptor
            and self.order == other.order
            and self.coeffs == other.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.descriptor, self.order, self.coeffs))

    def __repr__(self) -> str:
        return f"FormalSeries(K={self.order}, coeffs={list(self.coeffs)!r})"


def first_difference(a: FormalSeries, b: FormalSeries) -> Optional[int]:
    """Lowest λ-order where a and b differ, None when equal mod λ^{K+1}."""
    a.check_compatible(b)
    return (a - b).first_nonzero_order()


@dataclass(frozen=True)
class ScalarSeries:
    """Σ λ^r c_r with Gaussian-rational coefficients."""

    coeffs: Tuple[GaussianRational, ...]

    @classmethod
    def of(cls, values: Iterable[Number]) -> "ScalarSeries":
        return cls(tuple(GaussianRational.coerce(v) for v in values))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __add__(self, other: "ScalarSeries") -> "ScalarSeries":
        if len(self.coeffs) != len(other.coeffs):
            raise DescriptorMismatchError("Scalar series truncation mismatch")
        return ScalarSeries(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "ScalarSeries") -> "ScalarSeries":
        return self + ScalarSeries(tuple(-c for c in other.coeffs))

    def first_nonzero_order(self) -> Optional[int]:
        for r, c in enumerate(self.coeffs):
            if c:
                return r
        return None

    def __getitem__(self, r: int) -> GaussianRational:
        return self.coeffs[r] if r < len(self.coeffs) else ZERO

    def to_strings(self) -> List[str]:
        return [format_scalar(c) for c in self.coeffs]
