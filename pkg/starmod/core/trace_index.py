"""Normalized trace on the torus star algebra and the index of deformed projections."""

import logging
from dataclasses import dataclass
from typing import List, Optional

from starmod.core.algebras import TORUS
from starmod.core.bundle import DeformedProjection, conjugate_projection
from starmod.core.errors import UnsupportedOperationError
from starmod.core.matrix import ClassicalGrid, StarMatrix, mat_star_mul, mat_trace
from starmod.core.reports import CheckReport
from starmod.core.sampling import Sampler
from starmod.core.scalars import GaussianRational
from starmod.core.series import FormalSeries, ScalarSeries
from starmod.core.star import StarProduct
from starmod.infrastructure.config import TRACE_NORMALIZATION

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class IndexValue:
    """∫tr(P) as a scalar λ-series."""

    series: ScalarSeries

    @property
    def classical(self) -> GaussianRational:
        return self.series[0]

    @property
    def rank(self) -> Optional[int]:
        value = self.series[0]
        return int(value.re) if value.is_integer() else None

    def __add__(self, other: "IndexValue") -> "IndexValue":
        return IndexValue(self.series + other.series)

    def to_strings(self) -> List[str]:
        return self.series.to_strings()


def trace_functional(f: FormalSeries) -> ScalarSeries:
    """∫ applied per λ-order, normalized by ∫1 = 1."""
    if f.descriptor.kind != TORUS:
        raise UnsupportedOperationError(f"No trace functional on the {f.descriptor.kind} algebra")
    return ScalarSeries.of(c.integrate() for c in f.coeffs)


def index(D: DeformedProjection) -> IndexValue:
    value = IndexValue(trace_functional(mat_trace(D.P)))
    log.debug(f"index: {value.to_strings()}")
    return value


def cyclicity_check(A: StarMatrix, B: StarMatrix) -> Optional[int]:
    """First λ-order where ∫tr(A⋆B) and ∫tr(B⋆A) differ."""
    left = trace_functional(mat_trace(mat_star_mul(A, B)))
    right = trace_functional(mat_trace(mat_star_mul(B, A)))
    return (left - right).first_nonzero_order()


def cyclicity_suite(star: StarProduct, sampler: Sampler, count: int, size: int = 2) -> CheckReport:
    report = CheckReport("trace cyclicity", conventions={"normalization": TRACE_NORMALIZATION})
    check = report.add("cyclicity")
    for i in range(count):
        A = StarMatrix(star, [[sampler.series(star.descriptor, star.order) for _ in range(size)]
                              for _ in range(size)])
        B = StarMatrix(star, [[sampler.series(star.descriptor, star.order) for _ in range(size)]
                              for _ in range(size)])
        check.record(cyclicity_check(A, B), (i,))
    return report


@dataclass(frozen=True)
class IndexInvarianceReport:
    original: IndexValue
    conjugated: IndexValue

    @property
    def first_failing_order(self) -> Optional[int]:
        return (self.original.series - self.conjugated.series).first_nonzero_order()

    @property
    def passed(self) -> bool:
        return self.first_failing_order is None


def index_invariance_check(
    D: DeformedProjection, U: StarMatrix, classical_inv: Optional[ClassicalGrid] = None
) -> IndexInvarianceReport:
    """Compare index(D) with index(U⋆P⋆U⁻¹)."""
    conjugated = conjugate_projection(D, U, classical_inv)
    report = IndexInvarianceReport(index(D), index(conjugated))
    if not report.passed:
        log.warning(f"Index changed under conjugation at order {report.first_failing_order}")
    return report
