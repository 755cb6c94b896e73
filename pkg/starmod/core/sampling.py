"""Seeded random data for the property checkers.

All randomness goes through numpy's PCG64 generator, so a (seed, stream) pair always yields
the same sample sequence.
"""

from fractions import Fraction
from typing import List, Optional, Sequence, Union

import numpy as np

from starmod.core.algebras import TORUS, AlgebraDescriptor, AlgebraElement, element
from starmod.core.scalars import GaussianRational
from starmod.core.series import FormalSeries
from starmod.infrastructure.config import (
    SAMPLE_COEFFICIENTS,
    SAMPLE_MAX_TERMS,
    SAMPLE_MODE_BOUND,
    SAMPLE_PLANE_DEGREE,
)

SeedLike = Union[int, Sequence[int]]


def make_rng(seed: SeedLike, stream: Optional[int] = None) -> np.random.Generator:
    """PCG64 generator for a seed, optionally split into an independent stream."""
    entropy = [int(s) for s in (seed if isinstance(seed, (list, tuple)) else [seed])]
    if stream is not None:
        entropy.append(int(stream))
    return np.random.Generator(np.random.PCG64(entropy))


class Sampler:
    """Draws random scalars, elements, series and matrices."""

    def __init__(self, seed: SeedLike = 0, stream: Optional[int] = None) -> None:
        self.rng = make_rng(seed, stream)
        self.coefficients: List[GaussianRational] = [
            GaussianRational(Fraction(re), Fraction(im)) for re, im in SAMPLE_COEFFICIENTS
        ]

    def integer(self, low: int, high: int) -> int:
        """Uniform integer in [low, high]."""
        return int(self.rng.integers(low, high + 1))

    def scalar(self, nonzero: bool = False) -> GaussianRational:
        pool = [c for c in self.coefficients if c] if nonzero else self.coefficients
        return pool[self.integer(0, len(pool) - 1)]

    def key(self, descriptor: AlgebraDescriptor) -> tuple:
        if descriptor.kind == TORUS:
            return tuple(self.integer(-SAMPLE_MODE_BOUND, SAMPLE_MODE_BOUND) for _ in range(descriptor.dim))
        while True:
            alpha = tuple(self.integer(0, SAMPLE_PLANE_DEGREE) for _ in range(descriptor.dim))
            if sum(alpha) <= SAMPLE_PLANE_DEGREE:
                return alpha

    def element(self, descriptor: AlgebraDescriptor, max_terms: int = SAMPLE_MAX_TERMS) -> AlgebraElement:
        count = self.integer(1, max_terms)
        terms = {}
        for _ in range(count):
            terms[self.key(descriptor)] = self.scalar()
        return element(descriptor, terms)

    def series(self, descriptor: AlgebraDescriptor, order: int, max_terms: int = 2) -> FormalSeries:
        """Random series: a full classical part plus sparse higher orders."""
        coeffs = [self.element(descriptor)]
        for _ in range(order):
            coeffs.append(self.element(descriptor, max_terms) if self.integer(0, 1) else element(descriptor))
        return FormalSeries(descriptor, order, coeffs)

    def multi_index(self, dim: int, max_order: int = 2) -> tuple:
        while True:
            alpha = tuple(self.integer(0, max_order) for _ in range(dim))
            if 0 < sum(alpha) <= max_order:
                return alpha
