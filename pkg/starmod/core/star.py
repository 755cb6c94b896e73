"""Star products, differential operators and equivalence transformations.

Built-in products use the Weyl (symmetric) ordering: C₁ = (i/2){·,·}. On the plane the
cochains C_r come from the bidifferential formula; on the torus from the closed form
e_m ⋆ e_n = exp(-iλθ(m∧n)/2) e_{m+n}.
"""

import itertools
import math
from abc import ABC, abstractmethod
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from starmod.core import lattice
from starmod.core.algebras import (
    TORUS,
    AlgebraDescriptor,
    AlgebraElement,
    PlaneElement,
    constant,
    derive_multi,
    element,
    poisson_bracket,
    zero,
)
from starmod.core.errors import (
    DescriptorMismatchError,
    IndexRangeError,
    PreconditionError,
    UnsupportedOperationError,
)
from starmod.core.scalars import HALF, I, ONE, ZERO, GaussianRational, Number
from starmod.core.series import FormalSeries, first_difference
from starmod.infrastructure.config import DEFAULT_TRUNCATION_ORDER, ORDERING_CONVENTION

MultiIndex = Tuple[int, ...]


# ---------------------------------------------------------------------------------------
# Differential operators and equivalence transformations
# ---------------------------------------------------------------------------------------


class DifferentialOperator:
    """f ↦ Σ coeff_α · ∂^α f, stored with one coefficient per multi-index."""

    __slots__ = ("descriptor", "_terms")

    def __init__(
        self,
        descriptor: AlgebraDescriptor,
        terms: Optional[Mapping[MultiIndex, AlgebraElement]] = None,
    ) -> None:
        self.descriptor = descriptor
        merged: Dict[MultiIndex, AlgebraElement] = {}
        for alpha, coeff in (terms or {}).items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != descriptor.dim or any(a < 0 for a in alpha):
                raise IndexRangeError(f"Bad multi-index {alpha} for dimension {descriptor.dim}")
            if coeff.descriptor != descriptor:
                raise DescriptorMismatchError("Operator coefficient over a foreign descriptor")
            merged[alpha] = merged[alpha] + coeff if alpha in merged else coeff
        self._terms = {alpha: c for alpha, c in merged.items() if not c.is_zero()}

    @classmethod
    def identity(cls, descriptor: AlgebraDescriptor) -> "DifferentialOperator":
        return cls(descriptor, {(0,) * descriptor.dim: constant(descriptor, 1)})

    @classmethod
    def zero(cls, descriptor: AlgebraDescriptor) -> "DifferentialOperator":
        return cls(descriptor)

    @classmethod
    def derivative(
        cls, descriptor: AlgebraDescriptor, alpha: Sequence[int], coeff: Optional[AlgebraElement] = None
    ) -> "DifferentialOperator":
        return cls(descriptor, {tuple(alpha): coeff if coeff is not None else constant(descriptor, 1)})

    def terms(self) -> List[Tuple[MultiIndex, AlgebraElement]]:
        return sorted(self._terms.items())

    def apply(self, f: AlgebraElement) -> AlgebraElement:
        result = zero(self.descriptor)
        for alpha, coeff in self._terms.items():
            derived = derive_multi(f, alpha)
            if not derived.is_zero():
                result = result + coeff * derived
        return result

    def compose(self, other: "DifferentialOperator") -> "DifferentialOperator":
        """self ∘ other, expanding ∂^α(c·∂^β) by the Leibniz rule."""
        terms: Dict[MultiIndex, AlgebraElement] = {}
        for a1, c1 in self._terms.items():
            for a2, c2 in other._terms.items():
                for beta in itertools.product(*(range(a + 1) for a in a1)):
                    weight = math.prod(math.comb(a, b) for a, b in zip(a1, beta))
                    derived = derive_multi(c2, beta)
                    if derived.is_zero():
                        continue
                    alpha = tuple(a - b + c for a, b, c in zip(a1, beta, a2))
                    term = (c1 * derived).scale(weight)
                    terms[alpha] = terms[alpha] + term if alpha in terms else term
        return DifferentialOperator(self.descriptor, terms)

    def __add__(self, other: "DifferentialOperator") -> "DifferentialOperator":
        terms = dict(self._terms)
        for alpha, c in other._terms.items():
            terms[alpha] = terms[alpha] + c if alpha in terms else c
        return DifferentialOperator(self.descriptor, terms)

    def __neg__(self) -> "DifferentialOperator":
        return DifferentialOperator(self.descriptor, {a: -c for a, c in self._terms.items()})

    def is_zero(self) -> bool:
        return not self._terms

    def is_real(self) -> bool:
        # real vector fields on both models, so only the coefficients matter
        return all(c.is_real() for c in self._terms.values())

    def kills_constants(self) -> bool:
        return (0,) * self.descriptor.dim not in self._terms

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DifferentialOperator):
            return NotImplemented
        return self.descriptor == other.descriptor and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.descriptor, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        return f"DifferentialOperator({self.terms()!r})"


class EquivalenceTransform:
    """T = id + Σ_{r=1}^{K} λ^r T_r."""

    __slots__ = ("descriptor", "order", "ops")

    def __init__(
        self,
        descriptor: AlgebraDescriptor,
        order: int,
        ops: Optional[Sequence[DifferentialOperator]] = None,
    ) -> None:
        ops = list(ops or [])[:order]
        ops += [DifferentialOperator.zero(descriptor)] * (order - len(ops))
        for op in ops:
            if op.descriptor != descriptor:
                raise DescriptorMismatchError("Transform operator over a foreign descriptor")
        self.descriptor = descriptor
        self.order = order
        self.ops: Tuple[DifferentialOperator, ...] = tuple(ops)

    @classmethod
    def identity(cls, descriptor: AlgebraDescriptor, order: int) -> "EquivalenceTransform":
        return cls(descriptor, order)

    def operator(self, r: int) -> DifferentialOperator:
        """T_r for r ≥ 1; T_0 is the identity."""
        if r == 0:
            return DifferentialOperator.identity(self.descriptor)
        return self.ops[r - 1]

    def full(self) -> List[DifferentialOperator]:
        return [self.operator(r) for r in range(self.order + 1)]

    def is_identity(self) -> bool:
        return all(op.is_zero() for op in self.ops)

    def is_real(self) -> bool:
        return all(op.is_real() for op in self.ops)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EquivalenceTransform):
            return NotImplemented
        return self.descriptor == other.descriptor and self.order == other.order and self.ops == other.ops

    def __hash__(self) -> int:
        return hash((self.descriptor, self.order, self.ops))

    def __repr__(self) -> str:
        return f"EquivalenceTransform(K={self.order}, ops={list(self.ops)!r})"


def _check_transform(T: EquivalenceTransform, f: FormalSeries) -> None:
    if T.descriptor != f.descriptor or T.order != f.order:
        raise DescriptorMismatchError(
            f"Transform (K={T.order}) and series (K={f.order}) do not match"
        )


def apply_transform(T: EquivalenceTransform, f: FormalSeries) -> FormalSeries:
    """(Tf)_r = f_r + Σ_{s=1}^{r} T_s(f_{r-s})."""
    _check_transform(T, f)
    coeffs = []
    for r in range(f.order + 1):
        value = f[r]
        for s in range(1, r + 1):
            if not T.ops[s - 1].is_zero() and not f[r - s].is_zero():
                value = value + T.ops[s - 1].apply(f[r - s])
        coeffs.append(value)
    return FormalSeries(f.descriptor, f.order, coeffs)


def _compose_series(
    left: Sequence[DifferentialOperator], right: Sequence[DifferentialOperator], order: int
) -> List[DifferentialOperator]:
    descriptor = left[0].descriptor
    result = []
    for r in range(order + 1):
        total = DifferentialOperator.zero(descriptor)
        for a in range(r + 1):
            if left[a].is_zero() or right[r - a].is_zero():
                continue
            total = total + left[a].compose(right[r - a])
        result.append(total)
    return result


def compose_transforms(T: EquivalenceTransform, S: EquivalenceTransform) -> EquivalenceTransform:
    """T ∘ S mod λ^{K+1}."""
    if T.descriptor != S.descriptor or T.order != S.order:
        raise DescriptorMismatchError("Cannot compose transforms of different shape")
    full = _compose_series(T.full(), S.full(), T.order)
    return EquivalenceTransform(T.descriptor, T.order, full[1:])


def invert_transform(T: EquivalenceTransform) -> EquivalenceTransform:
    """T^{-1} = Σ_k (-1)^k (T - id)^k, truncated at K."""
    K = T.order
    zero_op = DifferentialOperator.zero(T.descriptor)
    negated = [zero_op] + [-op for op in T.ops]
    power = [DifferentialOperator.identity(T.descriptor)] + [zero_op] * K
    total = list(power)
    for k in range(1, K + 1):
        power = _compose_series(power, negated, K)
        total = [a + b for a, b in zip(total, power)]
    return EquivalenceTransform(T.descriptor, K, total[1:])


# ---------------------------------------------------------------------------------------
# Star products
# ---------------------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _weyl_index_pairs(descriptor: AlgebraDescriptor, r: int) -> Tuple[Tuple[MultiIndex, MultiIndex, Fraction], ...]:
    """Σ π^{j1k1}···π^{jrkr} ∂_{j1..jr} ⊗ ∂_{k1..kr} collected by multi-index pairs."""
    dim = descriptor.dim
    pairs: Dict[Tuple[MultiIndex, MultiIndex], Fraction] = {((0,) * dim, (0,) * dim): Fraction(1)}
    for _ in range(r):
        grown: Dict[Tuple[MultiIndex, MultiIndex], Fraction] = {}
        for (af, ag), weight in pairs.items():
            for j, k, value in descriptor.poisson_pairs():
                nf = af[: j - 1] + (af[j - 1] + 1,) + af[j:]
                ng = ag[: k - 1] + (ag[k - 1] + 1,) + ag[k:]
                grown[(nf, ng)] = grown.get((nf, ng), Fraction(0)) + weight * value
        pairs = {key: w for key, w in grown.items() if w}
    return tuple((af, ag, w) for (af, ag), w in sorted(pairs.items()))


def weyl_cochain(descriptor: AlgebraDescriptor, r: int, f: AlgebraElement, g: AlgebraElement) -> AlgebraElement:
    """C_r(f,g) = (1/r!)(i/2)^r π^{j1k1}···π^{jrkr} ∂_{j1..jr}f ∂_{k1..kr}g."""
    if r == 0:
        return f * g
    prefactor = (I * HALF) ** r * GaussianRational(Fraction(1, math.factorial(r)))
    result = zero(descriptor)
    cache_f: Dict[MultiIndex, AlgebraElement] = {}
    cache_g: Dict[MultiIndex, AlgebraElement] = {}
    for af, ag, weight in _weyl_index_pairs(descriptor, r):
        df = cache_f.get(af)
        if df is None:
            df = cache_f[af] = derive_multi(f, af)
        if df.is_zero():
            continue
        dg = cache_g.get(ag)
        if dg is None:
            dg = cache_g[ag] = derive_multi(g, ag)
        if dg.is_zero():
            continue
        result = result + (df * dg).scale(weight)
    return result.scale(prefactor)


class StarProduct(ABC):
    """Associative deformation f ⋆ g = Σ λ^r C_r(f, g) truncated at order K."""

    convention: str = ORDERING_CONVENTION
    name: str = "star"

    def __init__(self, descriptor: AlgebraDescriptor, order: int = DEFAULT_TRUNCATION_ORDER) -> None:
        self.descriptor = descriptor
        self.order = order

    @property
    def hermitian(self) -> bool:
        return False

    @abstractmethod
    def multiply(self, f: FormalSeries, g: FormalSeries) -> FormalSeries:
        """f ⋆ g mod λ^{K+1}."""

    def bracket(self, f: AlgebraElement, g: AlgebraElement) -> AlgebraElement:
        """Poisson bracket whose i-multiple is the antisymmetric part of C₁."""
        return poisson_bracket(f, g)

    def check_operands(self, f: FormalSeries, g: FormalSeries) -> None:
        for s in (f, g):
            if s.descriptor != self.descriptor:
                raise DescriptorMismatchError(f"Series over {s.descriptor}, product over {self.descriptor}")
            if s.order != self.order:
                raise DescriptorMismatchError(f"Series truncated at K={s.order}, product at K={self.order}")

    def lift(self, f: AlgebraElement) -> FormalSeries:
        return FormalSeries.from_element(f, self.order)

    def unit(self) -> FormalSeries:
        return FormalSeries.scalar(self.descriptor, self.order, 1)

    def zero(self) -> FormalSeries:
        return FormalSeries.zero(self.descriptor, self.order)

    def multiply_elements(self, f: AlgebraElement, g: AlgebraElement) -> FormalSeries:
        return self.multiply(self.lift(f), self.lift(g))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.descriptor.kind}, K={self.order})"


class BidifferentialStar(StarProduct):
    """Product given by its cochains C_r; multiplication is the Cauchy product over λ."""

    @abstractmethod
    def cochain(self, r: int, f: AlgebraElement, g: AlgebraElement) -> AlgebraElement:
        """C_r(f, g) on classical elements."""

    def max_cochain_order(self, f: AlgebraElement, g: AlgebraElement) -> int:
        return self.order

    def multiply(self, f: FormalSeries, g: FormalSeries) -> FormalSeries:
        self.check_operands(f, g)
        K = self.order
        result = [zero(self.descriptor) for _ in range(K + 1)]
        for a in range(K + 1):
            if f[a].is_zero():
                continue
            for b in range(K + 1 - a):
                if g[b].is_zero():
                    continue
                top = min(K - a - b, self.max_cochain_order(f[a], g[b]))
                for r in range(top + 1):
                    term = self.cochain(r, f[a], g[b])
                    if not term.is_zero():
                        result[a + b + r] = result[a + b + r] + term
        return FormalSeries(self.descriptor, K, result)


class MoyalPlaneStar(BidifferentialStar):
    """Weyl-Moyal product for a constant Poisson tensor on the plane."""

    name = "moyal"

    @property
    def hermitian(self) -> bool:
        return True

    def cochain(self, r: int, f: AlgebraElement, g: AlgebraElement) -> AlgebraElement:
        return weyl_cochain(self.descriptor, r, f, g)

    def max_cochain_order(self, f: AlgebraElement, g: AlgebraElement) -> int:
        if isinstance(f, PlaneElement) and isinstance(g, PlaneElement):
            return min(f.degree(), g.degree())
        return self.order


class TorusWeylStar(BidifferentialStar):
    """e_m ⋆ e_n = exp(-iλθ(m₁n₂ - m₂n₁)/2) e_{m+n}, expanded to order K."""

    name = "moyal"

    def __init__(self, descriptor: AlgebraDescriptor, order: int = DEFAULT_TRUNCATION_ORDER) -> None:
        if descriptor.kind != TORUS:
            raise UnsupportedOperationError("TorusWeylStar needs the torus algebra")
        super().__init__(descriptor, order)
        self._factorials = [GaussianRational(Fraction(1, math.factorial(r))) for r in range(order + 1)]

    @property
    def hermitian(self) -> bool:
        return True

    def _phase(self, m: Tuple[int, ...], n: Tuple[int, ...]) -> GaussianRational:
        wedge = m[0] * n[1] - m[1] * n[0]
        return GaussianRational(0, -self.descriptor.theta * wedge / 2)

    def cochain(self, r: int, f: AlgebraElement, g: AlgebraElement) -> AlgebraElement:
        terms: Dict[Tuple[int, ...], GaussianRational] = {}
        for m, c in f.terms():
            for n, d in g.terms():
                weight = self._phase(m, n) ** r * GaussianRational(Fraction(1, math.factorial(r)))
                if weight:
                    key = (m[0] + n[0], m[1] + n[1])
                    terms[key] = terms.get(key, ZERO) + c * d * weight
        return element(self.descriptor, terms)

    def multiply(self, f: FormalSeries, g: FormalSeries) -> FormalSeries:
        self.check_operands(f, g)
        K = self.order
        buckets: List[Dict[Tuple[int, ...], GaussianRational]] = [{} for _ in range(K + 1)]
        for a in range(K + 1):
            f_terms = f[a].terms()
            if not f_terms:
                continue
            for b in range(K + 1 - a):
                g_terms = g[b].terms()
                for m, c in f_terms:
                    for n, d in g_terms:
                        key = (m[0] + n[0], m[1] + n[1])
                        base = c * d
                        phase = self._phase(m, n)
                        power = ONE
                        for r in range(K + 1 - a - b):
                            if r:
                                power = power * phase
                                if not power:
                                    break
                            bucket = buckets[a + b + r]
                            bucket[key] = bucket.get(key, ZERO) + base * power * self._factorials[r]
        return FormalSeries(self.descriptor, K, [element(self.descriptor, bucket) for bucket in buckets])


class PerturbedStar(BidifferentialStar):
    """C₁ = (i/2){f,g} + ∂₁f ∂₁g and C_r = 0 for r ≥ 2.

    The symmetric term is a Hochschild coboundary only up to order 1, so associativity
    breaks at order 2 while the C₁ antisymmetrization still gives i{f,g}.
    """

    name = "perturbed"

    @property
    def hermitian(self) -> bool:
        return True

    def cochain(self, r: int, f: AlgebraElement, g: AlgebraElement) -> AlgebraElement:
        if r == 0:
            return f * g
        if r == 1:
            return weyl_cochain(self.descriptor, 1, f, g) + f.derive(1) * g.derive(1)
        return zero(self.descriptor)

    def max_cochain_order(self, f: AlgebraElement, g: AlgebraElement) -> int:
        return min(1, self.order)


class TwistedStar(StarProduct):
    """f ⋆′ g := T(T⁻¹f ⋆ T⁻¹g) for an equivalence transformation T."""

    name = "twisted"

    def __init__(self, base: StarProduct, transform: EquivalenceTransform) -> None:
        if transform.descriptor != base.descriptor or transform.order != base.order:
            raise DescriptorMismatchError("Transform and star product do not match")
        for r, op in enumerate(transform.ops, start=1):
            if not op.kills_constants():
                raise PreconditionError(f"T_{r} has an order-0 term, so the twisted product loses its unit")
        super().__init__(base.descriptor, base.order)
        self.base = base
        self.transform = transform
        self.inverse = invert_transform(transform)

    @property
    def hermitian(self) -> bool:
        return self.base.hermitian and self.transform.is_real()

    def multiply(self, f: FormalSeries, g: FormalSeries) -> FormalSeries:
        self.check_operands(f, g)
        product = self.base.multiply(apply_transform(self.inverse, f), apply_transform(self.inverse, g))
        return apply_transform(self.transform, product)

    def bracket(self, f: AlgebraElement, g: AlgebraElement) -> AlgebraElement:
        return self.base.bracket(f, g)


def verify_intertwining(twisted: TwistedStar, f: FormalSeries, g: FormalSeries) -> Optional[int]:
    """First λ-order where T(f⋆g) and Tf ⋆′ Tg differ, None when they agree."""
    T = twisted.transform
    lhs = apply_transform(T, twisted.base.multiply(f, g))
    rhs = twisted.multiply(apply_transform(T, f), apply_transform(T, g))
    return first_difference(lhs, rhs)


# ---------------------------------------------------------------------------------------
# Undeformed automorphisms of the torus algebra
# ---------------------------------------------------------------------------------------


class Automorphism(ABC):
    """Exactly representable automorphism Φ of the undeformed algebra."""

    kind: str = "identity"

    @abstractmethod
    def apply(self, f: AlgebraElement) -> AlgebraElement:
        """Φ(f)."""

    @abstractmethod
    def inverse(self) -> "Automorphism":
        """Φ⁻¹."""

    def apply_series(self, f: FormalSeries) -> FormalSeries:
        return f.map(self.apply)


class IdentityAutomorphism(Automorphism):
    kind = "identity"

    def apply(self, f: AlgebraElement) -> AlgebraElement:
        return f

    def inverse(self) -> "IdentityAutomorphism":
        return self


def _require_torus(f: AlgebraElement) -> None:
    if f.descriptor.kind != TORUS:
        raise UnsupportedOperationError("Translations and lattice maps act on the torus algebra only")


class TorusTranslation(Automorphism):
    """q ↦ q + a with a = 2π·periods; e_m ↦ exp(i m·a) e_m.

    Only quarter periods keep exp(i m·a) inside ℚ(i).
    """

    kind = "translation"

    def __init__(self, periods: Sequence[Number]) -> None:
        periods = tuple(Fraction(p) for p in periods)
        if len(periods) != 2:
            raise UnsupportedOperationError(f"Torus translation needs two components, got {periods}")
        quarters = [4 * p for p in periods]
        if any(q.denominator != 1 for q in quarters):
            raise UnsupportedOperationError(
                f"Translation by {periods} periods is not a multiple of a quarter period"
            )
        self.periods = periods
        self.quarter_turns = tuple(int(q) % 4 for q in quarters)

    def _phase(self, m: Tuple[int, ...]) -> GaussianRational:
        return I ** ((m[0] * self.quarter_turns[0] + m[1] * self.quarter_turns[1]) % 4)

    def apply(self, f: AlgebraElement) -> AlgebraElement:
        _require_torus(f)
        return element(f.descriptor, {m: c * self._phase(m) for m, c in f.terms()})

    def inverse(self) -> "TorusTranslation":
        return TorusTranslation([-p for p in self.periods])


class LatticeMap(Automorphism):
    """e_m ↦ e_{Am} for A ∈ GL(2, ℤ)."""

    kind = "lattice"

    def __init__(self, matrix: Sequence[Sequence[int]]) -> None:
        self.matrix = lattice.to_int_matrix(matrix)
        if len(self.matrix) != 2 or not lattice.is_unimodular(self.matrix):
            raise UnsupportedOperationError(f"{matrix!r} is not in GL(2, Z)")

    def apply(self, f: AlgebraElement) -> AlgebraElement:
        _require_torus(f)
        return element(f.descriptor, {lattice.apply_int(self.matrix, m): c for m, c in f.terms()})

    def inverse(self) -> "LatticeMap":
        return LatticeMap(lattice.unimodular_inverse(self.matrix))


class AutomorphismTwistedStar(StarProduct):
    """A ⋆^Φ B := Φ(Φ⁻¹A ⋆ Φ⁻¹B)."""

    name = "automorphism-twisted"

    def __init__(self, base: StarProduct, phi: Automorphism) -> None:
        super().__init__(base.descriptor, base.order)
        self.base = base
        self.phi = phi
        self.phi_inverse = phi.inverse()

    @property
    def hermitian(self) -> bool:
        return self.base.hermitian

    def multiply(self, f: FormalSeries, g: FormalSeries) -> FormalSeries:
        self.check_operands(f, g)
        product = self.base.multiply(self.phi_inverse.apply_series(f), self.phi_inverse.apply_series(g))
        return self.phi.apply_series(product)

    def bracket(self, f: AlgebraElement, g: AlgebraElement) -> AlgebraElement:
        return self.phi.apply(self.base.bracket(self.phi_inverse.apply(f), self.phi_inverse.apply(g)))


# ---------------------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------------------


def moyal_star(descriptor: AlgebraDescriptor, order: int = DEFAULT_TRUNCATION_ORDER) -> StarProduct:
    """Weyl-ordered built-in product for the algebra."""
    if descriptor.kind == TORUS:
        return TorusWeylStar(descriptor, order)
    return MoyalPlaneStar(descriptor, order)


def perturbed_star(descriptor: AlgebraDescriptor, order: int = DEFAULT_TRUNCATION_ORDER) -> StarProduct:
    return PerturbedStar(descriptor, order)


def star_multiply(f: FormalSeries, g: FormalSeries, star: StarProduct) -> FormalSeries:
    return star.multiply(f, g)


def twist_star(T: EquivalenceTransform, star: StarProduct) -> TwistedStar:
    return TwistedStar(star, T)


def twist_by_automorphism(phi: Automorphism, star: StarProduct) -> StarProduct:
    if isinstance(phi, IdentityAutomorphism):
        return star
    if star.descriptor.kind != TORUS:
        raise UnsupportedOperationError("Automorphism twists are supported on the torus algebra only")
    return AutomorphismTwistedStar(star, phi)
