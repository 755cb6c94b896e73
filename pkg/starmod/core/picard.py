"""Class-level Picard data for symplectic star products.

Order-0 components of characteristic classes and of OutEquiv elements are stored in units
of 2πi, so integrality questions reduce to rational lattice membership.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from starmod.core import lattice
from starmod.core.errors import (
    DimensionMismatchError,
    InconsistencyError,
    PreconditionError,
    UnsupportedOperationError,
)
from starmod.core.lattice import IntMatrix
from starmod.core.scalars import ZERO, GaussianRational, Number

log = logging.getLogger(__name__)

Vector = Tuple[GaussianRational, ...]

COMPOSITION_ORIENTATION = "(psi1, d1) o (psi2, d2) = (psi1 psi2, d1 + A2(psi1) d2)"


def _vector(values: Sequence[Number]) -> Vector:
    return tuple(GaussianRational.coerce(v) for v in values)


def _sub(a: Vector, b: Vector) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


def _add(a: Vector, b: Vector) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def _is_lattice_point(v: Vector) -> bool:
    return all(x.is_integer() for x in v)


@dataclass(frozen=True)
class DiffeoAction:
    """Induced action (A1 on H¹, A2 on H²) of a named symplectomorphism."""

    name: str
    A1: IntMatrix
    A2: IntMatrix

    def __post_init__(self) -> None:
        object.__setattr__(self, "A1", lattice.to_int_matrix(self.A1))
        object.__setattr__(self, "A2", lattice.to_int_matrix(self.A2))
        for label, matrix in (("A1", self.A1), ("A2", self.A2)):
            if not lattice.is_unimodular(matrix):
                raise PreconditionError(f"Action {self.name!r}: {label} is not invertible over the integers")

    def same_matrices(self, A1: IntMatrix, A2: IntMatrix) -> bool:
        return self.A1 == A1 and self.A2 == A2


@dataclass
class CohomologyModel:
    """H¹/H² lattice data, the class [ω] and a finite list of diffeomorphism actions."""

    d1: int
    d2: int
    omega: Vector
    actions: List[DiffeoAction] = field(default_factory=list)
    symplectic: bool = True

    def __post_init__(self) -> None:
        self.omega = _vector(self.omega)
        if self.d1 < 0 or self.d2 < 0:
            raise DimensionMismatchError("Cohomology dimensions must be non-negative")
        if len(self.omega) != self.d2:
            raise DimensionMismatchError(f"omega has {len(self.omega)} components, d2 = {self.d2}")
        for action in self.actions:
            if len(action.A1) != self.d1 or len(action.A2) != self.d2:
                raise DimensionMismatchError(f"Action {action.name!r} does not act on H1 = Z^{self.d1}, H2 = Z^{self.d2}")
        if len({a.name for a in self.actions}) != len(self.actions):
            raise PreconditionError("Action names must be unique")
        id1, id2 = lattice.identity_matrix(self.d1), lattice.identity_matrix(self.d2)
        if not any(a.same_matrices(id1, id2) for a in self.actions):
            name = "id" if all(a.name != "id" for a in self.actions) else "identity"
            log.warning(f"Cohomology model has no identity action; inserting {name!r}")
            self.actions.insert(0, DiffeoAction(name, id1, id2))

    def action(self, name: str) -> DiffeoAction:
        for a in self.actions:
            if a.name == name:
                return a
        raise PreconditionError(f"No action named {name!r} in the model")

    def find_action(self, A1: IntMatrix, A2: IntMatrix) -> Optional[DiffeoAction]:
        for a in self.actions:
            if a.same_matrices(A1, A2):
                return a
        return None


@dataclass(frozen=True)
class CharacteristicClass:
    """c(⋆) = leading/λ + Σ_r λ^r orders[r], with orders[0] in units of 2πi."""

    leading: Vector
    orders: Tuple[Vector, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "leading", _vector(self.leading))
        object.__setattr__(self, "orders", tuple(_vector(v) for v in self.orders))
        if not self.orders:
            raise DimensionMismatchError("A characteristic class needs at least the order-0 vector")
        if any(len(v) != len(self.leading) for v in self.orders):
            raise DimensionMismatchError("All class components must have dimension d2")

    @classmethod
    def from_model(cls, model: CohomologyModel, orders: Sequence[Sequence[Number]]) -> "CharacteristicClass":
        """Class whose leading term is [ω]/i."""
        return cls(tuple(w * GaussianRational(0, -1) for w in model.omega), tuple(_vector(v) for v in orders))

    @property
    def d2(self) -> int:
        return len(self.leading)

    @property
    def order(self) -> int:
        return len(self.orders) - 1


@dataclass(frozen=True)
class Witness:
    """Action name plus the integral class ψ*c′₀ − c₀ (2πi units)."""

    action: str
    vector: Tuple[int, ...]


@dataclass(frozen=True)
class MoritaReport:
    equivalent: bool
    witness: Optional[Witness] = None


def _check_classes(c: CharacteristicClass, c_prime: CharacteristicClass, model: CohomologyModel) -> None:
    if c.d2 != model.d2 or c_prime.d2 != model.d2:
        raise DimensionMismatchError(f"Classes of dimension {c.d2}, {c_prime.d2} against d2 = {model.d2}")
    if c.order != c_prime.order:
        raise DimensionMismatchError(f"Classes truncated at K = {c.order} and K = {c_prime.order}")


def _witness_vector(
    action: DiffeoAction, c: CharacteristicClass, c_prime: CharacteristicClass
) -> Optional[Tuple[int, ...]]:
    """Integral vector A2·c′₀ − c₀ when ψ = action satisfies the criterion."""
    A2 = action.A2
    if lattice.apply(A2, c_prime.leading) != c.leading:
        return None
    for r in range(1, c.order + 1):
        if lattice.apply(A2, c_prime.orders[r]) != c.orders[r]:
            return None
    difference = _sub(lattice.apply(A2, c_prime.orders[0]), c.orders[0])
    if not _is_lattice_point(difference):
        return None
    return tuple(int(x.re) for x in difference)


def morita_check(c: CharacteristicClass, c_prime: CharacteristicClass, model: CohomologyModel) -> MoritaReport:
    """Search the action list for ψ with ψ*c(⋆′) − c(⋆) ∈ 2πi·H²(M, ℤ)."""
    _check_classes(c, c_prime, model)
    for action in model.actions:
        vector = _witness_vector(action, c, c_prime)
        if vector is not None:
            log.debug(f"morita_check: witness {action.name} with class {vector}")
            return MoritaReport(True, Witness(action.name, vector))
    return MoritaReport(False)


def verify_witness(
    w: Witness, c: CharacteristicClass, c_prime: CharacteristicClass, model: CohomologyModel
) -> bool:
    _check_classes(c, c_prime, model)
    return _witness_vector(model.action(w.action), c, c_prime) == tuple(w.vector)


def compose_witnesses(
    w1: Witness,
    w2: Witness,
    model: CohomologyModel,
    chain: Tuple[CharacteristicClass, CharacteristicClass, CharacteristicClass],
) -> Witness:
    """Witness for (c, c″) from w1 for (c, c′) and w2 for (c′, c″).

    The composed action has matrices A(ψ1)·A(ψ2) and class d₁ + A2(ψ1)·d₂; it must be in the
    action list and is re-verified against the chain.
    """
    c, c_prime, c_double = chain
    if not verify_witness(w1, c, c_prime, model) or not verify_witness(w2, c_prime, c_double, model):
        raise InconsistencyError("Input witnesses do not witness the given chain of classes")
    a1, a2 = model.action(w1.action), model.action(w2.action)
    composed = model.find_action(lattice.matmul(a1.A1, a2.A1), lattice.matmul(a1.A2, a2.A2))
    if composed is None:
        raise PreconditionError(f"Composite of {a1.name!r} and {a2.name!r} is not in the action list")
    shifted = lattice.apply_int(a1.A2, w2.vector)
    result = Witness(composed.name, tuple(x + y for x, y in zip(w1.vector, shifted)))
    if not verify_witness(result, c, c_double, model):
        raise InconsistencyError(f"Composed witness {result} fails the Morita criterion")
    return result


def invert_witness(
    w: Witness, model: CohomologyModel, pair: Optional[Tuple[CharacteristicClass, CharacteristicClass]] = None
) -> Witness:
    """(ψ⁻¹, −A2(ψ)⁻¹·d), a witness for (c′, c)."""
    action = model.action(w.action)
    A1_inv, A2_inv = lattice.unimodular_inverse(action.A1), lattice.unimodular_inverse(action.A2)
    inverse = model.find_action(A1_inv, A2_inv)
    if inverse is None:
        raise PreconditionError(f"Inverse of {action.name!r} is not in the action list")
    result = Witness(inverse.name, tuple(-x for x in lattice.apply_int(A2_inv, w.vector)))
    if pair is not None:
        c, c_prime = pair
        if not verify_witness(result, c_prime, c, model):
            raise InconsistencyError(f"Inverted witness {result} fails the Morita criterion")
    return result


# ---------------------------------------------------------------------------------------
# OutEquiv
# ---------------------------------------------------------------------------------------


@dataclass(frozen=True)
class OutEquivElement:
    """v0 ∈ ℚ(i)^{d1} (2πi units, mod ℤ^{d1}) plus higher orders v_1..v_K."""

    v0: Vector
    higher: Tuple[Vector, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "v0", _vector(self.v0))
        object.__setattr__(self, "higher", tuple(_vector(v) for v in self.higher))
        if any(len(v) != len(self.v0) for v in self.higher):
            raise DimensionMismatchError("All OutEquiv components must have dimension d1")

    @property
    def d1(self) -> int:
        return len(self.v0)

    @property
    def order(self) -> int:
        return len(self.higher)


def _reduce(x: GaussianRational) -> GaussianRational:
    return GaussianRational(x.re - math.floor(x.re), x.im)


def outequiv_normal_form(e: OutEquivElement) -> OutEquivElement:
    """Real parts of v0 reduced to [0, 1)."""
    return OutEquivElement(tuple(_reduce(x) for x in e.v0), e.higher)


def _require_symplectic(model: Optional[CohomologyModel]) -> None:
    if model is not None and not model.symplectic:
        raise UnsupportedOperationError("The OutEquiv group law is only known for symplectic star products")


def outequiv_compose(
    e1: OutEquivElement, e2: OutEquivElement, model: Optional[CohomologyModel] = None
) -> OutEquivElement:
    _require_symplectic(model)
    if e1.d1 != e2.d1 or e1.order != e2.order:
        raise DimensionMismatchError(f"OutEquiv shapes differ: (d1={e1.d1}, K={e1.order}) vs (d1={e2.d1}, K={e2.order})")
    if model is not None and e1.d1 != model.d1:
        raise DimensionMismatchError(f"OutEquiv dimension {e1.d1} against d1 = {model.d1}")
    return outequiv_normal_form(
        OutEquivElement(_add(e1.v0, e2.v0), tuple(_add(a, b) for a, b in zip(e1.higher, e2.higher)))
    )


def outequiv_identity(d1: int, K: int) -> OutEquivElement:
    zero = (ZERO,) * d1
    return OutEquivElement(zero, (zero,) * K)


def outequiv_inverse(e: OutEquivElement) -> OutEquivElement:
    return outequiv_normal_form(
        OutEquivElement(tuple(-x for x in e.v0), tuple(tuple(-x for x in v) for v in e.higher))
    )


@dataclass(frozen=True)
class KernelDescription:
    """ker cl₊ ≅ (ℚ(i)/ℤ)^{d1} × Π_{r=1}^{K} ℚ(i)^{d1}."""

    d1: int
    order: int
    torus_dimension: int
    free_layers: Tuple[int, ...]
    generator_count: int
    torsion: str

    @property
    def trivial(self) -> bool:
        return self.torus_dimension == 0 and not any(self.free_layers)


def kernel_description(model: CohomologyModel, K: int) -> KernelDescription:
    _require_symplectic(model)
    if K < 0:
        raise PreconditionError(f"Truncation order must be non-negative, got {K}")
    d1 = model.d1
    if d1 == 0:
        torsion = "none (trivial kernel)"
    else:
        torsion = f"order-0 factor (Q(i)/Z)^{d1}: every rational point of the real part has finite order"
    return KernelDescription(
        d1=d1,
        order=K,
        torus_dimension=d1,
        free_layers=(d1,) * K,
        generator_count=d1 * (K + 1),
        torsion=torsion,
    )

