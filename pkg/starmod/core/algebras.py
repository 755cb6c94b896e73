"""Coefficient algebras: trigonometric polynomials on the 2-torus and polynomials on the plane.

Both algebras are spanned by monomials indexed by integer vectors (Fourier modes on the
torus, exponents on the plane) and multiply by adding indices. They differ in how
derivatives, conjugation and integration act on a monomial.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from starmod.core.errors import (
    DescriptorMismatchError,
    IndexRangeError,
    PreconditionError,
    SingularError,
    UnsupportedOperationError,
)
from starmod.core.scalars import I, ZERO, GaussianRational, Number


TORUS = "torus"
PLANE = "plane"

Key = Tuple[int, ...]


@dataclass(frozen=True)
class AlgebraDescriptor:
    """Which algebra, its dimension and its constant Poisson tensor π^{jk}."""

    kind: str
    dim: int
    poisson: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        if self.kind not in (TORUS, PLANE):
            raise PreconditionError(f"Unknown algebra kind: {self.kind!r}")
        if self.dim < 2 or self.dim % 2:
            raise PreconditionError(f"dim must be even and at least 2, got {self.dim}")
        if self.kind == TORUS and self.dim != 2:
            raise PreconditionError("The torus algebra is two-dimensional")
        matrix = tuple(tuple(Fraction(v) for v in row) for row in self.poisson)
        if len(matrix) != self.dim or any(len(row) != self.dim for row in matrix):
            raise PreconditionError(f"Poisson tensor must be {self.dim}x{self.dim}")
        for j in range(self.dim):
            for k in range(self.dim):
                if matrix[j][k] != -matrix[k][j]:
                    raise PreconditionError("Poisson tensor must be antisymmetric")
        object.__setattr__(self, "poisson", matrix)

    @classmethod
    def torus(cls, theta: Union[int, Fraction]) -> "AlgebraDescriptor":
        theta = Fraction(theta)
        return cls(TORUS, 2, ((Fraction(0), theta), (-theta, Fraction(0))))

    @classmethod
    def plane(cls, poisson: Sequence[Sequence[Union[int, Fraction]]]) -> "AlgebraDescriptor":
        return cls(PLANE, len(poisson), tuple(tuple(Fraction(v) for v in row) for row in poisson))

    @classmethod
    def canonical_plane(cls, n: int = 1) -> "AlgebraDescriptor":
        """Plane of dimension 2n with π^{j,j+n} = 1 = -π^{j+n,j}."""
        dim = 2 * n
        rows = [[Fraction(0)] * dim for _ in range(dim)]
        for j in range(n):
            rows[j][j + n] = Fraction(1)
            rows[j + n][j] = Fraction(-1)
        return cls(PLANE, dim, tuple(tuple(row) for row in rows))

    @property
    def theta(self) -> Fraction:
        if self.kind != TORUS:
            raise UnsupportedOperationError("theta is only defined for the torus algebra")
        return self.poisson[0][1]

    def poisson_pairs(self) -> List[Tuple[int, int, Fraction]]:
        """Nonzero entries (j, k, π^{jk}) with 1-based directions."""
        return [
            (j + 1, k + 1, self.poisson[j][k])
            for j in range(self.dim)
            for k in range(self.dim)
            if self.poisson[j][k] != 0
        ]

    def is_trivial(self) -> bool:
        return not self.poisson_pairs()


class AlgebraElement:
    """Finite linear combination of monomials with Gaussian-rational coefficients.

    Instances are immutable; zero coefficients are never stored.
    """

    __slots__ = ("descriptor", "_terms", "_hash")

    def __init__(
        self,
        descriptor: AlgebraDescriptor,
        terms: Optional[Mapping[Key, Number]] = None,
        _trusted: bool = False,
    ) -> None:
        self.descriptor = descriptor
        self._hash: Optional[int] = None
        if _trusted:
            self._terms: Dict[Key, GaussianRational] = dict(terms or {})
            return
        cleaned: Dict[Key, GaussianRational] = {}
        for key, coeff in (terms or {}).items():
            key = tuple(int(k) for k in key)
            self._check_key(key)
            value = GaussianRational.coerce(coeff)
            if value:
                cleaned[key] = cleaned.get(key, ZERO) + value
        self._terms = {k: v for k, v in cleaned.items() if v}

    # Subclass hooks

    def _check_key(self, key: Key) -> None:
        if len(key) != self.descriptor.dim:
            raise IndexRangeError(f"Index {key} does not match dimension {self.descriptor.dim}")

    def derive(self, j: int) -> "AlgebraElement":
        raise NotImplementedError

    def conjugate(self) -> "AlgebraElement":
        raise NotImplementedError

    def integrate(self) -> GaussianRational:
        raise UnsupportedOperationError(
            f"No normalized trace on the {self.descriptor.kind} algebra"
        )

    # Construction helpers

    def _new(self, terms: Dict[Key, GaussianRational]) -> "AlgebraElement":
        return type(self)(self.descriptor, {k: v for k, v in terms.items() if v}, _trusted=True)

    def _check_same(self, other: "AlgebraElement") -> None:
        if not isinstance(other, AlgebraElement):
            raise TypeError(f"Expected an algebra element, got {type(other).__name__}")
        if other.descriptor != self.descriptor:
            raise DescriptorMismatchError(
                f"Descriptor mismatch: {self.descriptor} vs {other.descriptor}"
            )

    @property
    def zero_key(self) -> Key:
        return (0,) * self.descriptor.dim

    # Ring structure

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check_same(other)
        terms = dict(self._terms)
        for key, coeff in other._terms.items():
            terms[key] = terms.get(key, ZERO) + coeff
        return self._new(terms)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def __neg__(self) -> "AlgebraElement":
        return self._new({k: -v for k, v in self._terms.items()})

    def scale(self, c: Number) -> "AlgebraElement":
        c = GaussianRational.coerce(c)
        if not c:
            return self._new({})
        return self._new({k: v * c for k, v in self._terms.items()})

    def __mul__(self, other: Union["AlgebraElement", Number]) -> "AlgebraElement":
        if not isinstance(other, AlgebraElement):
            return self.scale(other)
        self._check_same(other)
        terms: Dict[Key, GaussianRational] = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                key = tuple(a + b for a, b in zip(k1, k2))
                terms[key] = terms.get(key, ZERO) + c1 * c2
        return self._new(terms)

    def __rmul__(self, other: Number) -> "AlgebraElement":
        return self.scale(other)

    # Inspection

    def terms(self) -> List[Tuple[Key, GaussianRational]]:
        """Terms in canonical (lexicographic) order."""
        return sorted(self._terms.items())

    def coefficient(self, key: Iterable[int]) -> GaussianRational:
        return self._terms.get(tuple(key), ZERO)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return all(key == self.zero_key for key in self._terms)

    def constant_value(self) -> GaussianRational:
        return self._terms.get(self.zero_key, ZERO)

    def is_real(self) -> bool:
        return self.conjugate() == self

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.descriptor == other.descriptor and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.descriptor, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        if not self._terms:
            return f"{type(self).__name__}(0)"
        body = " + ".join(f"({c})*{k}" for k, c in self.terms())
        return f"{type(self).__name__}({body})"


class TorusElement(AlgebraElement):
    """Σ coeff(m)·e_m with e_m(q) = exp(i m·q); ∂_j e_m = i m_j e_m."""

    __slots__ = ()

    def derive(self, j: int) -> "TorusElement":
        _check_direction(self.descriptor, j)
        return self._new({m: c * I * m[j - 1] for m, c in self._terms.items()})

    def conjugate(self) -> "TorusElement":
        return self._new({tuple(-x for x in m): c.conjugate() for m, c in self._terms.items()})

    def integrate(self) -> GaussianRational:
        return self._terms.get(self.zero_key, ZERO)


class PlaneElement(AlgebraElement):
    """Σ coeff(α)·x^α on the plane with real coordinates."""

    __slots__ = ()

    def _check_key(self, key: Key) -> None:
        super()._check_key(key)
        if any(a < 0 for a in key):
            raise IndexRangeError(f"Negative exponent in {key}")

    def derive(self, j: int) -> "PlaneElement":
        _check_direction(self.descriptor, j)
        terms: Dict[Key, GaussianRational] = {}
        for alpha, c in self._terms.items():
            power = alpha[j - 1]
            if power:
                lowered = alpha[: j - 1] + (power - 1,) + alpha[j:]
                terms[lowered] = c * power
        return self._new(terms)

    def conjugate(self) -> "PlaneElement":
        return self._new({alpha: c.conjugate() for alpha, c in self._terms.items()})

    def degree(self) -> int:
        return max((sum(alpha) for alpha in self._terms), default=0)


def _check_direction(descriptor: AlgebraDescriptor, j: int) -> None:
    if not 1 <= j <= descriptor.dim:
        raise IndexRangeError(f"Direction {j} outside 1..{descriptor.dim}")


def element(descriptor: AlgebraDescriptor, terms: Optional[Mapping[Key, Number]] = None) -> AlgebraElement:
    """Build an element of the algebra named by the descriptor."""
    cls = TorusElement if descriptor.kind == TORUS else PlaneElement
    return cls(descriptor, terms)


def zero(descriptor: AlgebraDescriptor) -> AlgebraElement:
    return element(descriptor)


def constant(descriptor: AlgebraDescriptor, c: Number) -> AlgebraElement:
    return element(descriptor, {(0,) * descriptor.dim: c})


def one(descriptor: AlgebraDescriptor) -> AlgebraElement:
    return constant(descriptor, 1)


def monomial(descriptor: AlgebraDescriptor, key: Sequence[int], c: Number = 1) -> AlgebraElement:
    return element(descriptor, {tuple(key): c})


def alg_mul(f: AlgebraElement, g: AlgebraElement) -> AlgebraElement:
    """Undeformed (pointwise) product."""
    return f * g


def alg_derive(f: AlgebraElement, j: int) -> AlgebraElement:
    """Partial derivative ∂_j, directions numbered from 1."""
    return f.derive(j)


def derive_multi(f: AlgebraElement, alpha: Sequence[int]) -> AlgebraElement:
    """Iterated derivative ∂^α."""
    if len(alpha) != f.descriptor.dim:
        raise IndexRangeError(f"Multi-index {tuple(alpha)} does not match dimension {f.descriptor.dim}")
    result = f
    for j, power in enumerate(alpha, start=1):
        for _ in range(power):
            if result.is_zero():
                return result
            result = result.derive(j)
    return result


def alg_conjugate(f: AlgebraElement) -> AlgebraElement:
    return f.conjugate()


def alg_integrate(f: AlgebraElement) -> GaussianRational:
    """Normalized integral (∫1 = 1); only the torus carries one."""
    return f.integrate()


def poisson_bracket(f: AlgebraElement, g: AlgebraElement) -> AlgebraElement:
    """{f, g} = Σ π^{jk} ∂_j f ∂_k g."""
    f._check_same(g)
    result = zero(f.descriptor)
    for j, k, value in f.descriptor.poisson_pairs():
        result = result + (f.derive(j) * g.derive(k)).scale(value)
    return result


def unit_inverse(f: AlgebraElement) -> AlgebraElement:
    """Inverse of a unit: c·e_m on the torus, a nonzero constant on the plane."""
    if len(f) != 1:
        raise SingularError(f"{f!r} is not a unit: units have exactly one term")
    (key, c), = f.terms()
    if f.descriptor.kind == TORUS:
        return monomial(f.descriptor, tuple(-k for k in key), c.inverse())
    if any(key):
        raise SingularError(f"{f!r} is not a unit: only nonzero constants are invertible polynomials")
    return constant(f.descriptor, c.inverse())
