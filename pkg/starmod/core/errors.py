"""Exception hierarchy for the starmod engine."""


class StarmodError(ValueError):
    """Base class for every error raised by starmod."""


class DescriptorMismatchError(StarmodError):
    """Operands live over different algebra descriptors or truncation orders."""


class IndexRangeError(StarmodError):
    """A direction or multi-index is outside the algebra dimension."""


class UnsupportedOperationError(StarmodError):
    """The operation is not defined for this algebra, product or mode."""


class PreconditionError(StarmodError):
    """An input violates a documented precondition."""


class SingularError(StarmodError):
    """An order-0 matrix or element has no inverse in the coefficient algebra."""


class MembershipError(StarmodError):
    """A module element or endomorphism is outside its module or corner algebra."""


class NoEquivalenceError(StarmodError):
    """Two deformations do not share the classical data needed for an equivalence."""


class IndeterminateError(StarmodError):
    """A classical quantity cannot be decided inside the vector-bundle regime."""


class DimensionMismatchError(StarmodError):
    """Vectors or matrices have incompatible shapes."""


class InconsistencyError(StarmodError):
    """A derived result failed its own re-verification."""


class ParseError(StarmodError):
    """Serialized input could not be decoded."""


class ScenarioError(StarmodError):
    """A scenario file violates its schema or references unknown objects."""
