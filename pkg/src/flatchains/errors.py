"""Exception types shared across the package."""


class FlatChainError(Exception):
    """Base class for all library errors."""


class GroupMismatchError(FlatChainError):
    """Two values from different coefficient groups were combined."""


class InvalidElementError(FlatChainError):
    """A payload does not describe a valid element of its group."""


class ChainStructureError(FlatChainError):
    """A chain violates a structural invariant (dimension mismatch,
    degenerate data where forbidden, overlapping interiors, ...)."""


class TransversalityError(FlatChainError):
    """A slicing plane is not transverse to the chain.

    Retryable: almost every translate of the plane works, so callers
    should re-randomize the offset and try again.
    """

    retryable = True


class UnsupportedInstanceError(FlatChainError):
    """The instance is outside the range this implementation covers
    (group without an exact solver, too many atoms, dimension beyond
    desk scale)."""


class SchemaError(FlatChainError):
    """An input file violates its JSON schema."""

    def __init__(self, field, constraint):
        self.field = field
        self.constraint = constraint
        super().__init__(f"field {field!r}: {constraint}")
