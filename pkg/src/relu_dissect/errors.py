"""Exception types shared across the library."""


class ReluDissectError(Exception):
    """Base class for all errors raised by this package."""


class MalformedProblem(ReluDissectError):
    """LP data is inconsistent: dimension mismatch or non-finite entries."""


class DimensionMismatch(ReluDissectError):
    """Operands disagree on the ambient dimension."""


class NonFiniteInput(ReluDissectError):
    """An input vector contains NaN or infinity."""


class UnboundedRegion(ReluDissectError):
    """A polyhedron is unbounded where a bounded one is required."""


class UnboundedDomain(UnboundedRegion):
    """The conversion domain is not bounded in every direction."""


class EmptyRegion(ReluDissectError):
    """A polyhedron has empty interior where a full-dimensional one is required."""


class EmptyDomain(EmptyRegion):
    """The conversion domain has no interior."""


class OutOfRange(ReluDissectError):
    """An integer argument is outside the accepted range."""


class IndexOutOfRange(OutOfRange):
    """A row index does not address a neuron row of the matrix."""


class OutsideDomain(ReluDissectError):
    """A query point lies in no region of the piecewise function."""


class SchemaError(ReluDissectError):
    """A document does not conform to the expected JSON schema."""


class DimensionChainError(SchemaError):
    """Layer widths do not chain: a layer's input width differs from the
    preceding layer's output width."""


class NonFiniteWeight(SchemaError):
    """A weight or bias entry in a network document is NaN or infinity."""


class DomainMismatch(ReluDissectError):
    """Network and PWA function disagree on input/output dimensions."""
