"""Exception hierarchy shared by all wcluster modules."""


class WclusterError(Exception):
    """Base class for all package-specific errors."""


class NotSpdError(WclusterError, ValueError):
    """A matrix fails the symmetric positive-definite requirements."""


class IllConditionedError(WclusterError, ValueError):
    """A matrix is too close to singular for the requested operation."""


class NonFiniteError(WclusterError, ValueError):
    """An input contains NaN or infinite entries."""


class DimMismatchError(WclusterError, ValueError):
    """Operands have incompatible dimensions."""


class NumericalBreakdownError(WclusterError, ArithmeticError):
    """A numerical guard was exceeded beyond what rounding noise explains."""


class InvalidWeightsError(WclusterError, ValueError):
    """A weight vector is not a point on the unit simplex."""


class OutOfRangeError(WclusterError, ValueError):
    """A curve parameter lies outside the closed unit interval."""


class EmptyClusterError(WclusterError, ValueError):
    """A cluster has no members where at least one is required."""


class SizeMismatchError(WclusterError, ValueError):
    """Cluster sizes do not add up to the collection size."""


class KTooLargeError(WclusterError, ValueError):
    """More clusters requested than there are observations."""


class TooFewRecordsError(WclusterError, ValueError):
    """Not enough rows to summarize an entity into a measure."""


class ParseError(WclusterError, ValueError):
    """A data file contains a row that cannot be parsed."""


class SchemaError(WclusterError, ValueError):
    """A data file does not match the expected schema."""


class OverlappingPeriodsError(WclusterError, ValueError):
    """Period specifications overlap in their interior."""
