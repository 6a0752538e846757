"""Exception hierarchy shared by all modules."""


class SegmentError(ValueError):
    """Base class for every error raised by this package."""


class DomainError(SegmentError):
    """Input outside the domain of a map (zero vector, zero complex number, ...)."""


class MembershipError(SegmentError):
    """Point is not in the manifold the operation requires."""


class DegenerateError(SegmentError):
    """Diagonal input where a non-degenerate segment is needed."""


class ChartDomainError(SegmentError):
    """Point lies outside the requested chart.

    ``admissible`` holds the chart indices whose domain does contain the point.
    """

    def __init__(self, message, admissible=()):
        super().__init__(message)
        self.admissible = tuple(admissible)


class ChartExit(SegmentError):
    """Geodesic integration left the chart domain."""


class ConstructionError(SegmentError):
    """A verified construction failed its own verification."""
