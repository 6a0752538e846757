"""Collinear configurations of n labelled points in the plane."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ChartDomainError,
    ChartExit,
    ConstructionError,
    DegenerateError,
    DomainError,
    MembershipError,
    SegmentError,
)

__all__ = [
    "ChartDomainError",
    "ChartExit",
    "ConstructionError",
    "DegenerateError",
    "DomainError",
    "MembershipError",
    "SegmentError",
]
