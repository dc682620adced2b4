"""
Custom exceptions for the analytic references.
"""

from typing import Sequence

from ..exceptions import EnzGridError


class OracleError(EnzGridError):
    """Base exception for oracle errors (precondition violations)."""
    pass


class CoincidentPointsError(OracleError):
    """Raised when the Green function is requested at coincident points."""

    def __init__(self, point: Sequence[float]):
        self.point = tuple(point)
        super().__init__(
            f"Green function is singular at coincident points {self.point}; "
            f"use vacuum_self_green_imag for the self term"
        )
