"""
Custom exceptions for the time-domain engine.
"""

from typing import Optional, Sequence

from ..exceptions import EnzGridError


class SimulationError(EnzGridError):
    """Base exception for engine errors."""
    pass


class StabilityError(SimulationError):
    """Raised when the time step violates the Courant bound."""

    exit_code = 2

    def __init__(self, courant: float, reason: str = "Courant factor must satisfy 0 < S <= 1"):
        self.courant = courant
        super().__init__(f"Unstable time step (S={courant!r}): {reason}")


class InstabilityError(SimulationError):
    """Raised when a NaN/Inf appears in the fields."""

    exit_code = 3

    def __init__(self, step: int, component: str = "Hz"):
        self.step = step
        self.component = component
        super().__init__(f"Non-finite {component} detected at step {step}")

    def to_dict(self):
        data = super().to_dict()
        data['step'] = self.step
        return data


class NotConvergedError(SimulationError):
    """Raised when a run must have reached steady state but did not."""

    exit_code = 4

    def __init__(self, steps: int, residual: Optional[float] = None, tolerance: Optional[float] = None):
        self.steps = steps
        self.residual = residual
        self.tolerance = tolerance
        detail = ""
        if residual is not None and tolerance is not None:
            detail = f" (last relative change {residual:.3e} > {tolerance:.1e})"
        super().__init__(f"Steady state not reached after {steps} steps{detail}")


class SourcePlacementError(SimulationError):
    """Raised when a source sits outside the grid or inside PEC."""

    exit_code = 2

    def __init__(self, position: Sequence[float], reason: str):
        self.position = tuple(position)
        super().__init__(f"Cannot place source at {self.position}: {reason}")
