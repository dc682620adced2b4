"""
Custom exceptions for post-processing of run results.
"""

from typing import Iterable, Sequence

from ..exceptions import EnzGridError


class AnalysisError(EnzGridError):
    """Base exception for analysis errors."""
    pass


class MissingMonitorError(AnalysisError):
    """Raised when a run lacks the monitors an analysis needs."""

    exit_code = 5

    def __init__(self, names: Iterable[str], analysis: str = ""):
        self.names = sorted(names)
        where = f" for {analysis}" if analysis else ""
        super().__init__(f"Run is missing monitor(s){where}: {', '.join(self.names)}")

    def to_dict(self):
        data = super().to_dict()
        data['monitors'] = self.names
        return data


class FrequencyMismatchError(AnalysisError):
    """Raised when a requested frequency is not the one the data was taken at."""

    def __init__(self, requested: float, available: Sequence[float]):
        self.requested = requested
        self.available = tuple(available)
        listed = ", ".join(f"{w:.6e}" for w in self.available)
        super().__init__(f"No data at omega={requested:.6e} rad/s (available: {listed})")


class ConvergenceRequiredError(AnalysisError):
    """Raised when an analysis needs a run that reached steady state."""

    exit_code = 4

    def __init__(self, analysis: str, steps: int):
        self.analysis = analysis
        self.steps = steps
        super().__init__(f"{analysis} needs a converged run; run stopped unconverged after {steps} steps")
