"""
Custom exceptions for dispersive materials.
"""

from typing import List, Optional, Tuple

from ..exceptions import EnzGridError


class MaterialError(EnzGridError):
    """Base exception for material model errors."""
    pass


class DomainError(MaterialError):
    """Raised when a model is evaluated at a non-positive frequency."""

    def __init__(self, omega: float):
        self.omega = omega
        super().__init__(f"Angular frequency must be positive, got {omega!r} rad/s")


class SingularPointError(MaterialError):
    """Raised when the loss function is evaluated exactly where eps = 0."""

    def __init__(self, omega: float):
        self.omega = omega
        super().__init__(f"Permittivity is exactly zero at omega={omega!r} rad/s")


class InconclusiveFWHMError(MaterialError):
    """Raised when the loss-function peak or its half-maxima leave the scan window."""

    def __init__(self, near: float, window: Tuple[float, float], reason: str):
        self.near = near
        self.window = window
        super().__init__(
            f"Cannot resolve loss-function FWHM near {near:.6e} rad/s "
            f"in [{window[0]:.6e}, {window[1]:.6e}]: {reason}"
        )


class InfinitePhaseVelocityError(MaterialError):
    """Raised when Re(n) = 0 so the phase velocity and L_c are undefined."""

    def __init__(self, omega: float, eps: complex):
        self.omega = omega
        self.eps = eps
        super().__init__(
            f"Re(n) = 0 at omega={omega:.6e} rad/s (eps={eps}); phase velocity is infinite"
        )


class NoCrossingError(MaterialError):
    """Raised when a report needs an ENZ point and none exists in range."""

    def __init__(self, name: str, omega_range: Optional[Tuple[float, float]]):
        self.name = name
        self.omega_range = omega_range
        where = (
            f" in [{omega_range[0]:.6e}, {omega_range[1]:.6e}] rad/s" if omega_range else ""
        )
        super().__init__(f"No ENZ crossing found for '{name}'{where}")


class PresetNotFoundError(MaterialError):
    """Raised when a material preset cannot be located."""

    exit_code = 2

    def __init__(self, name: str, searched_paths: Optional[List[str]] = None):
        self.name = name
        self.searched_paths = searched_paths or []
        paths_str = ", ".join(self.searched_paths) if self.searched_paths else "unknown"
        super().__init__(f"Material preset '{name}' not found. Searched: {paths_str}")


class TableFormatError(MaterialError):
    """Raised when a permittivity table is malformed."""

    exit_code = 2

    def __init__(self, source: str, reason: str):
        self.source = source
        super().__init__(f"Bad permittivity table {source}: {reason}")


class ExtrapolationError(MaterialError):
    """Raised when tabulated data is queried outside its wavelength range."""

    def __init__(self, wavelength: float, bounds: Tuple[float, float]):
        self.wavelength = wavelength
        self.bounds = bounds
        super().__init__(
            f"Wavelength {wavelength:.6e} m outside table range "
            f"[{bounds[0]:.6e}, {bounds[1]:.6e}] m; extrapolation is not allowed"
        )
