"""
Custom exceptions for scene construction and rasterization.
"""

from ..exceptions import EnzGridError


class GeometryError(EnzGridError):
    """Base exception for geometry errors."""
    pass


class InvalidSpecError(GeometryError, ValueError):
    """Raised when a scene spec violates its invariants."""

    exit_code = 2

    def __init__(self, spec: str, reason: str):
        self.spec = spec
        self.reason = reason
        super().__init__(f"Invalid {spec}: {reason}")


class ResolutionError(GeometryError):
    """Raised when the cell size cannot resolve the narrowest feature."""

    exit_code = 2

    def __init__(self, cell_size: float, min_feature: float, cells_required: int):
        self.cell_size = cell_size
        self.min_feature = min_feature
        self.cells_required = cells_required
        super().__init__(
            f"Cell size {cell_size:.4e} m too coarse: the narrowest feature "
            f"({min_feature:.4e} m) needs >= {cells_required} cells"
        )


class CavityIndexError(GeometryError, IndexError):
    """Raised when a cavity index is outside the scene."""

    def __init__(self, index: int, count: int):
        self.index = index
        self.count = count
        super().__init__(f"Cavity index {index} out of range (scene has {count} cavities)")
