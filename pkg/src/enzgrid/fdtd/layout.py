"""
Yee layout for the 2D TM (Ex, Ey, Hz) update.

Hz lives at cell centers, shape (nx, ny). Ex lives on horizontal edges,
shape (nx, ny + 1), at (x0 + (i + 1/2) dx, y0 + j dx). Ey lives on vertical
edges, shape (nx + 1, ny), at (x0 + i dx, y0 + (j + 1/2) dx). Outer-boundary
tangential E is never updated, so the domain edge is a perfect conductor.
"""

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np

from ..constants import C0
from ..materials.dispersion import refractive_index
from ..materials.models import DispersionModel
from .exceptions import StabilityError


def courant_dt(dx: float, courant: float) -> float:
    """dt = S dx / (c sqrt 2)."""
    if not dx > 0:
        raise ValueError(f"cell size must be positive, got {dx}")
    if not 0 < courant <= 1:
        raise StabilityError(courant)
    return courant * dx / (C0 * math.sqrt(2.0))


@dataclass(frozen=True)
class YeeLayout:
    dx: float
    nx: int
    ny: int
    dt: float
    origin: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError(f"grid must have at least one cell, got {self.nx}x{self.ny}")
        limit = self.dx / (C0 * math.sqrt(2.0))
        if not 0 < self.dt <= limit * (1 + 1e-12):
            raise StabilityError(self.dt / limit, f"dt={self.dt:.4e} s exceeds {limit:.4e} s")

    @property
    def courant(self) -> float:
        return self.dt * C0 * math.sqrt(2.0) / self.dx

    def hz_coords(self) -> Tuple[np.ndarray, np.ndarray]:
        x = self.origin[0] + (np.arange(self.nx) + 0.5) * self.dx
        y = self.origin[1] + (np.arange(self.ny) + 0.5) * self.dx
        return x, y

    def cell_of(self, x: float, y: float) -> Tuple[int, int]:
        """Index of the cell containing (x, y); may lie outside the grid."""
        return (int(math.floor((x - self.origin[0]) / self.dx)),
                int(math.floor((y - self.origin[1]) / self.dx)))

    def contains_cell(self, i: int, j: int) -> bool:
        return 0 <= i < self.nx and 0 <= j < self.ny

    def cell_center(self, i: int, j: int) -> Tuple[float, float]:
        return (self.origin[0] + (i + 0.5) * self.dx, self.origin[1] + (j + 0.5) * self.dx)


def steps_per_period(omega: float, dt_max: float) -> int:
    return int(math.ceil(2 * math.pi / omega / dt_max))


def choose_cell_size(
    omega: float,
    models: Iterable[Optional[DispersionModel]],
    min_feature: float,
    cells_per_wavelength: int = 20,
    min_feature_cells: int = 4,
) -> float:
    """
    Finest of: cells_per_wavelength per wavelength in the densest medium,
    min_feature_cells across the narrowest feature. PEC entries are None.
    """
    index = 1.0
    for model in models:
        if model is None:
            continue
        n = refractive_index(model.evaluate(omega))
        index = max(index, n.real)
    wavelength = 2 * math.pi * C0 / omega / index
    dx = wavelength / cells_per_wavelength
    if math.isfinite(min_feature):
        dx = min(dx, min_feature / min_feature_cells)
    return dx
