"""
Convolutional PML for the 2D TM update.

Each spatial derivative d/du inside the layer becomes (1/kappa) d/du + psi,
psi <- b psi + c d/du, with

    sigma(d) = sigma_max d^m,  kappa(d) = 1 + (kappa_max - 1) d^m,
    alpha(d) = alpha_max (1 - d),  sigma_max = 0.8 (m + 1) / (eta0 dx)
    b = exp(-(sigma/kappa + alpha) dt / eps0),  c = sigma (b - 1) / (sigma kappa + kappa^2 alpha)

where d in [0, 1] is the normalized depth into the layer. Depths come from
the distance to the nearer domain edge, so the profiles are exactly
mirror-symmetric. psi is stored full-size but only updated where c != 0.
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from ..constants import EPS0, ETA0
from .layout import YeeLayout

logger = logging.getLogger(__name__)

Run = Tuple[int, int]


@dataclass
class AxisProfile:
    """b, c and 1/kappa along one axis at either cell centers or edges."""
    b: np.ndarray
    c: np.ndarray
    inv_kappa: np.ndarray
    runs: List[Run]

    def runs_within(self, start: int, stop: int) -> List[Run]:
        out = []
        for a, b in self.runs:
            lo, hi = max(a, start), min(b, stop)
            if hi > lo:
                out.append((lo, hi))
        return out


def _contiguous_runs(mask: np.ndarray) -> List[Run]:
    idx = np.flatnonzero(mask)
    if len(idx) == 0:
        return []
    breaks = np.flatnonzero(np.diff(idx) > 1)
    starts = np.concatenate([[idx[0]], idx[breaks + 1]])
    stops = np.concatenate([idx[breaks] + 1, [idx[-1] + 1]])
    return list(zip(starts.tolist(), stops.tolist()))


def axis_profile(
    positions: np.ndarray,
    n_cells: int,
    thickness: int,
    order: int,
    kappa_max: float,
    alpha_max: float,
    dx: float,
    dt: float,
) -> AxisProfile:
    """Profile at `positions` (in cell units, 0..n_cells) along one axis."""
    size = len(positions)
    if thickness <= 0:
        return AxisProfile(b=np.ones(size), c=np.zeros(size), inv_kappa=np.ones(size), runs=[])

    from_edge = np.minimum(positions, n_cells - positions)
    depth = np.clip((thickness - from_edge) / thickness, 0.0, 1.0)
    inside = depth > 0

    sigma_max = 0.8 * (order + 1) / (ETA0 * dx)
    sigma = sigma_max * depth ** order
    kappa = 1.0 + (kappa_max - 1.0) * depth ** order
    alpha = np.where(inside, alpha_max * (1.0 - depth), 0.0)

    b = np.exp(-(sigma / kappa + alpha) * dt / EPS0)
    denom = sigma * kappa + kappa ** 2 * alpha
    with np.errstate(divide='ignore', invalid='ignore'):
        c = np.where(sigma > 0, sigma * (b - 1.0) / denom, 0.0)
    return AxisProfile(b=b, c=c, inv_kappa=1.0 / kappa, runs=_contiguous_runs(c != 0))


class CPML:
    """
    Absorbing layers on the selected axes.

    Along an axis without a layer the domain edge stays a perfect conductor,
    which lets guide and slab runs use the outer boundary as their walls.
    """

    def __init__(
        self,
        layout: YeeLayout,
        thickness: int = 10,
        order: int = 3,
        kappa_max: float = 1.0,
        alpha_max: float = 0.0,
        axes: Sequence[str] = ("x", "y"),
    ):
        unknown = set(axes) - {"x", "y"}
        if unknown:
            raise ValueError(f"Unknown CPML axes: {sorted(unknown)}")
        spans = [n for axis, n in (("x", layout.nx), ("y", layout.ny)) if axis in axes]
        if thickness < 0 or any(2 * thickness >= n for n in spans):
            raise ValueError(f"CPML thickness {thickness} does not fit a {layout.nx}x{layout.ny} grid")
        self.layout = layout
        self.thickness = thickness
        self.axes = tuple(axes)
        nx, ny = layout.nx, layout.ny

        def prof(n: int, positions: np.ndarray, active: bool) -> AxisProfile:
            return axis_profile(
                positions, n, thickness if active else 0, order,
                kappa_max, alpha_max, layout.dx, layout.dt,
            )

        self.x_center = prof(nx, np.arange(nx) + 0.5, "x" in axes)
        self.x_edge = prof(nx, np.arange(nx + 1, dtype=float), "x" in axes)
        self.y_center = prof(ny, np.arange(ny) + 0.5, "y" in axes)
        self.y_edge = prof(ny, np.arange(ny + 1, dtype=float), "y" in axes)

        self.psi_hz_x = np.zeros((nx, ny))
        self.psi_hz_y = np.zeros((nx, ny))
        self.psi_ex_y = np.zeros((nx, ny + 1))
        self.psi_ey_x = np.zeros((nx + 1, ny))
        logger.debug("CPML: %d cells on axes %s", thickness, ",".join(self.axes) or "none")

    def hz_curl(self, i0: int, i1: int, dey_dx: np.ndarray, dex_dy: np.ndarray) -> np.ndarray:
        """dEy/dx - dEx/dy for Hz rows i0:i1 with stretched coordinates."""
        px = self.psi_hz_x
        for a, b in self.x_center.runs_within(i0, i1):
            px[a:b] = (self.x_center.b[a:b, None] * px[a:b]
                       + self.x_center.c[a:b, None] * dey_dx[a - i0:b - i0])
        py = self.psi_hz_y
        for a, b in self.y_center.runs:
            py[i0:i1, a:b] = (self.y_center.b[None, a:b] * py[i0:i1, a:b]
                              + self.y_center.c[None, a:b] * dex_dy[:, a:b])
        return (dey_dx * self.x_center.inv_kappa[i0:i1, None] + px[i0:i1]
                - dex_dy * self.y_center.inv_kappa[None, :] - py[i0:i1])

    def ex_curl(self, i0: int, i1: int, dhz_dy: np.ndarray) -> np.ndarray:
        """dHz/dy on interior Ex edges (j = 1 .. ny-1) of rows i0:i1."""
        p = self.psi_ex_y
        ny = self.layout.ny
        for a, b in self.y_edge.runs_within(1, ny):
            p[i0:i1, a:b] = (self.y_edge.b[None, a:b] * p[i0:i1, a:b]
                             + self.y_edge.c[None, a:b] * dhz_dy[:, a - 1:b - 1])
        return dhz_dy * self.y_edge.inv_kappa[None, 1:-1] + p[i0:i1, 1:-1]

    def ey_curl(self, e0: int, e1: int, dhz_dx: np.ndarray) -> np.ndarray:
        """-dHz/dx on Ey edges e0:e1 (interior, 1 <= e < nx)."""
        p = self.psi_ey_x
        for a, b in self.x_edge.runs_within(e0, e1):
            p[a:b] = (self.x_edge.b[a:b, None] * p[a:b]
                      + self.x_edge.c[a:b, None] * dhz_dx[a - e0:b - e0])
        return -(dhz_dx * self.x_edge.inv_kappa[e0:e1, None] + p[e0:e1])
