"""
Scene builders: cavity grids, bent two-cavity channels, guides and slabs.
"""

import logging
import math
from typing import List, Sequence, Union

import numpy as np

from .exceptions import CavityIndexError, InvalidSpecError
from .models import (
    VACUUM_ID,
    BentChannelSpec,
    Disc,
    GridNetworkSpec,
    GuideSpec,
    Point,
    Rect,
    Scene,
)

logger = logging.getLogger(__name__)

CavitySpec = Union[GridNetworkSpec, BentChannelSpec]


def cavity_centers(spec: CavitySpec) -> List[Point]:
    """
    Cavity centers in index order.

    Grid cavities are numbered row-major, index = row * cols + col, with
    the lattice centered on the origin.
    """
    if isinstance(spec, BentChannelSpec):
        return [spec.center_a, spec.center_b]
    centers: List[Point] = []
    for row in range(spec.rows):
        for col in range(spec.cols):
            centers.append((
                (col - (spec.cols - 1) / 2) * spec.pitch,
                (row - (spec.rows - 1) / 2) * spec.pitch,
            ))
    return centers


def _check_index(index: int, count: int) -> None:
    if not 0 <= index < count:
        raise CavityIndexError(index, count)


def cut_line(
    spec: CavitySpec,
    i: int,
    j: int,
    spacing: float,
    extend: float = 0.0,
) -> np.ndarray:
    """
    Points spaced `spacing` along the line linking cavities i and j.

    For bent scenes the line follows the channel path. `extend` prolongs both
    ends past the cavity centers. Returns an (N, 2) array.
    """
    centers = cavity_centers(spec)
    _check_index(i, len(centers))
    _check_index(j, len(centers))
    if spacing <= 0:
        raise ValueError("spacing must be positive")

    if isinstance(spec, BentChannelSpec) and {i, j} == {0, 1}:
        vertices = spec.path if i == 0 else list(reversed(spec.path))
    else:
        vertices = [centers[i], centers[j]]
    pts = np.asarray(vertices, dtype=float)

    if extend > 0 and len(pts) >= 2:
        first = pts[0] - pts[1]
        last = pts[-1] - pts[-2]
        if np.linalg.norm(first) > 0:
            pts[0] = pts[0] + extend * first / np.linalg.norm(first)
        if np.linalg.norm(last) > 0:
            pts[-1] = pts[-1] + extend * last / np.linalg.norm(last)

    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    if total == 0:
        return pts[:1].copy()
    n = int(round(total / spacing)) + 1
    s = np.linspace(0.0, total, n)
    return np.column_stack([np.interp(s, cum, pts[:, 0]), np.interp(s, cum, pts[:, 1])])


def polyline_length(points: np.ndarray) -> float:
    return float(np.sum(np.linalg.norm(np.diff(points, axis=0), axis=1)))


def _inclusion_discs(spec: GridNetworkSpec, centers: Sequence[Point]) -> List[Disc]:
    discs = []
    for inc in spec.inclusions:
        _check_index(inc.cavity, len(centers))
        if math.hypot(*inc.offset) + inc.radius > spec.cavity_radius:
            raise InvalidSpecError(
                "grid spec", f"inclusion in cavity {inc.cavity} does not fit inside the cavity"
            )
        cx, cy = centers[inc.cavity]
        discs.append(Disc(cx + inc.offset[0], cy + inc.offset[1], inc.radius, inc.material))
    return discs


def build_grid_scene(spec: GridNetworkSpec) -> Scene:
    """
    rows x cols discs on the lattice, nearest neighbours joined by channels,
    all embedded in cladding. Paint order: cladding, channels, cavities,
    inclusions.
    """
    if spec.cavity_count > 1 and 2 * spec.cavity_radius >= spec.pitch:
        raise InvalidSpecError(
            "grid spec",
            f"discs overlap: 2*radius={2 * spec.cavity_radius:.4e} m >= pitch={spec.pitch:.4e} m",
        )
    centers = cavity_centers(spec)
    half_w = spec.channel_width / 2

    channels: List[Rect] = []
    for row in range(spec.rows):
        for col in range(spec.cols - 1):
            (xa, ya), (xb, _) = centers[spec.index(row, col)], centers[spec.index(row, col + 1)]
            channels.append(Rect(xa, ya - half_w, xb, ya + half_w, spec.channel_material))
    for row in range(spec.rows - 1):
        for col in range(spec.cols):
            (xa, ya), (_, yb) = centers[spec.index(row, col)], centers[spec.index(row + 1, col)]
            channels.append(Rect(xa - half_w, ya, xa + half_w, yb, spec.channel_material))

    cavities = [Disc(x, y, spec.cavity_radius, spec.cavity_material) for x, y in centers]
    inclusions = _inclusion_discs(spec, centers)

    extent_x = (spec.cols - 1) / 2 * spec.pitch + spec.cavity_radius + spec.cladding_thickness
    extent_y = (spec.rows - 1) / 2 * spec.pitch + spec.cavity_radius + spec.cladding_thickness
    features = [spec.channel_width] if channels else [2 * spec.cavity_radius]
    features += [2 * inc.radius for inc in spec.inclusions]

    scene = Scene(
        bounds=(-extent_x, -extent_y, extent_x, extent_y),
        background=spec.cladding_material,
        shapes=tuple(channels) + tuple(cavities) + tuple(inclusions),
        min_feature=min(features),
        cavities=tuple(centers),
        cavity_radius=spec.cavity_radius,
        kind="grid",
        meta={'rows': spec.rows, 'cols': spec.cols, 'pitch': spec.pitch},
    )
    logger.debug(
        "Built %dx%d grid scene: %d cavities, %d channels",
        spec.rows, spec.cols, len(cavities), len(channels),
    )
    return scene


def build_bent_scene(spec: BentChannelSpec) -> Scene:
    """Two discs joined by an L-shaped or straight channel inside cladding."""
    (xa, ya), (xb, yb) = spec.center_a, spec.center_b
    if math.hypot(xb - xa, yb - ya) < 2 * spec.cavity_radius and (xa, ya) != (xb, yb):
        logger.debug("Cavities overlap: merged-cavity scene")
    half_w = spec.channel_width / 2

    channels: List[Rect] = []
    path = spec.path
    for (px, py), (qx, qy) in zip(path, path[1:]):
        if py == qy:
            channels.append(Rect(min(px, qx) - half_w, py - half_w, max(px, qx) + half_w, py + half_w,
                                 spec.channel_material))
        else:
            channels.append(Rect(px - half_w, min(py, qy) - half_w, px + half_w, max(py, qy) + half_w,
                                 spec.channel_material))

    cavities = [Disc(x, y, spec.cavity_radius, spec.cavity_material) for x, y in (spec.center_a, spec.center_b)]
    pad = spec.cavity_radius + spec.cladding_thickness
    xs = [p[0] for p in path]
    ys = [p[1] for p in path]
    return Scene(
        bounds=(min(xs) - pad, min(ys) - pad, max(xs) + pad, max(ys) + pad),
        background=spec.cladding_material,
        shapes=tuple(channels) + tuple(cavities),
        min_feature=spec.channel_width,
        cavities=(spec.center_a, spec.center_b),
        cavity_radius=spec.cavity_radius,
        kind="bent",
        meta={'path_length': spec.path_length, 'bend': spec.bend},
    )


def build_guide_scene(spec: GuideSpec) -> Scene:
    """
    Input guide x in [-G, 0] centered on y = 0, channel from x = 0, output
    guide either continuing along +x (straight) or rising along +y (L).
    Guides reach the scene edge so absorbing layers can terminate them.
    """
    G, w, L = spec.guide_length, spec.channel_width, spec.channel_length
    wall = spec.wall_thickness
    shapes: List[Rect] = [Rect(-G, -spec.a1 / 2, 0.0, spec.a1 / 2, spec.guide_material)]

    if spec.bend == "straight":
        if L > 0:
            shapes.append(Rect(0.0, -w / 2, L, w / 2, spec.channel_material))
        shapes.append(Rect(L, -spec.a2 / 2, L + G, spec.a2 / 2, spec.guide_material))
        half = max(spec.a1, spec.a2) / 2 + wall
        bounds = (-G, -half, L + G, half)
        exit_center = (L + G / 2, 0.0)
    else:
        lh = lv = L / 2
        shapes.append(Rect(0.0, -w / 2, lh + w / 2, w / 2, spec.channel_material))
        shapes.append(Rect(lh - w / 2, -w / 2, lh + w / 2, lv, spec.channel_material))
        shapes.append(Rect(lh - spec.a2 / 2, lv, lh + spec.a2 / 2, lv + G, spec.guide_material))
        bounds = (-G, -spec.a1 / 2 - wall, lh + spec.a2 / 2 + wall, lv + G)
        exit_center = (lh, lv + G / 2)

    return Scene(
        bounds=bounds,
        background=spec.wall_material,
        shapes=tuple(shapes),
        min_feature=min(w, spec.a1, spec.a2),
        kind="guide",
        meta={
            'a1': spec.a1, 'a2': spec.a2, 'bend': spec.bend,
            'channel_area': spec.channel_area,
            'entry_center': (-G / 2, 0.0),
            'exit_center': exit_center,
        },
    )


def build_slab_scene(
    thickness: float,
    material: str,
    length: float,
    height: float,
    background: str = VACUUM_ID,
) -> Scene:
    """Uniform slab x in [0, thickness] spanning the full height of the domain."""
    if thickness <= 0 or length <= thickness or height <= 0:
        raise InvalidSpecError("slab", "need 0 < thickness < length and height > 0")
    x0 = -(length - thickness) / 2
    return Scene(
        bounds=(x0, -height / 2, x0 + length, height / 2),
        background=background,
        shapes=(Rect(0.0, -height, thickness, height, material),),
        min_feature=thickness,
        kind="slab",
        meta={'thickness': thickness},
    )


def build_empty_scene(width: float, height: float, background: str = VACUUM_ID) -> Scene:
    """Homogeneous box centered on the origin."""
    return Scene(
        bounds=(-width / 2, -height / 2, width / 2, height / 2),
        background=background,
        kind="empty",
    )


def build_scene(spec: Union[GridNetworkSpec, BentChannelSpec, GuideSpec]) -> Scene:
    if isinstance(spec, GridNetworkSpec):
        return build_grid_scene(spec)
    if isinstance(spec, BentChannelSpec):
        return build_bent_scene(spec)
    if isinstance(spec, GuideSpec):
        return build_guide_scene(spec)
    raise TypeError(f"Unsupported spec type {type(spec).__name__}")
