"""
Cavity/channel network scenes and their rasterization onto the Yee grid.
"""

from .models import (
    PEC,
    VACUUM_ID,
    BentChannelSpec,
    Disc,
    GridNetworkSpec,
    GuideSpec,
    Inclusion,
    Rect,
    Scene,
)
from .scene import (
    build_bent_scene,
    build_empty_scene,
    build_grid_scene,
    build_guide_scene,
    build_scene,
    build_slab_scene,
    cavity_centers,
    cut_line,
    polyline_length,
)
from .raster import (
    MaterialEntry,
    SceneRaster,
    flood_connected,
    rasterize,
    read_raster,
    write_pgm,
    write_raster,
)
from .exceptions import CavityIndexError, GeometryError, InvalidSpecError, ResolutionError

__all__ = [
    "PEC",
    "VACUUM_ID",
    "BentChannelSpec",
    "Disc",
    "GridNetworkSpec",
    "GuideSpec",
    "Inclusion",
    "Rect",
    "Scene",
    "build_bent_scene",
    "build_empty_scene",
    "build_grid_scene",
    "build_guide_scene",
    "build_scene",
    "build_slab_scene",
    "cavity_centers",
    "cut_line",
    "polyline_length",
    "MaterialEntry",
    "SceneRaster",
    "flood_connected",
    "rasterize",
    "read_raster",
    "write_pgm",
    "write_raster",
    "CavityIndexError",
    "GeometryError",
    "InvalidSpecError",
    "ResolutionError",
]
