"""
Rasterization of analytic scenes onto the Yee cell grid, plus raster export.

Cell (i, j) has its center at origin + ((i + 1/2) dx, (j + 1/2) dx); the
grid is centered on the scene so mirror-symmetric scenes give mirror-
symmetric rasters.
"""

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

import numpy as np
from scipy import ndimage

from ..exceptions import ConfigError
from ..materials.models import DispersionModel, Material, TabulatedPermittivity
from ..materials.presets import resolve_material
from .exceptions import ResolutionError
from .models import PEC, Scene

logger = logging.getLogger(__name__)

MIN_FEATURE_CELLS = 4


@dataclass(frozen=True)
class MaterialEntry:
    """One row of a raster's material table."""
    name: str
    model: Optional[DispersionModel] = None

    @property
    def is_pec(self) -> bool:
        return self.model is None

    def to_dict(self) -> Dict[str, Any]:
        return {'name': self.name, 'pec': self.is_pec,
                'model': None if self.model is None else self.model.to_dict()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'MaterialEntry':
        model = None if data.get('pec') else DispersionModel.from_dict(data['model'])
        return cls(name=data['name'], model=model)


@dataclass
class SceneRaster:
    """Material id per cell plus the id -> material table."""
    cell_size: float
    ids: np.ndarray  # uint8, shape (nx, ny)
    table: Tuple[MaterialEntry, ...]
    origin: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.ids.ndim != 2:
            raise ValueError("ids must be a 2D array")
        if self.ids.size and int(self.ids.max()) >= len(self.table):
            raise ValueError("raster uses a material id missing from the table")

    @property
    def nx(self) -> int:
        return self.ids.shape[0]

    @property
    def ny(self) -> int:
        return self.ids.shape[1]

    def cell_center(self, i: int, j: int) -> Tuple[float, float]:
        return (self.origin[0] + (i + 0.5) * self.cell_size,
                self.origin[1] + (j + 0.5) * self.cell_size)

    def cell_of(self, x: float, y: float) -> Tuple[int, int]:
        """Index of the cell containing (x, y), clamped to the grid."""
        i = int(math.floor((x - self.origin[0]) / self.cell_size))
        j = int(math.floor((y - self.origin[1]) / self.cell_size))
        return min(max(i, 0), self.nx - 1), min(max(j, 0), self.ny - 1)

    def id_of(self, name: str) -> int:
        for k, entry in enumerate(self.table):
            if entry.name == name:
                return k
        raise KeyError(name)

    def pec_mask(self) -> np.ndarray:
        pec_ids = [k for k, e in enumerate(self.table) if e.is_pec]
        return np.isin(self.ids, pec_ids)

    def cell_count(self, name: str) -> int:
        return int(np.count_nonzero(self.ids == self.id_of(name)))

    def header(self) -> Dict[str, Any]:
        return {
            'nx': self.nx,
            'ny': self.ny,
            'cell_size_m': self.cell_size,
            'origin_m': list(self.origin),
            'material_table': [e.to_dict() for e in self.table],
        }


def _material_entry(
    name: str,
    materials: Optional[Mapping[str, Material]],
    preset_directory: Optional[Union[str, Path]],
) -> MaterialEntry:
    if name.lower() == PEC:
        return MaterialEntry(name=name)
    material = materials[name] if materials and name in materials else resolve_material(name, preset_directory)
    if isinstance(material, TabulatedPermittivity):
        raise ConfigError(f"material '{name}' is tabulated; time-domain runs need a dispersion model", "materials")
    return MaterialEntry(name=name, model=material)


def grid_shape(scene: Scene, cell_size: float) -> Tuple[int, int]:
    def count(extent: float) -> int:
        n = extent / cell_size
        return max(1, int(round(n)) if abs(n - round(n)) < 1e-6 else int(math.ceil(n)))
    return count(scene.width), count(scene.height)


def rasterize(
    scene: Scene,
    cell_size: float,
    materials: Optional[Mapping[str, Material]] = None,
    preset_directory: Optional[Union[str, Path]] = None,
    workers: int = 1,
    min_cells: int = MIN_FEATURE_CELLS,
) -> SceneRaster:
    """
    Sample the material id at every cell center.

    Later shapes override earlier ones. `materials` overrides preset lookup
    for the named ids.
    """
    if cell_size <= 0:
        raise ValueError("cell_size must be positive")
    if math.isfinite(scene.min_feature) and cell_size > scene.min_feature / min_cells * (1 + 1e-9):
        raise ResolutionError(cell_size, scene.min_feature, min_cells)

    names = scene.material_ids
    table = tuple(_material_entry(n, materials, preset_directory) for n in names)
    index = {n: k for k, n in enumerate(names)}

    nx, ny = grid_shape(scene, cell_size)
    cx, cy = scene.center
    offs_x = (np.arange(nx) + 0.5 - nx / 2) * cell_size
    offs_y = (np.arange(ny) + 0.5 - ny / 2) * cell_size
    origin = (cx - nx / 2 * cell_size, cy - ny / 2 * cell_size)
    ids = np.full((nx, ny), index[scene.background], dtype=np.uint8)

    def paint(block: slice) -> None:
        x = (cx + offs_x[block])[:, None]
        y = (cy + offs_y)[None, :]
        view = ids[block]
        for shape in scene.shapes:
            view[shape.contains(x, y)] = index[shape.material]

    workers = max(1, min(workers, nx))
    bounds = np.linspace(0, nx, workers + 1).astype(int)
    blocks = [slice(a, b) for a, b in zip(bounds, bounds[1:]) if b > a]
    if len(blocks) == 1:
        paint(blocks[0])
    else:
        with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
            list(pool.map(paint, blocks))

    logger.debug("Rasterized %s scene to %dx%d cells at %.3e m", scene.kind, nx, ny, cell_size)
    return SceneRaster(cell_size=cell_size, ids=ids, table=table, origin=origin)


def flood_connected(raster: SceneRaster, start: Tuple[int, int]) -> np.ndarray:
    """Cells 4-connected to `start` through non-PEC, non-background cells."""
    blocked = raster.pec_mask() | (raster.ids == 0)
    labels, _ = ndimage.label(~blocked)
    label = labels[start]
    if label == 0:
        return np.zeros_like(blocked)
    return labels == label


def write_raster(raster: SceneRaster, path: Union[str, Path]) -> Path:
    """JSON header line followed by the row-major (y rows of nx bytes) id grid."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'wb') as f:
        f.write(json.dumps(raster.header(), sort_keys=True).encode('utf-8') + b"\n")
        f.write(np.ascontiguousarray(raster.ids.T, dtype=np.uint8).tobytes())
    return path


def read_raster(path: Union[str, Path]) -> SceneRaster:
    with open(path, 'rb') as f:
        header = json.loads(f.readline().decode('utf-8'))
        data = f.read()
    nx, ny = header['nx'], header['ny']
    ids = np.frombuffer(data, dtype=np.uint8, count=nx * ny).reshape(ny, nx).T.copy()
    return SceneRaster(
        cell_size=header['cell_size_m'],
        ids=ids,
        table=tuple(MaterialEntry.from_dict(e) for e in header['material_table']),
        origin=tuple(header['origin_m']),
    )


def write_pgm(raster: SceneRaster, path: Union[str, Path]) -> Path:
    """Binary PGM (P5) preview, top row = largest y, PEC black."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    levels = np.zeros(len(raster.table), dtype=np.uint8)
    others = [k for k, e in enumerate(raster.table) if not e.is_pec]
    for rank, k in enumerate(others):
        levels[k] = 255 - int(rank * 200 / max(len(others) - 1, 1))
    image = levels[raster.ids.T[::-1, :]]
    with open(path, 'wb') as f:
        f.write(f"P5\n{raster.nx} {raster.ny}\n255\n".encode('ascii'))
        f.write(np.ascontiguousarray(image).tobytes())
    return path
