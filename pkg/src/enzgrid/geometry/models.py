"""
Scene specs and analytic shapes.

All coordinates are metres. Material ids are strings resolved at
rasterization time ("pec", "vacuum"/"air", or a preset name).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Tuple

import numpy as np

from ..config import parse_length
from .exceptions import InvalidSpecError

PEC = "pec"
VACUUM_ID = "vacuum"

Point = Tuple[float, float]


@dataclass(frozen=True)
class Disc:
    cx: float
    cy: float
    radius: float
    material: str

    def contains(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return (x - self.cx) ** 2 + (y - self.cy) ** 2 <= self.radius ** 2

    @property
    def area(self) -> float:
        return math.pi * self.radius ** 2


@dataclass(frozen=True)
class Rect:
    x0: float
    y0: float
    x1: float
    y1: float
    material: str

    def __post_init__(self):
        if self.x1 < self.x0 or self.y1 < self.y0:
            raise InvalidSpecError("rectangle", f"inverted corners ({self.x0}, {self.y0}, {self.x1}, {self.y1})")

    def contains(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return (x >= self.x0) & (x <= self.x1) & (y >= self.y0) & (y <= self.y1)

    @property
    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)


Shape = Any  # Disc | Rect


@dataclass(frozen=True)
class Inclusion:
    """A disc placed inside a cavity, optionally off-center."""
    cavity: int
    radius: float
    material: str
    offset: Point = (0.0, 0.0)

    @classmethod
    def from_dict(cls, data: Dict[str, Any], path: str = "inclusion") -> 'Inclusion':
        offset = data.get('offset', (0.0, 0.0))
        return cls(
            cavity=int(data['cavity']),
            radius=parse_length(data['radius'], f"{path}.radius"),
            material=str(data['material']),
            offset=(parse_length(offset[0], f"{path}.offset"), parse_length(offset[1], f"{path}.offset")),
        )


@dataclass(frozen=True)
class GridNetworkSpec:
    """rows x cols cavities on a square lattice joined by straight channels."""
    rows: int
    cols: int
    pitch: float
    cavity_radius: float
    channel_width: float
    cladding_thickness: float
    cavity_material: str = VACUUM_ID
    channel_material: str = "enz_illustrative"
    cladding_material: str = PEC
    inclusions: Tuple[Inclusion, ...] = ()

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise InvalidSpecError("grid spec", f"rows and cols must be >= 1, got {self.rows}x{self.cols}")
        if self.pitch <= 0 or self.cavity_radius <= 0 or self.channel_width <= 0:
            raise InvalidSpecError("grid spec", "pitch, cavity_radius and channel_width must be positive")
        if self.cladding_thickness < 0:
            raise InvalidSpecError("grid spec", "cladding_thickness must be >= 0")
        if self.channel_width >= 2 * self.cavity_radius:
            raise InvalidSpecError(
                "grid spec", f"channel_width {self.channel_width} must be < cavity diameter"
            )
        if not isinstance(self.inclusions, tuple):
            object.__setattr__(self, 'inclusions', tuple(self.inclusions))

    @property
    def cavity_count(self) -> int:
        return self.rows * self.cols

    @property
    def channel_count(self) -> int:
        return self.rows * (self.cols - 1) + self.cols * (self.rows - 1)

    def index(self, row: int, col: int) -> int:
        return row * self.cols + col

    def position(self, index: int) -> Tuple[int, int]:
        return divmod(index, self.cols)

    @classmethod
    def from_dict(cls, data: Dict[str, Any], path: str = "scene") -> 'GridNetworkSpec':
        try:
            return cls(
                rows=int(data['rows']),
                cols=int(data['cols']),
                pitch=parse_length(data['pitch'], f"{path}.pitch"),
                cavity_radius=parse_length(data['cavity_radius'], f"{path}.cavity_radius"),
                channel_width=parse_length(data.get('channel_width', '100nm'), f"{path}.channel_width"),
                cladding_thickness=parse_length(data.get('cladding_thickness', '100nm'), f"{path}.cladding_thickness"),
                cavity_material=str(data.get('cavity_material', VACUUM_ID)),
                channel_material=str(data.get('channel_material', 'enz_illustrative')),
                cladding_material=str(data.get('cladding_material', PEC)),
                inclusions=tuple(
                    Inclusion.from_dict(inc, f"{path}.inclusions[{i}]")
                    for i, inc in enumerate(data.get('inclusions') or [])
                ),
            )
        except KeyError as e:
            raise InvalidSpecError("grid spec", f"missing field {e}") from e

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['kind'] = 'grid'
        return data


@dataclass(frozen=True)
class BentChannelSpec:
    """Two cavities joined by a straight or right-angle (L) channel."""
    center_a: Point
    center_b: Point
    cavity_radius: float
    channel_width: float
    bend: str = "L"
    cladding_thickness: float = 100e-9
    cavity_material: str = VACUUM_ID
    channel_material: str = "enz_illustrative"
    cladding_material: str = PEC

    def __post_init__(self):
        if self.bend not in ("L", "straight"):
            raise InvalidSpecError("bent-channel spec", f"bend must be 'L' or 'straight', got {self.bend!r}")
        if self.cavity_radius <= 0 or self.channel_width <= 0:
            raise InvalidSpecError("bent-channel spec", "cavity_radius and channel_width must be positive")
        if self.channel_width >= 2 * self.cavity_radius:
            raise InvalidSpecError("bent-channel spec", "channel_width must be < cavity diameter")
        if self.bend == "straight" and self.center_a[0] != self.center_b[0] and self.center_a[1] != self.center_b[1]:
            raise InvalidSpecError("bent-channel spec", "straight channel needs axis-aligned centers")

    @property
    def corner(self) -> Point:
        """Corner of the L path: leave a horizontally, arrive at b vertically."""
        return (self.center_b[0], self.center_a[1])

    @property
    def path(self) -> List[Point]:
        if self.bend == "L" and self.center_a[0] != self.center_b[0] and self.center_a[1] != self.center_b[1]:
            return [self.center_a, self.corner, self.center_b]
        return [self.center_a, self.center_b]

    @property
    def path_length(self) -> float:
        pts = self.path
        return sum(math.dist(p, q) for p, q in zip(pts, pts[1:]))

    @classmethod
    def from_dict(cls, data: Dict[str, Any], path: str = "scene") -> 'BentChannelSpec':
        def point(value: Any, where: str) -> Point:
            return (parse_length(value[0], where), parse_length(value[1], where))

        try:
            return cls(
                center_a=point(data['center_a'], f"{path}.center_a"),
                center_b=point(data['center_b'], f"{path}.center_b"),
                cavity_radius=parse_length(data['cavity_radius'], f"{path}.cavity_radius"),
                channel_width=parse_length(data.get('channel_width', '100nm'), f"{path}.channel_width"),
                bend=str(data.get('bend', 'L')),
                cladding_thickness=parse_length(data.get('cladding_thickness', '100nm'), f"{path}.cladding_thickness"),
                cavity_material=str(data.get('cavity_material', VACUUM_ID)),
                channel_material=str(data.get('channel_material', 'enz_illustrative')),
                cladding_material=str(data.get('cladding_material', PEC)),
            )
        except KeyError as e:
            raise InvalidSpecError("bent-channel spec", f"missing field {e}") from e

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['kind'] = 'bent'
        return data


@dataclass(frozen=True)
class GuideSpec:
    """
    Parallel-plate guides of widths a1 (input, along +x) and a2 (output)
    joined by a narrow channel. With bend 'L' the output guide runs along +y.
    """
    a1: float
    a2: float
    channel_width: float
    channel_length: float
    guide_length: float
    bend: str = "L"
    wall_thickness: float = 100e-9
    channel_material: str = "enz_illustrative"
    guide_material: str = VACUUM_ID
    wall_material: str = PEC

    def __post_init__(self):
        if self.bend not in ("L", "straight"):
            raise InvalidSpecError("guide spec", f"bend must be 'L' or 'straight', got {self.bend!r}")
        if min(self.a1, self.a2, self.channel_width, self.guide_length) <= 0:
            raise InvalidSpecError("guide spec", "widths and guide_length must be positive")
        if self.channel_length < 0:
            raise InvalidSpecError("guide spec", "channel_length must be >= 0")

    @property
    def channel_area(self) -> float:
        return self.channel_width * self.channel_length

    def reference(self) -> 'GuideSpec':
        """Uninterrupted straight guide of width a1 for incident-field calibration."""
        return GuideSpec(
            a1=self.a1, a2=self.a1, channel_width=self.a1, channel_length=self.channel_length,
            guide_length=self.guide_length, bend="straight", wall_thickness=self.wall_thickness,
            channel_material=self.guide_material, guide_material=self.guide_material,
            wall_material=self.wall_material,
        )

    @classmethod
    def from_dict(cls, data: Dict[str, Any], path: str = "scene") -> 'GuideSpec':
        try:
            return cls(
                a1=parse_length(data['a1'], f"{path}.a1"),
                a2=parse_length(data.get('a2', data['a1']), f"{path}.a2"),
                channel_width=parse_length(data['channel_width'], f"{path}.channel_width"),
                channel_length=parse_length(data['channel_length'], f"{path}.channel_length"),
                guide_length=parse_length(data['guide_length'], f"{path}.guide_length"),
                bend=str(data.get('bend', 'L')),
                wall_thickness=parse_length(data.get('wall_thickness', '100nm'), f"{path}.wall_thickness"),
                channel_material=str(data.get('channel_material', 'enz_illustrative')),
                guide_material=str(data.get('guide_material', VACUUM_ID)),
                wall_material=str(data.get('wall_material', PEC)),
            )
        except KeyError as e:
            raise InvalidSpecError("guide spec", f"missing field {e}") from e

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['kind'] = 'guide'
        return data


@dataclass(frozen=True)
class Scene:
    """
    Analytic scene: a background material filling `bounds` with shapes
    painted in order (later shapes override earlier ones).
    """
    bounds: Tuple[float, float, float, float]
    background: str
    shapes: Tuple[Shape, ...] = ()
    min_feature: float = math.inf
    cavities: Tuple[Point, ...] = ()
    cavity_radius: float = 0.0
    kind: str = "custom"
    meta: Dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        x0, y0, x1, y1 = self.bounds
        if not (x1 > x0 and y1 > y0):
            raise InvalidSpecError("scene", f"empty bounds {self.bounds}")
        if not isinstance(self.shapes, tuple):
            object.__setattr__(self, 'shapes', tuple(self.shapes))
        if not isinstance(self.cavities, tuple):
            object.__setattr__(self, 'cavities', tuple(self.cavities))

    @property
    def width(self) -> float:
        return self.bounds[2] - self.bounds[0]

    @property
    def height(self) -> float:
        return self.bounds[3] - self.bounds[1]

    @property
    def center(self) -> Point:
        return ((self.bounds[0] + self.bounds[2]) / 2, (self.bounds[1] + self.bounds[3]) / 2)

    @property
    def material_ids(self) -> List[str]:
        """Background first, then shape materials in order of first use."""
        ids = [self.background]
        for shape in self.shapes:
            if shape.material not in ids:
                ids.append(shape.material)
        return ids

    def count(self, kind: type) -> int:
        return sum(1 for s in self.shapes if isinstance(s, kind))
