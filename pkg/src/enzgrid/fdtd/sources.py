"""
Waveforms and soft (current-injection) sources.

A dipole of moment d and waveform s(t) injects J = d s'(t) / dx^2, split
evenly over the two edges bounding the cell that contains it, so the
dipole sits exactly on the cell center. A line source is a current sheet
K s(t) across a guide, J = K s / dx on one row or column of edges.
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, List, Tuple, Union

import numpy as np

from ..config import parse_frequency, parse_length
from ..exceptions import ConfigError
from ..geometry.raster import SceneRaster
from .exceptions import SourcePlacementError
from .layout import YeeLayout

Point = Tuple[float, float]


@dataclass(frozen=True)
class RampedCW:
    """sin(omega t) switched on with a half-cosine ramp."""
    omega: float
    ramp_periods: float = 5.0

    kind = "cw"

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.ramp_periods < 0:
            raise ValueError("ramp_periods must be >= 0")

    @property
    def period(self) -> float:
        return 2 * math.pi / self.omega

    @property
    def end_time(self) -> float:
        return math.inf

    def value(self, t: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        t = np.asarray(t, dtype=float)
        ramp_time = self.ramp_periods * self.period
        if ramp_time > 0:
            ramp = np.where(t < ramp_time, 0.5 * (1 - np.cos(np.pi * np.clip(t, 0, None) / ramp_time)), 1.0)
        else:
            ramp = np.ones_like(t)
        out = np.where(t > 0, ramp * np.sin(self.omega * t), 0.0)
        return float(out) if out.ndim == 0 else out

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'omega': self.omega, 'ramp_periods': self.ramp_periods}


@dataclass(frozen=True)
class GaussianPulse:
    """
    exp(-((t - t0)/tau)^2) sin(omega (t - t0)) with an amplitude-spectrum
    FWHM of bandwidth * omega; zero from 2 t0 on.
    """
    omega: float
    bandwidth: float = 0.5

    kind = "pulse"

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if not 0 < self.bandwidth <= 2:
            raise ValueError("bandwidth must be in (0, 2]")

    @property
    def tau(self) -> float:
        return 4 * math.sqrt(math.log(2)) / (self.bandwidth * self.omega)

    @property
    def t0(self) -> float:
        return 5 * self.tau

    @property
    def end_time(self) -> float:
        return 2 * self.t0

    @property
    def period(self) -> float:
        return 2 * math.pi / self.omega

    def band(self) -> Tuple[float, float]:
        return self.omega * (1 - self.bandwidth), self.omega * (1 + self.bandwidth)

    def value(self, t: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        t = np.asarray(t, dtype=float)
        u = (t - self.t0) / self.tau
        out = np.where(t < self.end_time, np.exp(-u * u) * np.sin(self.omega * (t - self.t0)), 0.0)
        return float(out) if out.ndim == 0 else out

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'omega': self.omega, 'bandwidth': self.bandwidth}


Waveform = Union[RampedCW, GaussianPulse]


def waveform_from_dict(data: Dict[str, Any], path: str = "source.waveform") -> Waveform:
    kind = data.get('kind', 'cw')
    if 'frequency' not in data:
        raise ConfigError("missing required field 'frequency'", path)
    omega = parse_frequency(data['frequency'], f"{path}.frequency")
    try:
        if kind == 'cw':
            return RampedCW(omega=omega, ramp_periods=float(data.get('ramp_periods', 5.0)))
        if kind == 'pulse':
            return GaussianPulse(omega=omega, bandwidth=float(data.get('bandwidth', 0.5)))
    except ValueError as e:
        raise ConfigError(str(e), path) from e
    raise ConfigError(f"unknown waveform kind {kind!r} (expected 'cw' or 'pulse')", path)


@dataclass(frozen=True)
class DipoleSource:
    position: Point
    orientation: Point
    moment: float
    waveform: Waveform

    def __post_init__(self):
        norm = math.hypot(*self.orientation)
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"orientation must be a unit vector, got {self.orientation} (|u|={norm})")

    def scaled(self, factor: float) -> 'DipoleSource':
        return DipoleSource(self.position, self.orientation, self.moment * factor, self.waveform)


@dataclass(frozen=True)
class LineSource:
    """Axis-aligned current sheet from start to end; current flows along the line."""
    start: Point
    end: Point
    amplitude: float
    waveform: Waveform

    def __post_init__(self):
        if self.start[0] != self.end[0] and self.start[1] != self.end[1]:
            raise ValueError("line source must be axis-aligned")
        if self.start == self.end:
            raise ValueError("line source needs distinct end points")


Source = Union[DipoleSource, LineSource]


@dataclass
class StampedSource:
    """A source resolved onto edge indices."""
    component: str
    index: np.ndarray
    weight: np.ndarray
    waveform: Waveform
    derivative: bool

    def current(self, n: int, dt: float) -> float:
        """Scalar factor of J^{n+1/2}."""
        if self.derivative:
            return (self.waveform.value((n + 1) * dt) - self.waveform.value(n * dt)) / dt
        return self.waveform.value((n + 0.5) * dt)


def _check_cell(raster: SceneRaster, layout: YeeLayout, position: Point) -> Tuple[int, int]:
    i, j = layout.cell_of(*position)
    if not layout.contains_cell(i, j):
        raise SourcePlacementError(position, "outside the grid")
    if raster.pec_mask()[i, j]:
        raise SourcePlacementError(position, "inside a perfect conductor")
    return i, j


def stamp_source(source: Source, raster: SceneRaster, layout: YeeLayout) -> List[StampedSource]:
    nx, ny = layout.nx, layout.ny
    dx = layout.dx
    stamped: List[StampedSource] = []

    if isinstance(source, DipoleSource):
        i, j = _check_cell(raster, layout, source.position)
        ux, uy = source.orientation
        scale = source.moment / dx ** 2
        if ux != 0:
            index = np.ravel_multi_index(([i, i], [j, j + 1]), (nx, ny + 1))
            stamped.append(StampedSource('x', index, np.full(2, 0.5 * ux * scale), source.waveform, True))
        if uy != 0:
            index = np.ravel_multi_index(([i, i + 1], [j, j]), (nx + 1, ny))
            stamped.append(StampedSource('y', index, np.full(2, 0.5 * uy * scale), source.waveform, True))
        return stamped

    (x0, y0), (x1, y1) = source.start, source.end
    for point in (source.start, source.end):
        i, j = layout.cell_of(*point)
        if not layout.contains_cell(i, j):
            raise SourcePlacementError(point, "outside the grid")
    if x0 == x1:
        col = int(round((x0 - layout.origin[0]) / dx))
        if not 0 < col < nx:
            raise SourcePlacementError(source.start, "line source on the outer boundary")
        j_lo, j_hi = sorted((layout.cell_of(x0, y0)[1], layout.cell_of(x1, y1)[1]))
        rows = np.arange(j_lo, j_hi + 1)
        index = np.ravel_multi_index((np.full(len(rows), col), rows), (nx + 1, ny))
        sign = 1.0 if y1 > y0 else -1.0
        stamped.append(StampedSource('y', index, np.full(len(rows), sign * source.amplitude / dx),
                                     source.waveform, False))
    else:
        row = int(round((y0 - layout.origin[1]) / dx))
        if not 0 < row < ny:
            raise SourcePlacementError(source.start, "line source on the outer boundary")
        i_lo, i_hi = sorted((layout.cell_of(x0, y0)[0], layout.cell_of(x1, y1)[0]))
        cols = np.arange(i_lo, i_hi + 1)
        index = np.ravel_multi_index((cols, np.full(len(cols), row)), (nx, ny + 1))
        sign = 1.0 if x1 > x0 else -1.0
        stamped.append(StampedSource('x', index, np.full(len(cols), sign * source.amplitude / dx),
                                     source.waveform, False))
    return stamped


def source_from_dict(data: Dict[str, Any], anchors: Dict[str, Point], path: str = "source") -> Source:
    """
    Parse a source block. `position` is [x, y] or the name of an anchor such
    as 'cavity_12'; dipoles take `orientation` and `moment`, line sources
    `start`, `end` and `amplitude`.
    """
    waveform = waveform_from_dict(data.get('waveform') or {}, f"{path}.waveform")

    def point(value: Any, where: str) -> Point:
        if isinstance(value, str):
            if value not in anchors:
                raise ConfigError(f"unknown anchor {value!r}", where)
            return anchors[value]
        if not isinstance(value, (list, tuple)) or len(value) != 2:
            raise ConfigError("expected [x, y] or an anchor name", where)
        return (parse_length(value[0], where), parse_length(value[1], where))

    kind = data.get('kind', 'dipole')
    try:
        if kind == 'dipole':
            if 'position' not in data:
                raise ConfigError("missing required field 'position'", path)
            ox, oy = data.get('orientation', [0.0, 1.0])
            norm = math.hypot(float(ox), float(oy))
            if norm == 0:
                raise ConfigError("orientation must be non-zero", f"{path}.orientation")
            return DipoleSource(
                position=point(data['position'], f"{path}.position"),
                orientation=(float(ox) / norm, float(oy) / norm),
                moment=float(data.get('moment', 1.0)),
                waveform=waveform,
            )
        if kind == 'line':
            return LineSource(
                start=point(data['start'], f"{path}.start"),
                end=point(data['end'], f"{path}.end"),
                amplitude=float(data.get('amplitude', 1.0)),
                waveform=waveform,
            )
    except (KeyError, ValueError) as e:
        raise ConfigError(str(e), path) from e
    raise ConfigError(f"unknown source kind {kind!r}", path)
