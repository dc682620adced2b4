"""
Field monitors and their running DFTs.

Electric samples are taken at integer steps t = n dt (Ex and Ey averaged
onto cell centers), Hz at t = (n + 1/2) dt. A phasor is sum f(t) e^{i w t}
divided by the same sum over the source waveform, so every phasor is the
field per unit source amplitude.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config import parse_frequency, parse_length
from ..exceptions import ConfigError
from .layout import YeeLayout
from .state import FieldState

logger = logging.getLogger(__name__)

Point = Tuple[float, float]

COMPONENTS = ('ex', 'ey', 'hz')
MONITOR_KINDS = ('point', 'line', 'field', 'trace')


@dataclass(frozen=True)
class Monitor:
    """
    name: unique label
    kind: 'point', 'line', 'field' or 'trace'
    points: one point, or the two ends of a line; empty for field monitors
    frequencies: angular frequencies; empty means the source carrier
    """
    name: str
    kind: str
    points: Tuple[Point, ...] = ()
    frequencies: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in MONITOR_KINDS:
            raise ValueError(f"unknown monitor kind {self.kind!r}")
        expected = {'point': 1, 'trace': 1, 'line': 2, 'field': 0}[self.kind]
        if len(self.points) != expected:
            raise ValueError(f"{self.kind} monitor {self.name!r} needs {expected} point(s)")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'kind': self.kind,
            'points': [list(p) for p in self.points],
            'frequencies': list(self.frequencies),
        }


def point_monitor(name: str, position: Point, frequencies: Sequence[float] = ()) -> Monitor:
    return Monitor(name, 'point', (tuple(position),), tuple(frequencies))


def line_monitor(name: str, start: Point, end: Point, frequencies: Sequence[float] = ()) -> Monitor:
    return Monitor(name, 'line', (tuple(start), tuple(end)), tuple(frequencies))


def field_monitor(name: str, frequencies: Sequence[float] = ()) -> Monitor:
    return Monitor(name, 'field', (), tuple(frequencies))


def trace_monitor(name: str, position: Point) -> Monitor:
    return Monitor(name, 'trace', (tuple(position),))


def monitor_from_dict(data: Dict[str, Any], anchors: Dict[str, Point], path: str) -> Monitor:
    """Parse one monitor entry; positions may name an anchor."""
    def point(value: Any, where: str) -> Point:
        if isinstance(value, str):
            if value not in anchors:
                raise ConfigError(f"unknown anchor {value!r}", where)
            return anchors[value]
        if not isinstance(value, (list, tuple)) or len(value) != 2:
            raise ConfigError("expected [x, y] or an anchor name", where)
        return (parse_length(value[0], where), parse_length(value[1], where))

    if 'name' not in data:
        raise ConfigError("missing required field 'name'", path)
    kind = data.get('kind', 'point')
    freqs = tuple(parse_frequency(f, f"{path}.frequencies") for f in data.get('frequencies', []))
    if kind in ('point', 'trace'):
        points: Tuple[Point, ...] = (point(data.get('position'), f"{path}.position"),)
    elif kind == 'line':
        points = (point(data.get('start'), f"{path}.start"), point(data.get('end'), f"{path}.end"))
    else:
        points = ()
    try:
        return Monitor(str(data['name']), kind, points, freqs)
    except ValueError as e:
        raise ConfigError(str(e), path) from e


def line_cells(layout: YeeLayout, start: Point, end: Point) -> Tuple[np.ndarray, np.ndarray]:
    """Distinct cells visited by a segment, sampled at half-cell spacing, in order."""
    length = float(np.hypot(end[0] - start[0], end[1] - start[1]))
    count = max(2, int(np.ceil(2 * length / layout.dx)) + 1)
    xs = np.linspace(start[0], end[0], count)
    ys = np.linspace(start[1], end[1], count)
    ii = np.floor((xs - layout.origin[0]) / layout.dx).astype(int)
    jj = np.floor((ys - layout.origin[1]) / layout.dx).astype(int)
    keep = (ii >= 0) & (ii < layout.nx) & (jj >= 0) & (jj < layout.ny)
    ii, jj = ii[keep], jj[keep]
    if len(ii) == 0:
        return ii, jj
    fresh = np.ones(len(ii), dtype=bool)
    fresh[1:] = (np.diff(ii) != 0) | (np.diff(jj) != 0)
    return ii[fresh], jj[fresh]


@dataclass
class MonitorResult:
    """
    Phasors of one monitor, shape (n_frequencies, *sample_shape) per
    component. Trace monitors carry times and raw series instead.
    """
    name: str
    kind: str
    frequencies: np.ndarray
    phasors: Dict[str, np.ndarray] = field(default_factory=dict)
    positions: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    times: Optional[np.ndarray] = None
    series: Dict[str, np.ndarray] = field(default_factory=dict)

    def phasor(self, component: str = 'hz', frequency_index: int = 0) -> np.ndarray:
        if component not in self.phasors:
            raise KeyError(f"monitor {self.name!r} has no phasor for {component!r}")
        return self.phasors[component][frequency_index]

    def e_vector(self, frequency_index: int = 0) -> np.ndarray:
        """(..., 2) complex in-plane E."""
        return np.stack([self.phasor('ex', frequency_index), self.phasor('ey', frequency_index)], axis=-1)

    def e_magnitude(self, frequency_index: int = 0) -> np.ndarray:
        ex = self.phasor('ex', frequency_index)
        ey = self.phasor('ey', frequency_index)
        return np.sqrt(np.abs(ex) ** 2 + np.abs(ey) ** 2)

    def frequency_index(self, omega: float, rtol: float = 1e-9) -> int:
        for k, w in enumerate(self.frequencies):
            if abs(w - omega) <= rtol * abs(omega):
                return k
        raise KeyError(f"monitor {self.name!r} has no frequency {omega:.6e} rad/s")


class _Recorder:
    """Samples one monitor from a FieldState and accumulates its DFT."""

    def __init__(self, monitor: Monitor, layout: YeeLayout, frequencies: np.ndarray):
        self.monitor = monitor
        self.frequencies = frequencies
        self.cells: Optional[Tuple[np.ndarray, np.ndarray]] = None
        if monitor.kind in ('point', 'trace'):
            i, j = layout.cell_of(*monitor.points[0])
            if not layout.contains_cell(i, j):
                raise ConfigError(f"monitor position {monitor.points[0]} lies outside the grid",
                                  f"monitors.{monitor.name}")
            self.cells = (np.array([i]), np.array([j]))
        elif monitor.kind == 'line':
            self.cells = line_cells(layout, *monitor.points)
            if len(self.cells[0]) == 0:
                raise ConfigError("line monitor lies outside the grid", f"monitors.{monitor.name}")
        if self.cells is not None:
            self.positions = np.stack([
                layout.origin[0] + (self.cells[0] + 0.5) * layout.dx,
                layout.origin[1] + (self.cells[1] + 0.5) * layout.dx,
            ], axis=1)
            shape: Tuple[int, ...] = (len(self.cells[0]),)
        else:
            self.positions = np.zeros((0, 2))
            shape = (layout.nx, layout.ny)
        self.shape = shape
        self.times: List[float] = []
        self.series: Dict[str, List[np.ndarray]] = {c: [] for c in COMPONENTS}
        self.reset()

    def reset(self) -> None:
        nf = len(self.frequencies)
        self.sums = {c: np.zeros((nf,) + self.shape, dtype=complex) for c in COMPONENTS}

    def _sample_e(self, state: FieldState) -> Tuple[np.ndarray, np.ndarray]:
        if self.cells is None:
            return state.ex_centered(), state.ey_centered()
        ii, jj = self.cells
        ex = 0.5 * (state.ex[ii, jj] + state.ex[ii, jj + 1])
        ey = 0.5 * (state.ey[ii, jj] + state.ey[ii + 1, jj])
        return ex, ey

    def _sample_h(self, state: FieldState) -> np.ndarray:
        if self.cells is None:
            return state.hz
        return state.hz[self.cells]

    def record(self, state: FieldState, t_e: float, t_h: float) -> None:
        ex, ey = self._sample_e(state)
        hz = self._sample_h(state)
        if self.monitor.kind == 'trace':
            self.times.append(t_e)
            self.series['ex'].append(ex[0])
            self.series['ey'].append(ey[0])
            self.series['hz'].append(hz[0])
            return
        phase_e = np.exp(1j * self.frequencies * t_e)
        phase_h = np.exp(1j * self.frequencies * t_h)
        for k in range(len(self.frequencies)):
            self.sums['ex'][k] += phase_e[k] * ex
            self.sums['ey'][k] += phase_e[k] * ey
            self.sums['hz'][k] += phase_h[k] * hz

    def result(self, reference: Optional[np.ndarray]) -> MonitorResult:
        out = MonitorResult(
            name=self.monitor.name,
            kind=self.monitor.kind,
            frequencies=self.frequencies.copy(),
            positions=self.positions,
        )
        if self.monitor.kind == 'trace':
            out.times = np.asarray(self.times)
            out.series = {c: np.asarray(v) for c, v in self.series.items()}
            return out
        ref = reference.reshape((-1,) + (1,) * len(self.shape))
        out.phasors = {c: s / ref for c, s in self.sums.items()}
        return out


class MonitorSet:
    """All monitors of a run plus the DFT of the source waveform."""

    def __init__(self, monitors: Sequence[Monitor], layout: YeeLayout, carrier: float):
        names = [m.name for m in monitors]
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise ConfigError(f"duplicate monitor names {duplicates}", "monitors")
        self.recorders = [
            _Recorder(m, layout, np.asarray(m.frequencies or (carrier,), dtype=float))
            for m in monitors
        ]
        freqs = sorted({float(w) for r in self.recorders for w in r.frequencies} | {carrier})
        self.frequencies = np.asarray(freqs)
        self.reset()

    def reset(self) -> None:
        self.source_sum = np.zeros(len(self.frequencies), dtype=complex)
        for r in self.recorders:
            r.reset()

    def record(self, state: FieldState, source_value: float, t_e: float, t_h: float) -> None:
        self.source_sum += source_value * np.exp(1j * self.frequencies * t_e)
        for r in self.recorders:
            r.record(state, t_e, t_h)

    def _reference(self, frequencies: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.frequencies, frequencies)
        return self.source_sum[idx]

    def results(self) -> Dict[str, MonitorResult]:
        out = {}
        for r in self.recorders:
            out[r.monitor.name] = r.result(self._reference(r.frequencies))
        return out

    def point_magnitudes(self) -> Optional[np.ndarray]:
        """Normalized |phasor| of every point monitor; None without source drive."""
        if not np.all(np.abs(self.source_sum) > 0):
            return None
        values = []
        for r in self.recorders:
            if r.monitor.kind != 'point':
                continue
            ref = self._reference(r.frequencies)[:, None]
            for c in COMPONENTS:
                values.append(np.abs(r.sums[c] / ref).ravel())
        if not values:
            # no point monitors; fall back to the norm of each other monitor
            for r in self.recorders:
                if r.monitor.kind in ('line', 'field'):
                    ref = self._reference(r.frequencies)
                    for c in COMPONENTS:
                        values.append(np.array([np.linalg.norm(r.sums[c]) / np.linalg.norm(ref)]))
        return np.concatenate(values) if values else None
