"""
Network-level quantities: field decay across a cavity grid, phase maps,
amplitude retention through a bent channel, node budgets and transport
feasibility.

Cavity fields are read from point monitors named `cavity_<index>`, index
in the row-major order of geometry.cavity_centers.
"""

import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..fdtd.engine import RunResult
from ..geometry.models import BentChannelSpec, GridNetworkSpec
from ..geometry.scene import cavity_centers, cut_line
from .exceptions import AnalysisError, MissingMonitorError
from .green import frequency_index, monitor_of, require_converged
from .models import DecayCurve, DecayEntry, PhaseMap, TimeBinQubit, TransportVerdict

logger = logging.getLogger(__name__)

CavitySpec = Union[GridNetworkSpec, BentChannelSpec]

CAVITY_PREFIX = "cavity_"
# below this resultant length sqrt(-2 ln R) exceeds pi
SPREAD_CAP_R = math.exp(-math.pi ** 2 / 2)


def cavity_monitor(index: int) -> str:
    return f"{CAVITY_PREFIX}{index}"


def _grid_position(spec: CavitySpec, index: int) -> Tuple[int, int]:
    if isinstance(spec, GridNetworkSpec):
        return spec.position(index)
    return (0, index)


def _cavity_phasors(run: RunResult, count: int, omega: float, component: str, analysis: str) -> np.ndarray:
    names = [cavity_monitor(k) for k in range(count)]
    missing = [n for n in names if n not in run.monitors]
    if missing:
        raise MissingMonitorError(missing, analysis)
    values = []
    for name in names:
        m = run.monitors[name]
        fi = frequency_index(m, omega)
        if component == 'e':
            values.append(complex(m.e_magnitude(fi)[0]))
        else:
            values.append(complex(m.phasor(component, fi)[0]))
    return np.asarray(values)


def decay_vs_distance(
    run: RunResult,
    spec: CavitySpec,
    source_index: Optional[int] = None,
    omega: Optional[float] = None,
) -> DecayCurve:
    """
    |E| at each cavity center normalized to the source cavity, sorted by
    distance from it. The source defaults to the central cavity.
    """
    require_converged(run, "decay_vs_distance")
    centers = cavity_centers(spec)
    if source_index is None:
        source_index = len(centers) // 2
    omega = omega if omega is not None else run.omega
    magnitudes = np.abs(_cavity_phasors(run, len(centers), omega, 'e', "decay_vs_distance"))
    reference = magnitudes[source_index]
    if reference == 0:
        raise AnalysisError("source cavity field is zero")
    sx, sy = centers[source_index]
    entries = [
        DecayEntry(index=k, distance=math.hypot(x - sx, y - sy), value=float(magnitudes[k] / reference))
        for k, (x, y) in enumerate(centers)
    ]
    entries.sort(key=lambda e: (e.distance, e.index))
    logger.info(
        "Decay curve over %d cavities: farthest %.3e at %.3e m",
        len(entries), entries[-1].value, entries[-1].distance,
    )
    return DecayCurve(entries=entries, source_index=source_index, omega=omega)


def circular_spread(phases: Sequence[float]) -> float:
    """sqrt(-2 ln R) of the phases, capped at pi."""
    phases = np.asarray(phases, dtype=float)
    if len(phases) == 0:
        raise AnalysisError("no phases to compare")
    # rounding can push R of identical phases just past 1
    resultant = min(float(abs(np.mean(np.exp(1j * phases)))), 1.0)
    if resultant < SPREAD_CAP_R:
        return math.pi
    return math.sqrt(-2.0 * math.log(resultant))


def phase_spread(
    run: RunResult,
    spec: CavitySpec,
    omega: Optional[float] = None,
    zero_tolerance: float = 1e-12,
) -> PhaseMap:
    """arg Hz at each cavity; cavities with a vanishing phasor are excluded."""
    require_converged(run, "phase_spread")
    centers = cavity_centers(spec)
    omega = omega if omega is not None else run.omega
    hz = _cavity_phasors(run, len(centers), omega, 'hz', "phase_spread")
    scale = float(np.max(np.abs(hz))) if len(hz) else 0.0
    phases: Dict[Tuple[int, int], float] = {}
    excluded: List[Tuple[int, int]] = []
    for k, value in enumerate(hz):
        key = _grid_position(spec, k)
        if abs(value) <= zero_tolerance * scale or value == 0:
            excluded.append(key)
            continue
        phases[key] = float(np.angle(value))
    if excluded:
        logger.warning("Excluded %d cavities with zero Hz from the phase map", len(excluded))
    spread = circular_spread(list(phases.values()))
    return PhaseMap(phases=phases, spread=spread, omega=omega, excluded=excluded)


def cut_line_profile(
    run: RunResult,
    spec: CavitySpec,
    i: int,
    j: int,
    monitor: str = "field",
    omega: Optional[float] = None,
    extend: Optional[float] = None,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    (points, arc length, |E|) along the cut line from cavity i to j, read
    from a full-field monitor at the nearest cell.
    """
    m = monitor_of(run, monitor, "cut_line_profile")
    if m.kind != 'field':
        raise AnalysisError(f"monitor {monitor!r} must be a field monitor, got {m.kind!r}")
    omega = omega if omega is not None else run.omega
    fi = frequency_index(m, omega)
    magnitude = m.e_magnitude(fi)
    extend = spec.cavity_radius if extend is None else extend
    points = cut_line(spec, i, j, run.dx, extend=extend)
    nx, ny = magnitude.shape
    ii = np.clip(np.floor((points[:, 0] - run.origin[0]) / run.dx).astype(int), 0, nx - 1)
    jj = np.clip(np.floor((points[:, 1] - run.origin[1]) / run.dx).astype(int), 0, ny - 1)
    steps = np.linalg.norm(np.diff(points, axis=0), axis=1)
    arc = np.concatenate([[0.0], np.cumsum(steps)])
    return points, arc, magnitude[ii, jj]


def amplitude_retention(
    run: RunResult,
    spec: BentChannelSpec,
    monitor: str = "field",
    omega: Optional[float] = None,
) -> float:
    """
    Peak |E| inside the second cavity over the peak inside the source
    cavity, along the cut line. Points within half a radius of the source
    are skipped in both windows so the dipole's own near field does not set
    the reference.
    """
    require_converged(run, "amplitude_retention")
    points, _, values = cut_line_profile(run, spec, 0, 1, monitor, omega)
    r = spec.cavity_radius
    da = np.hypot(points[:, 0] - spec.center_a[0], points[:, 1] - spec.center_a[1])
    db = np.hypot(points[:, 0] - spec.center_b[0], points[:, 1] - spec.center_b[1])
    clear = da >= r / 2
    source_window = clear & (da <= r)
    target_window = clear & (db <= r)
    if not source_window.any() or not target_window.any():
        raise AnalysisError("cut line does not sample both cavities; refine the grid")
    retention = float(values[target_window].max() / values[source_window].max())
    logger.info("Amplitude retention through %s channel: %.4f", spec.bend, retention)
    return retention


def node_budget(coherence_length: float, pitch: float) -> int:
    """floor(pi L^2 / a^2): lattice nodes reachable within one coherence length."""
    if coherence_length <= 0 or pitch <= 0:
        raise ValueError("coherence length and pitch must be positive")
    return int(math.floor(math.pi * coherence_length ** 2 / pitch ** 2))


def lattice_nodes_within(radius: float, pitch: float) -> int:
    """Square-lattice points (m a, n a) with m^2 + n^2 <= (radius/a)^2."""
    if radius <= 0 or pitch <= 0:
        raise ValueError("radius and pitch must be positive")
    r = radius / pitch
    m = np.arange(-int(math.floor(r)), int(math.floor(r)) + 1)
    half = np.floor(np.sqrt(np.maximum(r * r - m.astype(float) ** 2, 0.0)))
    return int(np.sum(2 * half + 1))


def transport_feasible(
    qubit: Optional[TimeBinQubit],
    path_length: float,
    coherence_length: float,
) -> TransportVerdict:
    """A qubit survives a path strictly shorter than the coherence length."""
    if path_length < 0:
        raise ValueError("path length must be >= 0")
    return TransportVerdict(
        feasible=path_length < coherence_length,
        margin=coherence_length - path_length,
        path_length=path_length,
        coherence_length=coherence_length,
        qubit=qubit,
    )
