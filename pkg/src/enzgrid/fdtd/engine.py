"""
Leapfrog time stepping of the 2D TM fields.

One step takes (E^n, H^{n-1/2}) to (E^{n+1}, H^{n+1/2}):

    Hz  -= dt/mu0 (dEy/dx - dEx/dy)
    P+   = a P - b P- + c w E^n          per oscillator species
    E   += ce (curl H) - ce (J_ade + J_src)

Each half-step is split into blocks of x rows handed to a thread pool;
every element is written by exactly one block, so the result does not
depend on the number of workers.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config import EngineSettings
from ..constants import MU0
from ..geometry.raster import SceneRaster
from .cpml import CPML
from .exceptions import InstabilityError, SimulationError
from .layout import YeeLayout, courant_dt, steps_per_period
from .media import EdgeMedia, build_media
from .monitors import Monitor, MonitorResult, MonitorSet
from .sources import RampedCW, Source, StampedSource, Waveform, stamp_source
from .state import FieldState, field_energy

logger = logging.getLogger(__name__)

Block = Tuple[int, int]


@dataclass
class StopCriteria:
    """When to end a run."""
    max_steps: int = 200000
    steady_tolerance: float = 1e-4
    steady_floor: float = 1e-3
    decay_tolerance: float = 1e-8
    min_periods: Optional[int] = None

    @classmethod
    def from_settings(cls, settings: EngineSettings) -> 'StopCriteria':
        return cls(
            max_steps=settings.max_steps,
            steady_tolerance=settings.steady_tolerance,
            steady_floor=settings.steady_floor,
            decay_tolerance=settings.decay_tolerance,
        )


@dataclass
class RunResult:
    monitors: Dict[str, MonitorResult]
    steps: int
    converged: bool
    residual: Optional[float]
    dt: float
    dx: float
    shape: Tuple[int, int]
    origin: Tuple[float, float]
    waveform: Dict[str, Any]
    elapsed: float = 0.0
    energy: List[Tuple[int, float]] = field(default_factory=list)

    @property
    def omega(self) -> float:
        return float(self.waveform['omega'])

    def monitor(self, name: str) -> MonitorResult:
        if name not in self.monitors:
            raise KeyError(name)
        return self.monitors[name]

    def summary(self) -> Dict[str, Any]:
        return {
            'steps': self.steps,
            'converged': self.converged,
            'residual': self.residual,
            'dt': self.dt,
            'dx': self.dx,
            'shape': list(self.shape),
            'origin': list(self.origin),
            'waveform': self.waveform,
            'monitors': {name: {'kind': m.kind, 'frequencies': m.frequencies.tolist(),
                                'samples': int(len(m.positions))}
                         for name, m in self.monitors.items()},
        }

    def save(self, path) -> None:
        """Phasors and traces as a compressed .npz archive."""
        arrays: Dict[str, np.ndarray] = {}
        for name, m in self.monitors.items():
            arrays[f"{name}/frequencies"] = m.frequencies
            arrays[f"{name}/positions"] = m.positions
            for comp, value in m.phasors.items():
                arrays[f"{name}/phasor/{comp}"] = value
            if m.times is not None:
                arrays[f"{name}/times"] = m.times
                for comp, value in m.series.items():
                    arrays[f"{name}/series/{comp}"] = value
        np.savez_compressed(path, **arrays)

    @classmethod
    def load(cls, path, summary: Dict[str, Any]) -> 'RunResult':
        monitors: Dict[str, MonitorResult] = {}
        with np.load(path) as data:
            for name, info in summary['monitors'].items():
                m = MonitorResult(
                    name=name,
                    kind=info['kind'],
                    frequencies=data[f"{name}/frequencies"],
                    positions=data[f"{name}/positions"],
                )
                for comp in ('ex', 'ey', 'hz'):
                    key = f"{name}/phasor/{comp}"
                    if key in data:
                        m.phasors[comp] = data[key]
                    skey = f"{name}/series/{comp}"
                    if skey in data:
                        m.series[comp] = data[skey]
                if f"{name}/times" in data:
                    m.times = data[f"{name}/times"]
                monitors[name] = m
        return cls(
            monitors=monitors,
            steps=summary['steps'],
            converged=summary['converged'],
            residual=summary['residual'],
            dt=summary['dt'],
            dx=summary['dx'],
            shape=tuple(summary['shape']),
            origin=tuple(summary['origin']),
            waveform=summary['waveform'],
        )


def steady_residual(current: np.ndarray, previous: np.ndarray, floor: float) -> float:
    """
    Largest per-period change of the monitored magnitudes relative to each
    value, with values below `floor` times the largest one measured against
    that floor instead.
    """
    scale = floor * max(float(np.max(current)), 1e-300)
    return float(np.max(np.abs(current - previous) / np.maximum(current, scale)))


def _blocks(n: int, workers: int) -> List[Block]:
    workers = max(1, min(workers, n))
    edges = np.linspace(0, n, workers + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _shared_waveform(sources: Sequence[Source]) -> Waveform:
    if not sources:
        raise SimulationError("a run needs at least one source")
    waveform = sources[0].waveform
    for s in sources[1:]:
        if s.waveform != waveform:
            raise SimulationError("all sources of a run must share one waveform")
    return waveform


class Simulation:
    """
    A single run on a frozen raster. Not thread-safe; use one instance per run.
    """

    def __init__(
        self,
        raster: SceneRaster,
        sources: Sequence[Source],
        monitors: Sequence[Monitor] = (),
        settings: Optional[EngineSettings] = None,
        pml_axes: Sequence[str] = ("x", "y"),
        workers: Optional[int] = None,
        energy_every: int = 0,
    ):
        self.settings = settings or EngineSettings()
        self.raster = raster
        self.waveform = _shared_waveform(sources)
        self.workers = workers if workers is not None else self.settings.workers

        dx = raster.cell_size
        dt = courant_dt(dx, self.settings.courant)
        self.steps_per_period = steps_per_period(self.waveform.omega, dt)
        if isinstance(self.waveform, RampedCW):
            dt = self.waveform.period / self.steps_per_period
        self.layout = YeeLayout(dx=dx, nx=raster.nx, ny=raster.ny, dt=dt, origin=raster.origin)

        self._check_frequencies(monitors)
        self.media: EdgeMedia = build_media(raster, self.layout)
        pml_cells = self.settings.pml_cells if pml_axes else 0
        self.cpml = CPML(
            self.layout,
            thickness=pml_cells,
            order=self.settings.pml_order,
            kappa_max=self.settings.pml_kappa_max,
            alpha_max=self.settings.pml_alpha_max,
            axes=tuple(pml_axes),
        )
        self.stamped: List[StampedSource] = []
        for source in sources:
            self.stamped.extend(stamp_source(source, raster, self.layout))
        self.monitors = MonitorSet(monitors, self.layout, self.waveform.omega)
        self.energy_every = energy_every
        self.state = FieldState.zeros(self.layout, self.media, track_energy=energy_every > 0)
        self.energy: List[Tuple[int, float]] = []

        nx = self.layout.nx
        self._cell_blocks = _blocks(nx, self.workers)
        self._pool: Optional[ThreadPoolExecutor] = None
        self._results: Dict[str, MonitorResult] = {}

    def _check_frequencies(self, monitors: Sequence[Monitor]) -> None:
        w0 = self.waveform.omega
        for m in monitors:
            for w in m.frequencies:
                if isinstance(self.waveform, RampedCW):
                    ok = abs(w - w0) <= 1e-9 * w0
                else:
                    lo, hi = self.waveform.band()
                    ok = lo <= w <= hi
                if not ok:
                    raise SimulationError(
                        f"monitor {m.name!r} frequency {w:.6e} rad/s lies outside the source band"
                    )

    # -- half-steps ---------------------------------------------------------

    def _update_h(self, block: Block) -> None:
        i0, i1 = block
        s = self.state
        ch = self.layout.dt / MU0
        dey = (s.ey[i0 + 1:i1 + 1, :] - s.ey[i0:i1, :]) / self.layout.dx
        dex = (s.ex[i0:i1, 1:] - s.ex[i0:i1, :-1]) / self.layout.dx
        s.hz[i0:i1] -= ch * self.cpml.hz_curl(i0, i1, dey, dex)

    def _update_ex(self, block: Block) -> None:
        i0, i1 = block
        s = self.state
        dhz = (s.hz[i0:i1, 1:] - s.hz[i0:i1, :-1]) / self.layout.dx
        s.ex[i0:i1, 1:-1] += self.media.ce_x[i0:i1, 1:-1] * self.cpml.ex_curl(i0, i1, dhz)

    def _update_ey(self, block: Block) -> None:
        e0, e1 = block
        s = self.state
        dhz = (s.hz[e0:e1, :] - s.hz[e0 - 1:e1 - 1, :]) / self.layout.dx
        s.ey[e0:e1] += self.media.ce_y[e0:e1] * self.cpml.ey_curl(e0, e1, dhz)

    def _update_e(self, block: Block) -> None:
        self._update_ex(block)
        e0, e1 = max(block[0], 1), block[1]
        if e1 > e0:
            self._update_ey((e0, e1))

    def _map(self, fn, blocks: List[Block]) -> None:
        if self._pool is None or len(blocks) == 1:
            for b in blocks:
                fn(b)
        else:
            list(self._pool.map(fn, blocks))

    def _advance_oscillators(self) -> None:
        s = self.state
        dt = self.layout.dt
        for sp, osc in zip(self.media.species, s.oscillators):
            e = (s.ex if sp.component == 'x' else s.ey).ravel()[sp.index]
            p_next = sp.a * osc.p - sp.b * osc.p_prev + sp.c * sp.weight * e
            osc.j = (p_next - osc.p) / dt
            osc.p_prev = osc.p
            osc.p = p_next

    def _inject_currents(self, n: int) -> None:
        s = self.state
        ex, ey = s.ex.reshape(-1), s.ey.reshape(-1)
        ce_x, ce_y = self.media.ce_x.reshape(-1), self.media.ce_y.reshape(-1)
        for sp, osc in zip(self.media.species, s.oscillators):
            if sp.component == 'x':
                ex[sp.index] -= ce_x[sp.index] * osc.j
            else:
                ey[sp.index] -= ce_y[sp.index] * osc.j
        for src in self.stamped:
            g = src.current(n, self.layout.dt)
            if g == 0.0:
                continue
            if src.component == 'x':
                ex[src.index] -= ce_x[src.index] * src.weight * g
            else:
                ey[src.index] -= ce_y[src.index] * src.weight * g

    def step(self) -> FieldState:
        """Advance one leapfrog step."""
        s = self.state
        n = s.step
        measure = self.energy_every > 0 and n % self.energy_every == 0
        if measure:
            s.hz_prev[...] = s.hz

        self._map(self._update_h, self._cell_blocks)

        if measure:
            s.energy = field_energy(s, self.layout, self.media)
            self.energy.append((n, s.energy))

        self._advance_oscillators()
        self._map(self._update_e, self._cell_blocks)
        self._inject_currents(n)
        s.step = n + 1

        if not s.is_finite():
            component = 'Hz' if not np.isfinite(s.hz.sum()) else ('Ex' if not np.isfinite(s.ex.sum()) else 'Ey')
            raise InstabilityError(s.step, component)
        return s

    # -- run loop -----------------------------------------------------------

    def _record(self) -> None:
        n = self.state.step
        dt = self.layout.dt
        self.monitors.record(self.state, self.waveform.value(n * dt), n * dt, (n - 0.5) * dt)

    def _energy_proxy(self) -> float:
        return field_energy(self.state, self.layout, self.media)

    def run(self, stop: Optional[StopCriteria] = None) -> RunResult:
        stop = stop or StopCriteria.from_settings(self.settings)
        logger.info(
            "Starting run: %dx%d cells, dx=%.4g m, dt=%.4g s, %d steps per period, %d worker(s)",
            self.layout.nx, self.layout.ny, self.layout.dx, self.layout.dt,
            self.steps_per_period, self.workers,
        )
        started = time.perf_counter()
        if self.workers > 1 and len(self._cell_blocks) > 1:
            self._pool = ThreadPoolExecutor(max_workers=self.workers, thread_name_prefix="enzgrid-step")
        try:
            if isinstance(self.waveform, RampedCW):
                converged, residual = self._run_cw(stop)
            else:
                converged, residual = self._run_pulse(stop)
        finally:
            if self._pool is not None:
                self._pool.shutdown(wait=True)
                self._pool = None
        elapsed = time.perf_counter() - started

        if converged:
            logger.info("Run converged after %d steps (%.1f s)", self.state.step, elapsed)
        else:
            logger.warning(
                "Run stopped at max_steps=%d without converging (residual %s)",
                stop.max_steps, "n/a" if residual is None else f"{residual:.3e}",
            )
        return RunResult(
            monitors=self._results,
            steps=self.state.step,
            converged=converged,
            residual=residual,
            dt=self.layout.dt,
            dx=self.layout.dx,
            shape=(self.layout.nx, self.layout.ny),
            origin=tuple(self.layout.origin),
            waveform=self.waveform.to_dict(),
            elapsed=elapsed,
            energy=list(self.energy),
        )

    def _run_cw(self, stop: StopCriteria) -> Tuple[bool, Optional[float]]:
        spp = self.steps_per_period
        min_periods = stop.min_periods
        if min_periods is None:
            min_periods = int(math.ceil(self.waveform.ramp_periods)) + 2
        previous: Optional[np.ndarray] = None
        residual: Optional[float] = None
        periods = 0
        self._results = self.monitors.results()
        while self.state.step < stop.max_steps:
            self.step()
            self._record()
            if self.state.step % spp:
                continue
            periods += 1
            self._results = self.monitors.results()
            current = self.monitors.point_magnitudes()
            if current is None and periods > min_periods:
                return True, None
            if current is not None and previous is not None and periods > min_periods:
                residual = steady_residual(current, previous, stop.steady_floor)
                logger.debug("Period %d: relative change %.3e", periods, residual)
                if residual < stop.steady_tolerance:
                    return True, residual
            previous = current
            self.monitors.reset()
        return False, residual

    def _run_pulse(self, stop: StopCriteria) -> Tuple[bool, Optional[float]]:
        spp = self.steps_per_period
        end_step = int(math.ceil(self.waveform.end_time / self.layout.dt))
        peak = 0.0
        ratio: Optional[float] = None
        while self.state.step < stop.max_steps:
            self.step()
            self._record()
            if self.state.step % spp:
                continue
            energy = self._energy_proxy()
            peak = max(peak, energy)
            if self.state.step < end_step or peak == 0.0:
                continue
            ratio = energy / peak
            logger.debug("Step %d: energy %.3e of peak", self.state.step, ratio)
            if ratio < stop.decay_tolerance:
                self._results = self.monitors.results()
                return True, ratio
        self._results = self.monitors.results()
        return False, ratio


def run(
    raster: SceneRaster,
    sources: Sequence[Source],
    monitors: Sequence[Monitor],
    stop: Optional[StopCriteria] = None,
    settings: Optional[EngineSettings] = None,
    **kwargs,
) -> RunResult:
    """Build a Simulation and run it to completion."""
    return Simulation(raster, sources, monitors, settings=settings, **kwargs).run(stop)
