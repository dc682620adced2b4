"""
Run orchestration: config documents in, stored runs and reports out.

A run config names a scene, one source block, monitors and stop criteria,
plus optional `variants` (named overrides, each run separately) and
`analyses` applied to every variant. Each variant is stored in its own
directory under the output root together with its manifest; group-level
comparisons go to a directory named after the base config.
"""

import copy
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from . import __version__
from .analysis import (
    SupercouplingQuery,
    amplitude_retention,
    cavity_monitor,
    compare_slab,
    coupling_scan,
    decay_vs_distance,
    extract_green,
    guide_transmission,
    lattice_nodes_within,
    node_budget,
    phase_spread,
    supercoupling_reflection,
)
from .analysis.models import CouplingResult, DecayCurve, SlabComparison
from .analysis.reports import (
    COUPLING_COLUMNS,
    DECAY_COLUMNS,
    PHASE_COLUMNS,
    SLAB_COLUMNS,
    sha256_file,
    sha256_json,
    write_csv,
    write_report,
)
from .config import EngineSettings, Settings, load_yaml, parse_length, require
from .constants import C0
from .exceptions import ConfigError
from .fdtd import (
    DipoleSource,
    LineSource,
    Monitor,
    RunResult,
    Simulation,
    Snapshot,
    StopCriteria,
    choose_cell_size,
    monitor_from_dict,
    point_monitor,
    source_from_dict,
    write_snapshot,
)
from .fdtd.exceptions import NotConvergedError
from .geometry import (
    BentChannelSpec,
    GridNetworkSpec,
    GuideSpec,
    Scene,
    SceneRaster,
    build_scene,
    rasterize,
    write_pgm,
    write_raster,
)
from .geometry.scene import build_empty_scene, build_slab_scene
from .materials import CoherenceReport, coherence_length, load_preset, resolve_material
from .store import FileResultStore, ResultStore, RunManifest

logger = logging.getLogger(__name__)

Point = Tuple[float, float]
SceneSpec = Union[GridNetworkSpec, BentChannelSpec, GuideSpec, None]

TOP_LEVEL_KEYS = {
    'name', 'description', 'scene', 'resolution', 'source', 'monitors', 'stop', 'engine',
    'pml_axes', 'variants', 'analyses', 'snapshots', 'materials',
}
ANALYSIS_KINDS = ('decay', 'phase', 'coupling', 'retention', 'transmission', 'slab')
REFERENCED_KINDS = ('transmission', 'slab')
AXES = {'x': (1.0, 0.0), 'y': (0.0, 1.0)}


def deep_merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def parse_vector(value: Any, path: str) -> Point:
    """'x', 'y', or [vx, vy]."""
    if isinstance(value, str):
        if value not in AXES:
            raise ConfigError(f"expected 'x', 'y' or [vx, vy], got {value!r}", path)
        return AXES[value]
    try:
        vx, vy = float(value[0]), float(value[1])
    except (TypeError, ValueError, IndexError) as e:
        raise ConfigError(f"expected 'x', 'y' or [vx, vy], got {value!r}", path) from e
    return (vx, vy)


@dataclass
class RunConfig:
    name: str
    raw: Dict[str, Any]
    path: Optional[Path] = None
    variant: Optional[str] = None

    @classmethod
    def from_dict(cls, data: Dict[str, Any], path: Optional[Path] = None) -> 'RunConfig':
        if not isinstance(data, dict) or not data:
            raise ConfigError("run config is empty", str(path or ""))
        unknown = set(data) - TOP_LEVEL_KEYS
        if unknown:
            raise ConfigError(f"unknown keys {sorted(unknown)}", str(path or ""))
        require(data, 'name')
        scene = require(data, 'scene', 'config')
        if not isinstance(scene, dict) or not scene:
            raise ConfigError("scene block is empty", "scene")
        require(data, 'source', 'config')
        for k, entry in enumerate(data.get('analyses', [])):
            kinds = set(entry) if isinstance(entry, dict) else {entry}
            bad = kinds - set(ANALYSIS_KINDS)
            if bad:
                raise ConfigError(f"unknown analysis {sorted(bad)}", f"analyses[{k}]")
        return cls(name=str(data['name']), raw=data, path=path)

    @property
    def digest(self) -> str:
        return sha256_json(self.raw)

    def section(self, key: str, default: Any = None) -> Any:
        value = self.raw.get(key, default)
        return copy.deepcopy(value)

    def variants(self) -> List['RunConfig']:
        """One config per variant, or the config itself when there are none."""
        variants = self.raw.get('variants') or {}
        if not variants:
            return [self]
        out = []
        for name, overrides in variants.items():
            data = {k: v for k, v in self.raw.items() if k != 'variants'}
            data = deep_merge(data, overrides or {})
            out.append(RunConfig(name=self.name, raw=data, path=self.path, variant=str(name)))
        return out

    def analyses(self) -> Dict[str, Dict[str, Any]]:
        found: Dict[str, Dict[str, Any]] = {}
        for entry in self.raw.get('analyses', []):
            if isinstance(entry, str):
                found[entry] = {}
            else:
                for kind, options in entry.items():
                    found[kind] = dict(options or {})
        return found


def load_run_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    return RunConfig.from_dict(load_yaml(path), path)


def parse_scene(data: Dict[str, Any]) -> Tuple[SceneSpec, Scene]:
    kind = data.get('kind', 'grid')
    body = {k: v for k, v in data.items() if k != 'kind'}
    if kind == 'grid':
        spec: SceneSpec = GridNetworkSpec.from_dict(body, "scene")
    elif kind == 'bent':
        spec = BentChannelSpec.from_dict(body, "scene")
    elif kind == 'guide':
        spec = GuideSpec.from_dict(body, "scene")
    elif kind == 'slab':
        scene = build_slab_scene(
            thickness=parse_length(require(body, 'thickness', 'scene'), "scene.thickness"),
            material=str(require(body, 'material', 'scene')),
            length=parse_length(require(body, 'length', 'scene'), "scene.length"),
            height=parse_length(require(body, 'height', 'scene'), "scene.height"),
            background=str(body.get('background', 'vacuum')),
        )
        return None, scene
    elif kind == 'empty':
        scene = build_empty_scene(
            width=parse_length(require(body, 'width', 'scene'), "scene.width"),
            height=parse_length(require(body, 'height', 'scene'), "scene.height"),
            background=str(body.get('background', 'vacuum')),
        )
        return None, scene
    else:
        raise ConfigError(f"unknown scene kind {kind!r}", "scene.kind")
    return spec, build_scene(spec)


def scene_anchors(scene: Scene) -> Dict[str, Point]:
    """Named positions a config may refer to instead of coordinates."""
    anchors: Dict[str, Point] = {'center': scene.center}
    for k, c in enumerate(scene.cavities):
        anchors[cavity_monitor(k)] = c
    if scene.kind == 'guide':
        meta = scene.meta
        a1, a2 = meta['a1'], meta['a2']
        x0 = scene.bounds[0]
        x_src = x0 + 0.5 * (meta["entry_center"][0] - x0)
        anchors['entry'] = tuple(meta['entry_center'])
        anchors['exit'] = tuple(meta['exit_center'])
        anchors['source_low'] = (x_src, -0.49 * a1)
        anchors['source_high'] = (x_src, 0.49 * a1)
        ex, ey = meta['exit_center']
        if meta['bend'] == 'straight':
            anchors['exit_low'] = (ex, -0.49 * a2)
            anchors['exit_high'] = (ex, 0.49 * a2)
        else:
            anchors['exit_low'] = (ex - 0.49 * a2, ey)
            anchors['exit_high'] = (ex + 0.49 * a2, ey)
    elif scene.kind == 'slab':
        # full-height lines halfway between each face and the domain end
        x0, y0, x1, y1 = scene.bounds
        half = 0.499 * (y1 - y0)
        x_src, x_exit = 0.5 * x0, 0.5 * (scene.meta['thickness'] + x1)
        anchors['source_low'] = (x_src, -half)
        anchors['source_high'] = (x_src, half)
        anchors['exit_low'] = (x_exit, -half)
        anchors['exit_high'] = (x_exit, half)
    return anchors


@dataclass
class BuildArtifacts:
    spec: SceneSpec
    scene: Scene
    raster: SceneRaster
    anchors: Dict[str, Point]
    source: Union[DipoleSource, LineSource]
    monitors: List[Monitor]


class Experiment:
    """
    One variant of a run config: build, simulate, store, analyse.

    Usage:
        config = load_run_config("configs/runs/grid_phase.yaml")
        for variant in config.variants():
            Experiment(variant, settings).execute(store)
    """

    def __init__(
        self,
        config: RunConfig,
        settings: Optional[Settings] = None,
        workers: Optional[int] = None,
        preset_directory: Optional[Union[str, Path]] = None,
    ):
        self.config = config
        self.settings = settings or Settings()
        overrides = dict(config.section('engine', {}) or {})
        if workers is not None:
            overrides['workers'] = workers
        self.engine: EngineSettings = self.settings.engine.merged(overrides)
        self.preset_directory = preset_directory
        self._build: Optional[BuildArtifacts] = None

    @property
    def key(self) -> str:
        suffix = f"-{self.config.variant}" if self.config.variant else ""
        return f"{self.config.name}{suffix}-{self.config.digest[:12]}"

    def _materials(self, scene: Scene) -> Dict[str, Any]:
        named = self.config.section('materials', {}) or {}
        out = {}
        for material_id in scene.material_ids:
            if material_id.lower() == 'pec':
                continue
            if material_id in named:
                out[material_id] = load_preset(str(named[material_id]), self.preset_directory).material
            else:
                out[material_id] = resolve_material(material_id, self.preset_directory)
        return out

    def _cell_size(self, scene: Scene, omega: float, materials: Dict[str, Any]) -> float:
        resolution = self.config.section('resolution', {}) or {}
        if 'cell_size' in resolution:
            return parse_length(resolution['cell_size'], "resolution.cell_size")
        return choose_cell_size(
            omega,
            materials.values(),
            scene.min_feature,
            int(resolution.get('cells_per_wavelength', self.engine.cells_per_wavelength)),
            int(resolution.get('min_channel_cells', self.engine.min_channel_cells)),
        )

    def _monitors(self, scene: Scene, anchors: Dict[str, Point]) -> List[Monitor]:
        monitors: List[Monitor] = []
        for k, entry in enumerate(self.config.section('monitors', []) or []):
            path = f"monitors[{k}]"
            if entry.get('kind') == 'cavities':
                freqs = [float(f) for f in entry.get('frequencies', [])]
                if not scene.cavities:
                    raise ConfigError("scene has no cavities", path)
                monitors.extend(point_monitor(cavity_monitor(i), c, freqs) for i, c in enumerate(scene.cavities))
            else:
                monitors.append(monitor_from_dict(entry, anchors, path))
        return monitors

    def build(self) -> BuildArtifacts:
        if self._build is not None:
            return self._build
        spec, scene = parse_scene(self.config.section('scene'))
        anchors = scene_anchors(scene)
        source = source_from_dict(self.config.section('source'), anchors)
        materials = self._materials(scene)
        dx = self._cell_size(scene, source.waveform.omega, materials)
        resolution = self.config.section('resolution', {}) or {}
        raster = rasterize(
            scene, dx, materials=materials, preset_directory=self.preset_directory,
            workers=self.engine.workers,
            min_cells=int(resolution.get('min_channel_cells', self.engine.min_channel_cells)),
        )
        self._build = BuildArtifacts(spec, scene, raster, anchors, source, self._monitors(scene, anchors))
        logger.info("Built %s scene %s: %dx%d cells at %.3e m", scene.kind, self.key, raster.nx, raster.ny, dx)
        return self._build

    def _pml_axes(self, scene: Scene) -> Sequence[str]:
        axes = self.config.section('pml_axes')
        if axes is not None:
            return tuple(axes)
        return ('x',) if scene.kind == 'slab' else ('x', 'y')

    def _stop(self) -> StopCriteria:
        stop = self.config.section('stop', {}) or {}
        base = StopCriteria.from_settings(self.engine)
        return StopCriteria(
            max_steps=int(stop.get('max_steps', base.max_steps)),
            steady_tolerance=float(stop.get('steady_tolerance', base.steady_tolerance)),
            steady_floor=float(stop.get('steady_floor', base.steady_floor)),
            decay_tolerance=float(stop.get('decay_tolerance', base.decay_tolerance)),
            min_periods=stop.get('min_periods'),
        )

    def simulate(self) -> RunResult:
        art = self.build()
        simulation = Simulation(
            art.raster, [art.source], art.monitors,
            settings=self.engine, pml_axes=self._pml_axes(art.scene),
        )
        return simulation.run(self._stop())

    def reference(self) -> 'Experiment':
        """
        Calibration run with the same source and monitors: a straight
        uninterrupted guide for guide scenes, the slab replaced by its
        background for slab scenes.
        """
        scene = self.config.section('scene')
        data = copy.deepcopy(self.config.raw)
        kind = scene.get('kind', 'grid')
        if kind == 'guide':
            spec = GuideSpec.from_dict({k: v for k, v in scene.items() if k != 'kind'}, "scene")
            data['scene'] = {k: v for k, v in spec.reference().to_dict().items() if k != 'kind'}
            data['scene']['kind'] = 'guide'
        elif kind == 'slab':
            data['scene']['material'] = scene.get('background', 'vacuum')
        else:
            raise ConfigError(f"{kind} scenes have no reference run", "scene.kind")
        data.pop('analyses', None)
        data.pop('snapshots', None)
        config = RunConfig(name=self.config.name, raw=data, path=self.config.path, variant='reference')
        return Experiment(config, self.settings, self.engine.workers, self.preset_directory)

    def write_build(self, directory: Path) -> Dict[str, str]:
        art = self.build()
        directory.mkdir(parents=True, exist_ok=True)
        raster_path = write_raster(art.raster, directory / "raster.bin")
        preview = write_pgm(art.raster, directory / "raster.pgm")
        return {'raster': raster_path.name, 'preview': preview.name}

    def _write_snapshots(self, result: RunResult, directory: Path) -> Dict[str, str]:
        written = {}
        for k, entry in enumerate(self.config.section('snapshots', []) or []):
            name = entry.get('monitor', 'field')
            component = entry.get('component', 'hz')
            if name not in result.monitors or result.monitors[name].kind != 'field':
                raise ConfigError(f"snapshot needs a field monitor named {name!r}", f"snapshots[{k}]")
            values = result.monitors[name].phasor(component)
            path = write_snapshot(
                Snapshot(values=values, dx=result.dx, component=component, omega=result.omega, origin=result.origin),
                directory / f"{name}_{component}.snap",
            )
            written[f"snapshot_{name}_{component}"] = path.name
        return written

    def execute(self, store: ResultStore) -> Tuple[RunManifest, RunResult]:
        """Build, run, persist; run the configured analyses on a converged result."""
        manifest = RunManifest(
            command='run',
            name=self.config.name,
            variant=self.config.variant,
            config_digest=self.config.digest,
            tool_version=__version__,
        )
        if self.config.path is not None:
            manifest.inputs['config'] = sha256_file(self.config.path)
        directory = store.run_dir(self.key) if isinstance(store, FileResultStore) else None

        analyses = self.config.analyses()
        reference_key = None
        if any(kind in analyses for kind in REFERENCED_KINDS):
            ref_exp = self.reference()
            ref_exp.execute(store)
            reference_key = ref_exp.key
            manifest.status['reference_run'] = reference_key

        if directory is not None:
            manifest.outputs.update(self.write_build(directory))
            store.write(f"config:{self.key}", self.config.raw)
            manifest.outputs['config'] = "config.json"

        result = self.simulate()
        store.save_run(self.key, result)
        manifest.status.update({'converged': result.converged, 'steps': result.steps, 'residual': result.residual})
        manifest.outputs['phasors'] = "phasors.npz"
        manifest.outputs['summary'] = "summary.json"

        if directory is not None:
            manifest.outputs.update(self._write_snapshots(result, directory))

        if result.converged and directory is not None:
            analyzer = Analyzer(self.key, store, self.preset_directory)
            manifest.outputs.update(analyzer.run(analyses, reference_key))
        manifest.finish()
        store.save_manifest(manifest)
        if not result.converged:
            raise NotConvergedError(result.steps, result.residual, self._stop().steady_tolerance)
        return manifest, result


class Analyzer:
    """Analyses over a stored run, reconstructed from its stored config."""

    def __init__(self, run_key: str, store: FileResultStore, preset_directory=None):
        self.run_key = run_key
        self.store = store
        self.directory = store.run_dir(run_key)
        raw = store.read(f"config:{run_key}")
        if raw is None:
            raise ConfigError(f"no stored config for run {run_key!r}", str(self.directory))
        self.config = RunConfig.from_dict(raw)
        self.spec, self.scene = parse_scene(self.config.section('scene'))
        self.anchors = scene_anchors(self.scene)
        self.source = source_from_dict(self.config.section('source'), self.anchors)
        self.preset_directory = preset_directory
        self._result: Optional[RunResult] = None

    @property
    def result(self) -> RunResult:
        if self._result is None:
            self._result = self.store.load_run(self.run_key)
            if self._result is None:
                raise ConfigError(f"run {self.run_key!r} has no stored phasors", str(self.directory))
        return self._result

    def _inputs(self) -> Dict[str, Path]:
        return {'phasors': self.directory / "phasors.npz", 'summary': self.directory / "summary.json"}

    def decay(self, source_index: Optional[int] = None) -> DecayCurve:
        curve = decay_vs_distance(self.result, self.spec, source_index)
        write_csv(self.directory / "decay.csv", DECAY_COLUMNS, curve.rows())
        write_report(self.directory / "decay.json", "decay_vs_distance", curve.to_dict(), self._inputs())
        return curve

    def phase(self) -> Dict[str, Any]:
        phase_map = phase_spread(self.result, self.spec)
        write_csv(self.directory / "phase.csv", PHASE_COLUMNS, phase_map.rows())
        write_report(self.directory / "phase.json", "phase_spread", phase_map.to_dict(), self._inputs())
        return phase_map.to_dict()

    def coupling(self, d1: Any = None, d2: Any = None, monitor: str = "cavity_1") -> List[CouplingResult]:
        if not isinstance(self.source, DipoleSource):
            raise ConfigError("coupling needs a dipole source", "source")
        v1 = parse_vector(d1, "analyses.coupling.d1") if d1 is not None else self.source.orientation
        v2 = parse_vector(d2, "analyses.coupling.d2") if d2 is not None else v1
        m = self.result.monitor(monitor) if monitor in self.result.monitors else None
        frequencies = m.frequencies.tolist() if m is not None else [self.result.omega]
        samples = [extract_green([(self.result, self.source)], monitor, omega) for omega in frequencies]
        results = coupling_scan(samples, v1, v2, reference_moment=abs(self.source.moment))
        rows = [(r.omega, r.gamma21_normalized, r.lamb_shift_normalized) for r in results]
        write_csv(self.directory / "coupling.csv", COUPLING_COLUMNS, rows)
        write_report(
            self.directory / "coupling.json", "coupled_decay",
            {'couplings': [r.to_dict() for r in results], 'green': [s.to_dict() for s in samples]},
            self._inputs(),
        )
        return results

    def retention(self, monitor: str = "field") -> float:
        if not isinstance(self.spec, BentChannelSpec):
            raise ConfigError("retention needs a bent-channel scene", "scene.kind")
        value = amplitude_retention(self.result, self.spec, monitor)
        write_report(self.directory / "retention.json", "amplitude_retention", {'retention': value}, self._inputs())
        return value

    def transmission(self, reference_key: str, monitor: str = "exit", mu_rp: float = 1.0) -> Dict[str, Any]:
        if not isinstance(self.spec, GuideSpec):
            raise ConfigError("transmission needs a guide scene", "scene.kind")
        reference = self.store.load_run(reference_key)
        if reference is None:
            raise ConfigError(f"reference run {reference_key!r} not found", "analyses.transmission")
        measured = guide_transmission(self.result, reference, self.spec.a1, self.spec.a2, monitor)
        query = SupercouplingQuery(
            a1=self.spec.a1, a2=self.spec.a2, channel_area=self.spec.channel_area,
            k0=self.result.omega / C0, mu_rp=mu_rp,
        )
        rho, t2 = supercoupling_reflection(query)
        payload = {
            'measured_T': measured,
            'analytic_T': math.sqrt(max(t2, 0.0)),
            'analytic_rho': {'re': rho.real, 'im': rho.imag},
            'k0_Ap_over_a1': query.k0 * query.channel_area / query.a1,
        }
        inputs = self._inputs()
        inputs['reference_phasors'] = self.store.run_dir(reference_key) / "phasors.npz"
        write_report(self.directory / "transmission.json", "guide_transmission", payload, inputs)
        return payload

    def slab(self, reference_key: str, monitor: str = "exit") -> SlabComparison:
        if self.scene.kind != 'slab':
            raise ConfigError("slab analysis needs a slab scene", "scene.kind")
        reference = self.store.load_run(reference_key)
        if reference is None:
            raise ConfigError(f"reference run {reference_key!r} not found", "analyses.slab")
        name = str(self.config.section('scene')['material'])
        named = self.config.section('materials', {}) or {}
        material = resolve_material(str(named.get(name, name)), self.preset_directory)
        comparison = compare_slab(
            self.result, reference, material, self.scene.meta['thickness'], monitor, name,
        )
        inputs = self._inputs()
        inputs['reference_phasors'] = self.store.run_dir(reference_key) / "phasors.npz"
        write_csv(self.directory / "slab.csv", SLAB_COLUMNS, comparison.rows())
        write_report(self.directory / "slab.json", "slab_transmission", comparison.to_dict(), inputs)
        return comparison

    def run(self, analyses: Dict[str, Dict[str, Any]], reference_key: Optional[str] = None) -> Dict[str, str]:
        """Run the named analyses; returns the output files written."""
        outputs: Dict[str, str] = {}
        for kind, options in analyses.items():
            logger.info("Running %s analysis on %s", kind, self.run_key)
            if kind == 'decay':
                self.decay(options.get('source_index'))
                outputs.update({'decay_csv': "decay.csv", 'decay_report': "decay.json"})
            elif kind == 'phase':
                self.phase()
                outputs.update({'phase_csv': "phase.csv", 'phase_report': "phase.json"})
            elif kind == 'coupling':
                self.coupling(options.get('d1'), options.get('d2'), options.get('monitor', 'cavity_1'))
                outputs.update({'coupling_csv': "coupling.csv", 'coupling_report': "coupling.json"})
            elif kind == 'retention':
                self.retention(options.get('monitor', 'field'))
                outputs['retention_report'] = "retention.json"
            elif kind == 'transmission':
                key = options.get('reference') or reference_key
                if key is None:
                    raise ConfigError("transmission needs a reference run", "analyses.transmission")
                self.transmission(key, options.get('monitor', 'exit'), float(options.get('mu_rp', 1.0)))
                outputs['transmission_report'] = "transmission.json"
            elif kind == 'slab':
                key = options.get('reference') or reference_key
                if key is None:
                    raise ConfigError("slab analysis needs a reference run", "analyses.slab")
                self.slab(key, options.get('monitor', 'exit'))
                outputs.update({'slab_csv': "slab.csv", 'slab_report': "slab.json"})
        return outputs

    def analyze(self, analyses: Dict[str, Dict[str, Any]]) -> RunManifest:
        """Run analyses and record a manifest chained to the run's own manifest."""
        parent = self.directory / "manifest.json"
        manifest = RunManifest(
            command='analyze',
            name=self.config.name,
            config_digest=self.config.digest,
            tool_version=__version__,
            parent_digest=sha256_file(parent) if parent.exists() else None,
        )
        run_manifest = self.store.get_manifest(self.run_key)
        reference_key = run_manifest.status.get('reference_run') if run_manifest else None
        manifest.inputs = {name: sha256_file(p) for name, p in self._inputs().items()}
        manifest.outputs = self.run(analyses, reference_key)
        manifest.finish()
        self.store.write(f"analysis:{self.run_key}", manifest.to_dict())
        return manifest


def group_key(config: RunConfig) -> str:
    return f"{config.name}-{config.digest[:12]}"


def compare_variants(
    group: str,
    store: FileResultStore,
    variant_keys: Dict[str, str],
    analyses: Sequence[str],
) -> Dict[str, str]:
    """Group-level outputs across variants: paired decay curves, merged coupling scans."""
    directory = store.run_dir(group)
    outputs: Dict[str, str] = {}

    if 'decay' in analyses and len(variant_keys) >= 2:
        curves = {}
        for variant, key in variant_keys.items():
            report = store.read(f"decay:{key}")
            if report is not None:
                curves[variant] = {e['index']: e['normalized_E'] for e in report['result']['entries']}
        if len(curves) >= 2:
            names = sorted(curves)
            base, other = names[0], names[1]
            ratios = {str(i): curves[base][i] / curves[other][i] for i in curves[base] if curves[other].get(i)}
            inputs = {f"decay_{v}": store.run_dir(k) / "decay.json" for v, k in variant_keys.items()}
            write_report(directory / "decay_comparison.json", "decay_comparison",
                         {'numerator': base, 'denominator': other, 'ratios': ratios,
                          'min_ratio': min(ratios.values()) if ratios else None}, inputs)
            outputs['decay_comparison'] = f"{group}/decay_comparison.json"

    if 'coupling' in analyses and len(variant_keys) >= 2:
        rows = []
        for key in variant_keys.values():
            report = store.read(f"coupling:{key}")
            if report is not None:
                rows.extend((c['omega'], c['gamma21_norm'], c['lamb_norm']) for c in report['result']['couplings'])
        if rows:
            write_csv(directory / "coupling_scan.csv", COUPLING_COLUMNS, sorted(rows))
            outputs['coupling_scan'] = f"{group}/coupling_scan.csv"
    return outputs


def run_config(
    config: RunConfig,
    settings: Optional[Settings] = None,
    output_dir: Optional[Union[str, Path]] = None,
    workers: Optional[int] = None,
    preset_directory: Optional[Union[str, Path]] = None,
) -> List[RunManifest]:
    """Execute every variant of a config; group comparisons after all variants ran."""
    settings = settings or Settings()
    store = FileResultStore(output_dir or settings.output_dir)
    manifests: List[RunManifest] = []
    keys: Dict[str, str] = {}
    failure: Optional[NotConvergedError] = None
    for variant in config.variants():
        experiment = Experiment(variant, settings, workers, preset_directory)
        try:
            manifest, _ = experiment.execute(store)
        except NotConvergedError as e:
            logger.warning("Variant %s did not converge; outputs kept in %s", experiment.key, store.run_dir(experiment.key))
            failure = failure or e
            continue
        manifests.append(manifest)
        keys[variant.variant or 'base'] = experiment.key
    if len(keys) >= 2:
        group = group_key(config)
        outputs = compare_variants(group, store, keys, list(config.analyses()))
        manifest = RunManifest(
            command='run', name=config.name, config_digest=config.digest, tool_version=__version__,
            outputs=outputs, status={'variants': keys},
        )
        manifest.finish()
        store.write(f"manifest:{group}", manifest.to_dict())
        manifests.append(manifest)
    if failure is not None:
        raise failure
    return manifests


def analyze_target(
    target: Union[str, Path],
    analyses: Dict[str, Dict[str, Any]],
    preset_directory: Optional[Union[str, Path]] = None,
) -> List[RunManifest]:
    """
    Analyse a stored run directory, or every variant of a group directory
    followed by the group comparisons.
    """
    target = Path(target)
    if not (target / "manifest.json").exists():
        raise ConfigError(f"{target} holds no manifest.json", str(target))
    store = FileResultStore.for_run_directory(target)
    key = target.resolve().name
    manifest = store.get_manifest(key)
    variants = manifest.status.get('variants') if manifest else None
    if not variants:
        return [Analyzer(key, store, preset_directory).analyze(analyses)]

    manifests = [Analyzer(k, store, preset_directory).analyze(analyses) for k in variants.values()]
    outputs = compare_variants(key, store, dict(variants), list(analyses))
    group = RunManifest(
        command='analyze', name=manifest.name, config_digest=manifest.config_digest,
        tool_version=__version__, outputs=outputs, status={'variants': dict(variants)},
        parent_digest=sha256_file(target / "manifest.json"),
    )
    group.finish()
    store.write(f"analysis:{key}", group.to_dict())
    manifests.append(group)
    return manifests


def describe_material(
    name_or_path: str,
    at: Optional[float] = None,
    omega_range: Optional[Tuple[float, float]] = None,
    preset_directory: Optional[Union[str, Path]] = None,
) -> CoherenceReport:
    """Coherence report of a preset or a tabulated CSV."""
    material = load_preset(name_or_path, preset_directory).material
    return coherence_length(material, at=at, omega_range=omega_range)


def budget(coherence: float, pitch: float) -> Dict[str, Any]:
    nodes = node_budget(coherence, pitch)
    counted = lattice_nodes_within(coherence, pitch)
    return {
        'coherence_length_m': coherence,
        'pitch_m': pitch,
        'node_budget': nodes,
        'lattice_count': counted,
        'relative_difference': abs(counted - nodes) / nodes if nodes else None,
    }
