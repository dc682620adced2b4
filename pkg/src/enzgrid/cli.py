"""
Command-line interface for enzgrid.

Usage:
    enzgrid material --preset sic            - Coherence report of a material
    enzgrid build <config>                   - Rasterize a run config, write raster + preview
    enzgrid run <config>                     - Build, simulate and analyse a run config
    enzgrid analyze <run dir> --decay ...    - Analyses over a stored run
    enzgrid budget --lc 1.4mm --pitch 2.089um
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from . import __version__
from .analysis import TimeBinQubit, transport_feasible
from .config import load_settings, parse_frequency, parse_length
from .core import Experiment, analyze_target, budget, describe_material, load_run_config, run_config
from .exceptions import ConfigError, EnzGridError

logger = logging.getLogger('enzgrid')


def configure_logging(verbose: bool = False, level: str = "INFO") -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else getattr(logging, level, logging.INFO),
        format='%(asctime)s [%(levelname)s] %(name)s: %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S',
        stream=sys.stderr,
    )


def _format(value: Optional[float], unit: str = "", fmt: str = "{:.4g}") -> str:
    if value is None:
        return "-"
    return fmt.format(value) + (f" {unit}" if unit else "")


class EnzGridApp:
    """Main application class."""

    def __init__(self, settings_path: Optional[str] = None, output: Optional[str] = None, workers: Optional[int] = None):
        self.settings = load_settings(settings_path)
        self.output = Path(output or self.settings.output_dir)
        self.workers = workers

    def material(
        self,
        preset: Optional[str] = None,
        csv: Optional[str] = None,
        at: Optional[str] = None,
        omega_range: Optional[Sequence[str]] = None,
        as_json: bool = False,
    ) -> Dict[str, Any]:
        """Print ENZ wavelength, eps at the crossing, tau_c, v_p and L_c."""
        source = csv or preset
        if source is None:
            raise ConfigError("material needs --preset or --csv", "material")
        omega = parse_frequency(at, "--at") if at else None
        window = None
        if omega_range:
            window = (parse_frequency(omega_range[0], "--range"), parse_frequency(omega_range[1], "--range"))
        report = describe_material(source, at=omega, omega_range=window)
        data = report.to_dict()
        if as_json:
            print(json.dumps(data, sort_keys=True, indent=2))
            return data

        print(f"\nMaterial: {report.material}")
        print("=" * 50)
        print(f"  ENZ wavelength:     {_format(report.enz_wavelength and report.enz_wavelength * 1e9, 'nm')}")
        if report.eps_at_enz is not None:
            print(f"  eps at crossing:    {report.eps_at_enz.real:.4g} {report.eps_at_enz.imag:+.4g}i")
        print(f"  evaluated at:       {_format(report.wavelength * 1e9, 'nm')}"
              f"{'' if report.at_crossing else '  (not at crossing)'}")
        print(f"  eps there:          {report.eps.real:.4g} {report.eps.imag:+.4g}i")
        print(f"  loss FWHM:          {_format(report.loss_fwhm, 'rad/s')}")
        print(f"  coherence time:     {_format(report.coherence_time, 's')}")
        print(f"  phase velocity:     {_format(report.phase_velocity, 'm/s')}")
        print(f"  coherence length:   {_format(report.coherence_length, 'm')}")
        print()
        return data

    def build(self, config_path: str) -> Dict[str, str]:
        """Rasterize every variant and write raster + PGM preview."""
        config = load_run_config(config_path)
        written = {}
        for variant in config.variants():
            experiment = Experiment(variant, self.settings, self.workers)
            art = experiment.build()
            directory = self.output / experiment.key
            outputs = experiment.write_build(directory)
            written[experiment.key] = str(directory)
            print(f"{experiment.key}: {art.raster.nx}x{art.raster.ny} cells at {art.raster.cell_size:.3e} m "
                  f"-> {directory / outputs['preview']}")
        return written

    def run(self, config_path: str) -> List[str]:
        config = load_run_config(config_path)
        logger.info("Running %s (%d variant(s))", config.name, len(config.variants()))
        manifests = run_config(config, self.settings, self.output, self.workers)
        print(f"\nRun: {config.name}")
        print("=" * 50)
        for manifest in manifests:
            status = manifest.status
            steps = status.get('steps')
            print(f"  {manifest.key}: "
                  f"{'converged' if status.get('converged', True) else 'NOT converged'}"
                  f"{f' after {steps} steps' if steps is not None else ''}")
            for name, path in sorted(manifest.outputs.items()):
                print(f"      {name:22s} {path}")
        print()
        return [m.key for m in manifests]

    def analyze(self, target: str, analyses: Dict[str, Dict[str, Any]]) -> List[str]:
        manifests = analyze_target(target, analyses)
        for manifest in manifests:
            print(f"  {manifest.key}:")
            for name, path in sorted(manifest.outputs.items()):
                print(f"      {name:22s} {path}")
        return [m.key for m in manifests]

    def budget(self, lc: str, pitch: str, path_length: Optional[str] = None) -> Dict[str, Any]:
        coherence = parse_length(lc, "--lc")
        data = budget(coherence, parse_length(pitch, "--pitch"))
        print("\nNode budget")
        print("=" * 50)
        print(f"  coherence length:   {coherence:.4g} m")
        print(f"  pitch:              {data['pitch_m']:.4g} m")
        print(f"  nodes (pi L^2/a^2): {data['node_budget']:,}")
        print(f"  lattice count:      {data['lattice_count']:,}")
        if path_length is not None:
            verdict = transport_feasible(TimeBinQubit.from_angles(0.0, 0.0), parse_length(path_length, "--path-length"), coherence)
            data['transport'] = verdict.to_dict()
            print(f"  transport:          {'feasible' if verdict.feasible else 'NOT feasible'} "
                  f"(margin {verdict.margin:.4g} m)")
        print()
        return data


def _analyses_from_args(args: argparse.Namespace) -> Dict[str, Dict[str, Any]]:
    analyses: Dict[str, Dict[str, Any]] = {}
    if args.decay:
        analyses['decay'] = {'source_index': args.source_index}
    if args.phase:
        analyses['phase'] = {}
    if args.coupling:
        analyses['coupling'] = {'d1': args.d1, 'd2': args.d2, 'monitor': args.monitor or 'cavity_1'}
    if args.retention:
        analyses['retention'] = {'monitor': args.monitor or 'field'}
    if args.transmission:
        analyses['transmission'] = {'monitor': args.monitor or 'exit'}
    if args.slab:
        analyses['slab'] = {'monitor': args.monitor or 'exit'}
    return analyses


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="enzgrid",
        description="Dispersive 2D FDTD and coherence toolkit for ENZ waveguide networks",
    )
    parser.add_argument("--workers", type=int, default=None, help="Engine worker threads")
    parser.add_argument("--output", default=None, help="Output root directory (default: settings output_dir)")
    parser.add_argument("--settings", default=None, help="Path to config.yaml")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    parser.add_argument("--version", action="version", version=f"enzgrid v{__version__}")

    subparsers = parser.add_subparsers(dest="command", help="Commands")

    # Material command
    material_parser = subparsers.add_parser("material", help="Coherence report of a material")
    material_parser.add_argument("--preset", help="Preset name or YAML path")
    material_parser.add_argument("--csv", help="Tabulated permittivity CSV")
    material_parser.add_argument("--at", help="Evaluate at this frequency or wavelength (e.g. 9um, 30THz)")
    material_parser.add_argument("--range", nargs=2, metavar=("LOW", "HIGH"), help="Crossing search window")
    material_parser.add_argument("--json", action="store_true", help="Print the report as JSON")

    # Build command
    build_parser_ = subparsers.add_parser("build", help="Rasterize a run config")
    build_parser_.add_argument("config", help="Run config YAML")

    # Run command
    run_parser = subparsers.add_parser("run", help="Build, simulate and analyse a run config")
    run_parser.add_argument("config", help="Run config YAML")

    # Analyze command
    analyze_parser = subparsers.add_parser("analyze", help="Analyses over a stored run")
    analyze_parser.add_argument("target", nargs="?", help="Run or group directory")
    analyze_parser.add_argument("--decay", action="store_true", help="Decay vs distance")
    analyze_parser.add_argument("--source-index", type=int, default=None, help="Source cavity for --decay")
    analyze_parser.add_argument("--phase", action="store_true", help="Phase map and spread")
    analyze_parser.add_argument("--coupling", action="store_true", help="Coupled decay and Lamb shift")
    analyze_parser.add_argument("--d1", default=None, help="Donor dipole axis (x, y)")
    analyze_parser.add_argument("--d2", default=None, help="Acceptor dipole axis (x, y)")
    analyze_parser.add_argument("--retention", action="store_true", help="Amplitude retention across a bend")
    analyze_parser.add_argument("--transmission", action="store_true", help="Supercoupling transmission")
    analyze_parser.add_argument("--slab", action="store_true", help="Slab transmission against the transfer matrix")
    analyze_parser.add_argument("--monitor", default=None, help="Monitor used by the analysis")
    analyze_parser.add_argument("--budget", action="store_true", help="Node budget from --lc and --pitch")
    analyze_parser.add_argument("--lc", help="Coherence length (e.g. 1.4mm)")
    analyze_parser.add_argument("--pitch", help="Lattice pitch (e.g. 2.089um)")
    analyze_parser.add_argument("--path-length", help="Transport path length for a feasibility verdict")

    # Budget command
    budget_parser = subparsers.add_parser("budget", help="Node budget within a coherence length")
    budget_parser.add_argument("--lc", required=True, help="Coherence length (e.g. 1.4mm)")
    budget_parser.add_argument("--pitch", required=True, help="Lattice pitch (e.g. 2.089um)")
    budget_parser.add_argument("--path-length", help="Transport path length for a feasibility verdict")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        app = EnzGridApp(args.settings, args.output, args.workers)
        configure_logging(args.verbose, app.settings.log_level)

        if args.command == "material":
            app.material(args.preset, args.csv, args.at, args.range, args.json)
        elif args.command == "build":
            app.build(args.config)
        elif args.command == "run":
            app.run(args.config)
        elif args.command == "analyze":
            analyses = _analyses_from_args(args)
            if args.budget:
                if not (args.lc and args.pitch):
                    parser.error("--budget needs --lc and --pitch")
                app.budget(args.lc, args.pitch, args.path_length)
            if analyses:
                if not args.target:
                    parser.error("analyze needs a run directory")
                app.analyze(args.target, analyses)
            elif not args.budget:
                parser.error("analyze needs at least one analysis flag")
        elif args.command == "budget":
            app.budget(args.lc, args.pitch, args.path_length)
        else:
            parser.print_help()
            return 1
    except EnzGridError as e:
        logger.error("%s", e)
        print(json.dumps(e.to_dict(), sort_keys=True), file=sys.stderr)
        return e.exit_code
    except ValueError as e:
        logger.error("%s", e)
        print(json.dumps({'error': type(e).__name__, 'message': str(e), 'exit_code': 2}), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
