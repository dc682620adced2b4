"""
Material presets shipped as YAML (or CSV tables) under configs/materials.

Preset document:

    name: sic
    eps_infinity: 6.7
    drude: {wp: ..., gamma: ...}
    lorentz:
      - {delta_eps: 3.53, w0: 785.57 cm-1, gamma: 5.0 cm-1}
    validity_range: [9um, 12um]
    fitted: true
    targets: {enz_wavelength: 10.3um, eps_imag: 0.1, coherence_time: 1.061ps}

A preset may instead carry an `enz_drude` block {omega0, eps_target,
eps_infinity} describing a Drude medium pinned to a small complex eps.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from ..config import (
    load_yaml,
    parse_frequency,
    parse_length,
    parse_squared_frequency,
    preset_dir,
    omega_of,
)
from ..exceptions import ConfigError
from .dispersion import enz_drude
from .exceptions import PresetNotFoundError
from .models import VACUUM, DispersionModel, Material, OscillatorTerm, TabulatedPermittivity

logger = logging.getLogger(__name__)

VACUUM_ALIASES = ("vacuum", "air")


@dataclass(frozen=True)
class MaterialPreset:
    """A named material together with its provenance."""
    name: str
    material: Material
    fitted: bool = False
    targets: Dict[str, Any] = field(default_factory=dict)
    description: str = ""
    source: str = ""

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            'name': self.name,
            'fitted': self.fitted,
            'targets': dict(self.targets),
            'description': self.description,
            'source': self.source,
        }
        if isinstance(self.material, DispersionModel):
            data['model'] = self.material.to_dict()
        else:
            data['table'] = {
                'samples': len(self.material.wavelengths),
                'wavelength_range_m': list(self.material.wavelength_range),
            }
        return data


def _parse_oscillator(data: Dict[str, Any], path: str) -> OscillatorTerm:
    if not isinstance(data, dict):
        raise ConfigError("oscillator must be a mapping", path)
    w0 = parse_frequency(data.get('w0', 0.0), f"{path}.w0")
    gamma = parse_frequency(data.get('gamma', 0.0), f"{path}.gamma")
    if 'strength' in data:
        strength = parse_squared_frequency(data['strength'], f"{path}.strength")
    elif 'delta_eps' in data:
        strength = float(data['delta_eps']) * w0 ** 2
    else:
        raise ConfigError("oscillator needs 'strength' or 'delta_eps'", path)
    try:
        return OscillatorTerm(strength=strength, resonance_frequency=w0, damping=gamma)
    except ValueError as e:
        raise ConfigError(str(e), path) from e


def _parse_validity(value: Any, path: str) -> Optional[tuple]:
    """Validity ranges are given as wavelengths and stored as omegas."""
    if value is None:
        return None
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError("validity_range must be [min_wavelength, max_wavelength]", path)
    lo, hi = sorted(parse_length(v, path) for v in value)
    return omega_of(hi), omega_of(lo)


def parse_preset(data: Dict[str, Any], source: str = "") -> MaterialPreset:
    """Build a MaterialPreset from a parsed YAML mapping."""
    name = str(data.get('name') or Path(source).stem or 'material')
    validity = _parse_validity(data.get('validity_range'), f"{source}:validity_range")

    if 'enz_drude' in data:
        block = data['enz_drude'] or {}
        omega0 = parse_frequency(block.get('omega0'), f"{source}:enz_drude.omega0")
        target = block.get('eps_target')
        if not isinstance(target, (list, tuple)) or len(target) != 2:
            raise ConfigError("eps_target must be [re, im]", f"{source}:enz_drude.eps_target")
        try:
            base = enz_drude(
                omega0, complex(float(target[0]), float(target[1])),
                eps_infinity=float(block.get('eps_infinity', 1.0)),
            )
        except ValueError as e:
            raise ConfigError(str(e), f"{source}:enz_drude") from e
        model = DispersionModel(
            eps_infinity=base.eps_infinity,
            drude_plasma_frequency=base.drude_plasma_frequency,
            drude_damping=base.drude_damping,
            name=name,
            validity_range=validity,
        )
    else:
        drude = data.get('drude') or {}
        terms = [
            _parse_oscillator(t, f"{source}:lorentz[{i}]")
            for i, t in enumerate(data.get('lorentz') or [])
        ]
        try:
            model = DispersionModel(
                eps_infinity=float(data.get('eps_infinity', 1.0)),
                drude_plasma_frequency=parse_frequency(drude.get('wp', 0.0), f"{source}:drude.wp"),
                drude_damping=parse_frequency(drude.get('gamma', 0.0), f"{source}:drude.gamma"),
                lorentz_terms=tuple(terms),
                name=name,
                validity_range=validity,
            )
        except ValueError as e:
            raise ConfigError(str(e), source) from e

    return MaterialPreset(
        name=name,
        material=model,
        fitted=bool(data.get('fitted', False)),
        targets=dict(data.get('targets') or {}),
        description=str(data.get('description', '')).strip(),
        source=source,
    )


def _candidates(name: str, directory: Path) -> List[Path]:
    return [directory / f"{name}.yaml", directory / f"{name}.yml", directory / f"{name}.csv"]


def load_preset(name: str, directory: Optional[Union[str, Path]] = None) -> MaterialPreset:
    """
    Load a preset by name, or directly from a .yaml/.csv path.

    Names are looked up in `directory`, else ENZGRID_PRESET_DIR, else configs/materials.
    """
    direct = Path(name)
    if direct.suffix in ('.yaml', '.yml', '.csv') and direct.exists():
        return _load_file(direct)

    base = Path(directory) if directory is not None else preset_dir()
    candidates = _candidates(name, base)
    for path in candidates:
        if path.exists():
            return _load_file(path)
    raise PresetNotFoundError(name, [str(p) for p in candidates])


def _load_file(path: Path) -> MaterialPreset:
    logger.debug("Loading material preset from %s", path)
    if path.suffix == '.csv':
        table = TabulatedPermittivity.from_csv(path)
        return MaterialPreset(name=path.stem, material=table, source=str(path))
    return parse_preset(load_yaml(path), source=str(path))


def list_presets(directory: Optional[Union[str, Path]] = None) -> List[str]:
    base = Path(directory) if directory is not None else preset_dir()
    if not base.exists():
        return []
    names = {p.stem for p in base.iterdir() if p.suffix in ('.yaml', '.yml', '.csv')}
    return sorted(names)


def resolve_material(name: str, directory: Optional[Union[str, Path]] = None) -> Material:
    """Material for an id used in scenes and commands (vacuum/air built in)."""
    if name.lower() in VACUUM_ALIASES:
        return VACUUM
    return load_preset(name, directory).material
