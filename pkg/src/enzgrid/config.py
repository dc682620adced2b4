"""
Configuration loading and unit handling.

Configs are YAML documents with a JSON-compatible data model. Quantities may
be plain SI numbers or strings with a unit suffix ("780nm", "2.089 um",
"10 THz", "1.5 eV", "970 cm-1"). Internally everything is SI base units and
angular frequencies are rad/s.
"""

import logging
import math
import os
import re
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml

from .constants import C0, HBAR
from .exceptions import ConfigError

logger = logging.getLogger(__name__)

PRESET_DIR_ENV = "ENZGRID_PRESET_DIR"

Quantity = Union[int, float, str]

_QUANTITY_RE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([^\s\d].*)?$")

LENGTH_UNITS = {
    "m": 1.0,
    "cm": 1e-2,
    "mm": 1e-3,
    "um": 1e-6,
    "µm": 1e-6,
    "micron": 1e-6,
    "nm": 1e-9,
    "pm": 1e-12,
}

FREQUENCY_UNITS = {
    "hz": 1.0,
    "khz": 1e3,
    "mhz": 1e6,
    "ghz": 1e9,
    "thz": 1e12,
    "phz": 1e15,
}

TIME_UNITS = {
    "s": 1.0,
    "ms": 1e-3,
    "us": 1e-6,
    "ns": 1e-9,
    "ps": 1e-12,
    "fs": 1e-15,
}

EV_TO_RAD_S = 1.602176634e-19 / HBAR


def _split(value: Quantity, path: str) -> "tuple[float, str]":
    if isinstance(value, bool):
        raise ConfigError(f"expected a quantity, got {value!r}", path)
    if isinstance(value, (int, float)):
        return float(value), ""
    match = _QUANTITY_RE.match(str(value))
    if not match:
        raise ConfigError(f"cannot parse quantity {value!r}", path)
    return float(match.group(1)), (match.group(2) or "").strip()


def parse_length(value: Quantity, path: str = "") -> float:
    """Parse a length in metres."""
    number, unit = _split(value, path)
    if not unit:
        return number
    if unit not in LENGTH_UNITS:
        raise ConfigError(f"unknown length unit {unit!r}", path)
    return number * LENGTH_UNITS[unit]


def parse_time(value: Quantity, path: str = "") -> float:
    """Parse a duration in seconds."""
    number, unit = _split(value, path)
    if not unit:
        return number
    if unit not in TIME_UNITS:
        raise ConfigError(f"unknown time unit {unit!r}", path)
    return number * TIME_UNITS[unit]


def parse_frequency(value: Quantity, path: str = "") -> float:
    """
    Parse an angular frequency in rad/s.

    Accepts rad/s numbers, cyclic frequencies (Hz..PHz, converted with 2*pi*f),
    photon energies in eV, wavenumbers in cm-1 and vacuum wavelengths
    (converted with 2*pi*c/lambda).
    """
    number, unit = _split(value, path)
    if not unit or unit == "rad/s":
        return number
    key = unit.lower()
    if key in FREQUENCY_UNITS:
        return 2.0 * math.pi * number * FREQUENCY_UNITS[key]
    if key == "ev":
        return number * EV_TO_RAD_S
    if key in ("cm-1", "cm^-1", "1/cm"):
        return 2.0 * math.pi * C0 * number * 100.0
    if unit in LENGTH_UNITS:
        wavelength = number * LENGTH_UNITS[unit]
        if wavelength <= 0:
            raise ConfigError(f"wavelength must be positive, got {value!r}", path)
        return 2.0 * math.pi * C0 / wavelength
    raise ConfigError(f"unknown frequency unit {unit!r}", path)


def parse_squared_frequency(value: Quantity, path: str = "") -> float:
    """Parse an oscillator strength in rad^2/s^2 (plain number or '<freq>^2')."""
    if isinstance(value, str) and value.strip().endswith("^2"):
        return parse_frequency(value.strip()[:-2], path) ** 2
    number, unit = _split(value, path)
    if unit:
        raise ConfigError(f"strength must be rad^2/s^2 or '<frequency>^2', got {value!r}", path)
    return number


def wavelength_of(omega: float) -> float:
    """Vacuum wavelength (m) of an angular frequency (rad/s)."""
    return 2.0 * math.pi * C0 / omega


def omega_of(wavelength: float) -> float:
    """Angular frequency (rad/s) of a vacuum wavelength (m)."""
    return 2.0 * math.pi * C0 / wavelength


def require(data: Dict[str, Any], key: str, path: str = "") -> Any:
    """Fetch a mandatory key from a config mapping."""
    if not isinstance(data, dict):
        raise ConfigError("expected a mapping", path)
    if key not in data or data[key] is None:
        raise ConfigError(f"missing required field '{key}'", path)
    return data[key]


def load_yaml(path: Union[str, Path]) -> Dict[str, Any]:
    """Load a YAML document, mapping parse failures onto ConfigError."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"file not found: {path}", str(path))
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"YAML parse error: {e}", str(path)) from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("top level must be a mapping", str(path))
    return data


def _package_root() -> Path:
    return Path(__file__).resolve().parents[2]


def config_candidates(*parts: str) -> List[Path]:
    """Candidate locations of a file or directory under configs/."""
    return [
        Path("configs").joinpath(*parts),
        Path("..", "configs").joinpath(*parts),
        _package_root().joinpath("configs", *parts),
    ]


def find_config(*parts: str) -> Optional[Path]:
    for path in config_candidates(*parts):
        if path.exists():
            return path
    return None


def preset_dir() -> Path:
    """Directory holding material presets (env override first)."""
    env = os.environ.get(PRESET_DIR_ENV)
    if env:
        return Path(env)
    found = find_config("materials")
    if found is None:
        return _package_root() / "configs" / "materials"
    return found


@dataclass(frozen=True)
class EngineSettings:
    """Defaults for the FDTD engine and run control."""
    courant: float = 0.5
    pml_cells: int = 10
    pml_order: int = 3
    pml_kappa_max: float = 1.0
    pml_alpha_max: float = 0.0
    cells_per_wavelength: int = 20
    min_channel_cells: int = 4
    steady_tolerance: float = 1e-4
    steady_floor: float = 1e-3
    decay_tolerance: float = 1e-8
    max_steps: int = 200000
    workers: int = 1

    def __post_init__(self):
        if not 0.0 < self.courant <= 1.0:
            raise ConfigError(f"courant must be in (0, 1], got {self.courant}", "engine.courant")
        if self.pml_cells < 0:
            raise ConfigError("pml_cells must be >= 0", "engine.pml_cells")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1", "engine.workers")
        if not 0.0 < self.steady_floor < 1.0:
            raise ConfigError(f"steady_floor must be in (0, 1), got {self.steady_floor}", "engine.steady_floor")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]]) -> "EngineSettings":
        data = data or {}
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown engine settings: {sorted(unknown)}", "engine")
        return cls(**data)

    def merged(self, overrides: Optional[Dict[str, Any]]) -> "EngineSettings":
        if not overrides:
            return self
        data = self.to_dict()
        data.update(overrides)
        return EngineSettings.from_dict(data)


@dataclass(frozen=True)
class Settings:
    """Top-level settings loaded from configs/config.yaml."""
    engine: EngineSettings = EngineSettings()
    log_level: str = "INFO"
    output_dir: str = "runs"

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Settings":
        logging_block = data.get("logging", {}) or {}
        return cls(
            engine=EngineSettings.from_dict(data.get("engine")),
            log_level=str(logging_block.get("level", "INFO")).upper(),
            output_dir=str(data.get("output_dir", "runs")),
        )


def load_settings(path: Optional[Union[str, Path]] = None) -> Settings:
    """
    Load settings from a YAML file.

    Without an explicit path the usual configs/ locations are searched and
    built-in defaults are used when none exists.
    """
    if path is None:
        path = find_config("config.yaml")
        if path is None:
            logger.debug("No config.yaml found, using built-in defaults")
            return Settings()
    logger.debug("Loading settings from %s", path)
    return Settings.from_dict(load_yaml(path))
