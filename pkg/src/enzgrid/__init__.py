"""
enzgrid - Dispersive 2D FDTD and coherence toolkit for ENZ waveguide networks.

Components:
- materials: dispersion models, ENZ crossings, coherence lengths
- geometry: cavity/channel network scenes and rasterization
- fdtd: time-domain engine with ADE media and CPML
- analysis: Green dyadics, coupling, decay and phase reports
- oracle: closed-form reference solutions
- store: run manifests and stored results
"""

__version__ = "0.1.0"

from .config import EngineSettings, Settings, load_settings
from .core import Analyzer, Experiment, RunConfig, load_run_config, run_config
from .exceptions import ConfigError, EnzGridError

__all__ = [
    "__version__",
    "EngineSettings",
    "Settings",
    "load_settings",
    "Analyzer",
    "Experiment",
    "RunConfig",
    "load_run_config",
    "run_config",
    "ConfigError",
    "EnzGridError",
]
