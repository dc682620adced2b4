"""
2D TM time-domain engine with dispersive media and CPML boundaries.
"""

from .cpml import CPML
from .engine import RunResult, Simulation, StopCriteria, run, steady_residual
from .exceptions import (
    InstabilityError,
    NotConvergedError,
    SimulationError,
    SourcePlacementError,
    StabilityError,
)
from .layout import YeeLayout, choose_cell_size, courant_dt, steps_per_period
from .media import EdgeMedia, build_media
from .monitors import (
    Monitor,
    MonitorResult,
    field_monitor,
    line_monitor,
    monitor_from_dict,
    point_monitor,
    trace_monitor,
)
from .snapshots import Snapshot, read_snapshot, write_snapshot
from .sources import (
    DipoleSource,
    GaussianPulse,
    LineSource,
    RampedCW,
    source_from_dict,
    waveform_from_dict,
)
from .state import FieldState, field_energy

__all__ = [
    'CPML',
    'RunResult',
    'Simulation',
    'StopCriteria',
    'run',
    'steady_residual',
    'InstabilityError',
    'NotConvergedError',
    'SimulationError',
    'SourcePlacementError',
    'StabilityError',
    'YeeLayout',
    'choose_cell_size',
    'courant_dt',
    'steps_per_period',
    'EdgeMedia',
    'build_media',
    'Monitor',
    'MonitorResult',
    'field_monitor',
    'line_monitor',
    'monitor_from_dict',
    'point_monitor',
    'trace_monitor',
    'Snapshot',
    'read_snapshot',
    'write_snapshot',
    'DipoleSource',
    'GaussianPulse',
    'LineSource',
    'RampedCW',
    'source_from_dict',
    'waveform_from_dict',
    'FieldState',
    'field_energy',
]
