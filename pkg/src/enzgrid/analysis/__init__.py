"""
Physical quantities derived from run results.
"""

from .exceptions import (
    AnalysisError,
    ConvergenceRequiredError,
    FrequencyMismatchError,
    MissingMonitorError,
)
from .green import (
    coupled_decay,
    coupling_peak,
    coupling_scan,
    extract_green,
    purcell_factor,
    self_green,
)
from .models import (
    CouplingResult,
    DecayCurve,
    DecayEntry,
    GreensSample,
    PhaseMap,
    SlabComparison,
    SlabSample,
    SupercouplingQuery,
    TimeBinQubit,
    TransportVerdict,
)
from .network import (
    amplitude_retention,
    cavity_monitor,
    circular_spread,
    cut_line_profile,
    decay_vs_distance,
    lattice_nodes_within,
    node_budget,
    phase_spread,
    transport_feasible,
)
from .propagation import compare_slab, line_wavenumber, slab_transmission
from .reports import write_csv, write_report
from .supercoupling import guide_transmission, supercoupling_reflection

__all__ = [
    'AnalysisError',
    'ConvergenceRequiredError',
    'FrequencyMismatchError',
    'MissingMonitorError',
    'coupled_decay',
    'coupling_peak',
    'coupling_scan',
    'extract_green',
    'purcell_factor',
    'self_green',
    'CouplingResult',
    'DecayCurve',
    'DecayEntry',
    'GreensSample',
    'PhaseMap',
    'SlabComparison',
    'SlabSample',
    'SupercouplingQuery',
    'TimeBinQubit',
    'TransportVerdict',
    'amplitude_retention',
    'cavity_monitor',
    'circular_spread',
    'cut_line_profile',
    'decay_vs_distance',
    'lattice_nodes_within',
    'node_budget',
    'phase_spread',
    'transport_feasible',
    'compare_slab',
    'line_wavenumber',
    'slab_transmission',
    'write_csv',
    'write_report',
    'guide_transmission',
    'supercoupling_reflection',
]
