"""
Tunneling through a narrow ENZ channel between two parallel-plate guides.

Transmission-line model of a channel of area A_p (width times length) with
relative permeability mu_rp joining guides of widths a1 and a2:

    rho = [(a1 - a2) + i k0 mu_rp A_p] / [(a1 + a2) - i k0 mu_rp A_p]
    |T|^2 = 1 - |rho|^2

The measured counterpart compares the guided power past the channel with
the incident power taken from a straight reference guide of width a1.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from ..fdtd.engine import RunResult
from .exceptions import AnalysisError
from .green import frequency_index, monitor_of, require_converged
from .models import SupercouplingQuery

logger = logging.getLogger(__name__)


def supercoupling_reflection(query: SupercouplingQuery) -> Tuple[complex, float]:
    """(rho, |T|^2) for the channel described by `query`."""
    tunnel = 1j * query.k0 * query.mu_rp * query.channel_area
    rho = ((query.a1 - query.a2) + tunnel) / ((query.a1 + query.a2) - tunnel)
    return complex(rho), float(1.0 - abs(rho) ** 2)


def _guided_amplitude(run: RunResult, monitor: str, omega: float) -> float:
    m = monitor_of(run, monitor, "guide_transmission")
    if m.kind not in ('line', 'point'):
        raise AnalysisError(f"monitor {monitor!r} must be a line or point monitor, got {m.kind!r}")
    hz = m.phasor('hz', frequency_index(m, omega))
    return float(np.sqrt(np.mean(np.abs(hz) ** 2)))


def guide_transmission(
    run: RunResult,
    reference: RunResult,
    a1: float,
    a2: float,
    monitor: str = "exit",
    reference_monitor: Optional[str] = None,
    omega: Optional[float] = None,
) -> float:
    """
    Measured |T| = sqrt(|Hz_out|^2 a2 / (|Hz_inc|^2 a1)), with Hz the rms
    over a line across the output guide. The reference run is an
    uninterrupted guide of width a1 driven by the same source.
    """
    require_converged(run, "guide_transmission")
    require_converged(reference, "guide_transmission")
    omega = omega if omega is not None else run.omega
    outgoing = _guided_amplitude(run, monitor, omega)
    incident = _guided_amplitude(reference, reference_monitor or monitor, omega)
    if incident == 0:
        raise AnalysisError("reference run carries no field")
    t = float(np.sqrt(outgoing ** 2 * a2 / (incident ** 2 * a1)))
    logger.info("Measured guide transmission |T|=%.4f", t)
    return t
