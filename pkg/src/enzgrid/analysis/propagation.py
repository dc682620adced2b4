"""
Plane waves in uniform media and through slabs.

A line source spanning the height of a slab scene launches a plane wave
along x. The slab transmission is the exit-line Hz of the slab run over
that of the same run with the slab removed, which cancels the source
spectrum and the vacuum path; the transfer-matrix counterpart is
t exp(-i k0 d).

In a uniform medium the complex wavenumber K follows from line samples
spaced m cells apart: every superposition of e^{iKx} and e^{-iKx} obeys

    p[j + m] + p[j - m] = 2 cos(K m dx) p[j]

so waves reflected from the domain ends do not bias it.
"""

import logging
from typing import List, Optional, Tuple

import numpy as np

from ..constants import C0
from ..fdtd.engine import RunResult
from ..materials import Material, permittivity
from ..oracle.transfer_matrix import transfer_matrix_slab
from .exceptions import AnalysisError
from .green import frequency_index, monitor_of, require_converged
from .models import SlabComparison, SlabSample

logger = logging.getLogger(__name__)


def _mean_hz(run: RunResult, monitor: str, omega: float, analysis: str) -> complex:
    m = monitor_of(run, monitor, analysis)
    if m.kind not in ('line', 'point'):
        raise AnalysisError(f"monitor {monitor!r} must be a line or point monitor, got {m.kind!r}")
    return complex(np.mean(m.phasor('hz', frequency_index(m, omega))))


def slab_transmission(
    run: RunResult,
    reference: RunResult,
    monitor: str = "exit",
) -> List[Tuple[float, complex]]:
    """(omega, Hz_slab / Hz_reference) at every frequency of the exit monitor."""
    require_converged(run, "slab_transmission")
    require_converged(reference, "slab_transmission")
    out = []
    for omega in monitor_of(run, monitor, "slab_transmission").frequencies:
        incident = _mean_hz(reference, monitor, float(omega), "slab_transmission")
        if incident == 0:
            raise AnalysisError(f"reference run carries no field at omega={omega:.6e}")
        out.append((float(omega), _mean_hz(run, monitor, float(omega), "slab_transmission") / incident))
    return out


def compare_slab(
    run: RunResult,
    reference: RunResult,
    material: Material,
    thickness: float,
    monitor: str = "exit",
    name: str = "",
) -> SlabComparison:
    """Measured slab transmission against the transfer-matrix model of `material`."""
    samples = []
    for omega, measured in slab_transmission(run, reference, monitor):
        _, t = transfer_matrix_slab(permittivity(material, omega), thickness, omega)
        model = complex(t * np.exp(-1j * omega / C0 * thickness))
        samples.append(SlabSample(omega=omega, measured=measured, model=model))
    comparison = SlabComparison(material=name, thickness=thickness, samples=samples)
    logger.info(
        "Slab %s (%.3e m): max relative error %.3e over %d frequencies",
        name or "?", thickness, comparison.max_error, len(samples),
    )
    return comparison


def line_wavenumber(
    run: RunResult,
    monitor: str,
    spacing: float,
    component: str = 'hz',
    omega: Optional[float] = None,
) -> complex:
    """
    Complex wavenumber of the field along an axis-aligned line monitor in a
    uniform medium: the root with Re K >= 0, which in a passive medium also
    has Im K >= 0. `spacing` should keep Re K * spacing below pi.
    """
    require_converged(run, "line_wavenumber")
    m = monitor_of(run, monitor, "line_wavenumber")
    if m.kind != 'line':
        raise AnalysisError(f"monitor {monitor!r} must be a line monitor, got {m.kind!r}")
    omega = omega if omega is not None else run.omega
    p = np.asarray(m.phasor(component, frequency_index(m, omega)), dtype=complex)
    steps = np.linalg.norm(np.diff(m.positions, axis=0), axis=1)
    if len(steps) == 0 or not np.allclose(steps, run.dx):
        raise AnalysisError("line monitor must run along a grid axis")
    shift = int(round(spacing / run.dx))
    if shift < 1 or 2 * shift >= len(p):
        raise AnalysisError(f"spacing of {shift} cells needs more than {2 * shift} samples, monitor has {len(p)}")
    centre = p[shift:-shift]
    pairs = p[2 * shift:] + p[:-2 * shift]
    cosine = np.vdot(centre, pairs) / (2 * np.vdot(centre, centre))
    return complex(np.arccos(cosine)) / (shift * run.dx)
