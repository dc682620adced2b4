"""
Green tensors from dipole-driven runs and the emitter couplings they imply.

A run driven by a dipole d u at r1 gives E(r2) = omega^2 mu0 d G(r2, r1) u,
so each run fills one column of G; two runs with independent orientations
fill the tensor.

    Gamma21 = (2 k0^2 / hbar eps0) d2 . Im G . d1
    dw21    = -(k0^2 / hbar eps0) d2 . Re G . d1

Both are reported as is and divided by the 2D free-space rate
Gamma0 = (2 k0^2 / hbar eps0) d_ref^2 Im G_vac(r, r), with Im G_vac(r, r) = 1/8.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..constants import EPS0, HBAR, MU0
from ..fdtd.engine import RunResult
from ..fdtd.monitors import MonitorResult
from ..fdtd.sources import DipoleSource
from ..oracle.green2d import vacuum_self_green_imag
from .exceptions import (
    AnalysisError,
    ConvergenceRequiredError,
    FrequencyMismatchError,
    MissingMonitorError,
)
from .models import CouplingResult, GreensSample

logger = logging.getLogger(__name__)

Vector = Tuple[float, float]

SELF_IMAG = float(vacuum_self_green_imag()[0, 0])


def require_converged(run: RunResult, analysis: str) -> None:
    if not run.converged:
        raise ConvergenceRequiredError(analysis, run.steps)


def monitor_of(run: RunResult, name: str, analysis: str) -> MonitorResult:
    if name not in run.monitors:
        raise MissingMonitorError([name], analysis)
    return run.monitors[name]


def frequency_index(monitor: MonitorResult, omega: float) -> int:
    try:
        return monitor.frequency_index(omega)
    except KeyError:
        raise FrequencyMismatchError(omega, monitor.frequencies.tolist()) from None


def snapped_position(run: RunResult, position: Vector) -> Vector:
    """Center of the cell a source at `position` was placed on."""
    x0, y0 = run.origin
    i = np.floor((position[0] - x0) / run.dx)
    j = np.floor((position[1] - y0) / run.dx)
    return (float(x0 + (i + 0.5) * run.dx), float(y0 + (j + 0.5) * run.dx))


def extract_green(
    runs: Sequence[Tuple[RunResult, DipoleSource]],
    monitor: str = "probe",
    omega: Optional[float] = None,
) -> GreensSample:
    """
    G(r2, r1) from one or more runs sharing the source position r1; r2 is
    the cell center of the point monitor.
    """
    if not runs:
        raise AnalysisError("extract_green needs at least one run")
    first_run, first_source = runs[0]
    omega = omega if omega is not None else first_run.omega
    r1 = snapped_position(first_run, first_source.position)

    columns, orientations = [], []
    r2: Optional[Vector] = None
    for run, source in runs:
        require_converged(run, "extract_green")
        if snapped_position(run, source.position) != r1:
            raise AnalysisError("all runs must drive the same source cell")
        m = monitor_of(run, monitor, "extract_green")
        if m.kind != 'point':
            raise AnalysisError(f"monitor {monitor!r} must be a point monitor, got {m.kind!r}")
        fi = frequency_index(m, omega)
        e = m.e_vector(fi)[0]
        columns.append(e / (omega ** 2 * MU0 * source.moment))
        orientations.append(source.orientation)
        r2 = (float(m.positions[0][0]), float(m.positions[0][1]))

    U = np.asarray(orientations, dtype=float).T
    C = np.asarray(columns, dtype=complex).T
    if len(runs) == 1:
        u = U[:, 0]
        axis = int(np.argmax(np.abs(u)))
        if abs(abs(u[axis]) - 1.0) > 1e-12:
            raise AnalysisError("a single run must use an axis-aligned dipole; add an orthogonal run")
        tensor = np.full((2, 2), np.nan, dtype=complex)
        tensor[:, axis] = C[:, 0] * u[axis]
    else:
        if np.linalg.matrix_rank(U) < 2:
            raise AnalysisError("dipole orientations must span the plane")
        tensor = C @ np.linalg.pinv(U)

    sample = GreensSample(r1=r1, r2=r2, omega=omega, tensor=tensor)
    logger.debug("Extracted G at omega=%.6e from %d run(s)", omega, len(runs))
    return sample


def self_green(structured: GreensSample, vacuum: GreensSample) -> GreensSample:
    """
    Coincident-point G of a structure: the scattered part (structured minus
    vacuum run on the same grid) plus the analytic free-space imaginary part.
    """
    if not np.allclose(structured.r1, structured.r2) or not np.allclose(vacuum.r1, vacuum.r2):
        raise AnalysisError("self_green needs samples taken at the source point")
    if abs(structured.omega - vacuum.omega) > 1e-9 * vacuum.omega:
        raise FrequencyMismatchError(structured.omega, [vacuum.omega])
    scattered = structured.tensor - vacuum.tensor
    tensor = scattered + 1j * vacuum_self_green_imag()
    return GreensSample(structured.r1, structured.r2, structured.omega, tensor, self_term=True)


def purcell_factor(sample: GreensSample, orientation: Vector) -> float:
    """Decay rate relative to free space for a dipole along `orientation`."""
    if not sample.self_term:
        raise AnalysisError("purcell_factor needs a self-term sample (see self_green)")
    u = np.asarray(orientation, dtype=float)
    u = u / np.linalg.norm(u)
    value = float(u @ sample.tensor.imag @ u) / SELF_IMAG
    if not np.isfinite(value):
        raise AnalysisError("Green tensor lacks the column this orientation needs")
    return value


def coupled_decay(
    green: GreensSample,
    d1: Vector,
    d2: Vector,
    omega: Optional[float] = None,
    reference_moment: float = 1.0,
) -> CouplingResult:
    if omega is not None and abs(omega - green.omega) > 1e-9 * green.omega:
        raise FrequencyMismatchError(omega, [green.omega])
    v1 = np.asarray(d1, dtype=float)
    v2 = np.asarray(d2, dtype=float)
    k0 = green.k0
    prefactor = k0 ** 2 / (HBAR * EPS0)
    # 0 * nan stays nan, so only mask the columns the dipole does not touch
    needed = v1 != 0
    G = np.where(needed[None, :], green.tensor, 0.0)
    if not np.all(np.isfinite(G)):
        raise AnalysisError("Green tensor lacks the column this orientation needs")
    projected = v2 @ G @ v1
    gamma21 = 2 * prefactor * float(projected.imag)
    lamb = -prefactor * float(projected.real)
    gamma0 = 2 * prefactor * reference_moment ** 2 * SELF_IMAG
    return CouplingResult(
        gamma21=gamma21,
        lamb_shift=lamb,
        gamma21_normalized=gamma21 / gamma0,
        lamb_shift_normalized=lamb / gamma0,
        d1=(float(v1[0]), float(v1[1])),
        d2=(float(v2[0]), float(v2[1])),
        omega=green.omega,
    )


def coupling_scan(
    samples: Sequence[GreensSample],
    d1: Vector,
    d2: Vector,
    reference_moment: float = 1.0,
) -> List[CouplingResult]:
    """Couplings at each sample's frequency, in ascending frequency."""
    results = [coupled_decay(s, d1, d2, reference_moment=reference_moment) for s in samples]
    return sorted(results, key=lambda r: r.omega)


def coupling_peak(results: Sequence[CouplingResult]) -> CouplingResult:
    if not results:
        raise AnalysisError("empty coupling scan")
    return max(results, key=lambda r: r.gamma21_normalized)
