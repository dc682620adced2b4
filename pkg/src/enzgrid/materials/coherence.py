"""
Coherence time and coherence length from the loss function.

tau_c is 1 / (FWHM of Im(-1/eps)) around the ENZ crossing; the coherence
length is the phase velocity c / Re(n) times tau_c.
"""

import logging
from typing import Optional, Tuple

import numpy as np
from scipy import optimize

from ..constants import C0
from .dispersion import (
    default_search_range,
    enz_crossing,
    loss_function_scan,
    permittivity,
    refractive_index,
    select_enz_point,
)
from .exceptions import InconclusiveFWHMError, InfinitePhaseVelocityError, NoCrossingError
from .models import CoherenceReport, Material, TabulatedPermittivity

logger = logging.getLogger(__name__)

FWHM_RTOL = 1e-8
SCAN_SAMPLES = 8001
DEFAULT_WINDOW = 0.5
AT_CROSSING_RTOL = 1e-6


def _scan_window(material: Material, near: float, window: float) -> Tuple[float, float]:
    lo, hi = near * (1.0 - window), near * (1.0 + window)
    # tables cannot be evaluated outside their samples
    if isinstance(material, TabulatedPermittivity):
        validity = material.validity_range
        lo, hi = max(lo, validity[0]), min(hi, validity[1])
    return lo, hi


def loss_peak(material: Material, near: float, window: float = DEFAULT_WINDOW) -> Tuple[float, float]:
    """
    Locate the loss-function maximum next to `near`.

    A dense scan brackets the peak, golden-section search refines it.
    Returns (omega_peak, peak_value).
    """
    lo, hi = _scan_window(material, near, window)
    grid = np.linspace(lo, hi, SCAN_SAMPLES)
    values = loss_function_scan(material, grid)
    k = int(np.argmax(values))
    if k == 0 or k == len(grid) - 1:
        raise InconclusiveFWHMError(near, (lo, hi), "peak at scan boundary")

    def neg_loss(w: float) -> float:
        return -float(loss_function_scan(material, [w])[0])

    result = optimize.minimize_scalar(
        neg_loss,
        bracket=(grid[k - 1], grid[k], grid[k + 1]),
        method='golden',
        options={'xtol': FWHM_RTOL},
    )
    omega_peak = float(result.x)
    return omega_peak, -float(result.fun)


def loss_fwhm(material: Material, near: float, window: float = DEFAULT_WINDOW) -> Tuple[float, float, float]:
    """
    Half-maximum points of the loss peak next to `near`.

    Returns (omega_left, omega_right, omega_peak).
    """
    lo, hi = _scan_window(material, near, window)
    omega_peak, peak = loss_peak(material, near, window)
    half = 0.5 * peak

    def excess(w: float) -> float:
        return float(loss_function_scan(material, [w])[0]) - half

    grid = np.linspace(lo, hi, SCAN_SAMPLES)
    values = loss_function_scan(material, grid)
    below = values < half
    left_idx = np.nonzero(below & (grid < omega_peak))[0]
    right_idx = np.nonzero(below & (grid > omega_peak))[0]
    if len(left_idx) == 0 or len(right_idx) == 0:
        raise InconclusiveFWHMError(near, (lo, hi), "half maximum not reached inside window")

    # nearest sub-half samples on each side bracket the crossing with the peak
    a = float(grid[left_idx[-1]])
    b = float(grid[right_idx[0]])
    left = optimize.bisect(excess, a, omega_peak, rtol=FWHM_RTOL, xtol=FWHM_RTOL * a * 1e-2)
    right = optimize.bisect(excess, omega_peak, b, rtol=FWHM_RTOL, xtol=FWHM_RTOL * b * 1e-2)
    return float(left), float(right), omega_peak


def coherence_time(material: Material, near_crossing: float, window: float = DEFAULT_WINDOW) -> float:
    """tau_c = 1 / FWHM of the loss-function peak next to the given crossing."""
    left, right, _ = loss_fwhm(material, near_crossing, window)
    fwhm = right - left
    logger.debug("Loss FWHM near %.6e rad/s: %.6e rad/s", near_crossing, fwhm)
    return 1.0 / fwhm


def coherence_length(
    material: Material,
    at: Optional[float] = None,
    tau_c: Optional[float] = None,
    omega_range: Optional[Tuple[float, float]] = None,
) -> CoherenceReport:
    """
    Build a CoherenceReport.

    Without `at` the report is evaluated at the ENZ point (the crossing with
    the smallest Im eps). An explicit `tau_c` skips the loss-function search.
    """
    name = getattr(material, 'name', '') or 'material'
    enz_omega: Optional[float] = None
    try:
        search = omega_range or default_search_range(material)
    except ValueError:
        search = None
    if search is not None:
        enz_omega = select_enz_point(material, enz_crossing(material, search))

    omega = at if at is not None else enz_omega
    if omega is None:
        raise NoCrossingError(name, search)

    eps = permittivity(material, omega)
    n = refractive_index(eps)
    if n.real == 0:
        raise InfinitePhaseVelocityError(omega, eps)

    if tau_c is None:
        tau_c = coherence_time(material, enz_omega if enz_omega is not None else omega)

    at_crossing = enz_omega is not None and abs(omega - enz_omega) <= AT_CROSSING_RTOL * enz_omega
    report = CoherenceReport(
        material=name,
        omega=omega,
        eps=eps,
        refractive_index=n,
        loss_fwhm=1.0 / tau_c,
        coherence_time=tau_c,
        phase_velocity=C0 / n.real,
        enz_omega=enz_omega,
        eps_at_enz=permittivity(material, enz_omega) if enz_omega is not None else None,
        at_crossing=at_crossing,
    )
    logger.info(
        "Coherence report for %s: tau_c=%.4e s, L_c=%.4e m", name,
        report.coherence_time, report.coherence_length,
    )
    return report
