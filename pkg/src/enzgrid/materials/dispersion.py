"""
Permittivity evaluation, ENZ crossings, loss function and Kramers-Kronig checks.
"""

import logging
import math
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate, optimize

from .exceptions import DomainError, SingularPointError
from .models import DispersionModel, Material, OscillatorTerm

logger = logging.getLogger(__name__)

CROSSING_RTOL = 1e-10
CROSSING_SAMPLES = 4001


def drude(eps_infinity: float, wp: float, gamma: float, name: str = "") -> DispersionModel:
    return DispersionModel(
        eps_infinity=eps_infinity,
        drude_plasma_frequency=wp,
        drude_damping=gamma,
        name=name,
    )


def lorentz(
    eps_infinity: float,
    terms: Iterable[Tuple[float, float, float]],
    name: str = "",
) -> DispersionModel:
    """Lorentz model from (strength, w0, gamma) triples."""
    return DispersionModel(
        eps_infinity=eps_infinity,
        lorentz_terms=tuple(OscillatorTerm(s, w0, g) for s, w0, g in terms),
        name=name,
    )


def enz_drude(
    omega0: float,
    eps_target: complex,
    eps_infinity: float = 1.0,
    name: str = "",
) -> DispersionModel:
    """
    Drude model whose permittivity at omega0 equals eps_target.

    Used for near-zero media: a causal model that takes the requested small
    complex value at the working frequency instead of a constant.
    """
    if omega0 <= 0:
        raise DomainError(omega0)
    eps_target = complex(eps_target)
    drop = eps_infinity - eps_target.real
    if drop <= 0 or eps_target.imag < 0:
        raise ValueError(
            f"eps_target={eps_target} is not reachable by a passive Drude model "
            f"with eps_infinity={eps_infinity}"
        )
    gamma = omega0 * eps_target.imag / drop
    wp = math.sqrt(drop * (omega0 ** 2 + gamma ** 2))
    return drude(eps_infinity, wp, gamma, name=name)


def _check_omega(omega: float) -> None:
    if not omega > 0:
        raise DomainError(omega)


def permittivity(material: Material, omega: float) -> complex:
    """Complex relative permittivity at a single angular frequency."""
    _check_omega(omega)
    return complex(material.evaluate(omega))


def refractive_index(eps: complex) -> complex:
    """Principal square root of eps (Re n >= 0)."""
    return complex(np.sqrt(complex(eps)))


def loss_function(material: Material, omega: float) -> float:
    """Im(-1/eps) = Im eps / |eps|^2."""
    eps = permittivity(material, omega)
    if eps == 0:
        raise SingularPointError(omega)
    return eps.imag / abs(eps) ** 2


def loss_function_scan(material: Material, omegas: Sequence[float]) -> np.ndarray:
    w = np.asarray(omegas, dtype=float)
    if np.any(w <= 0):
        raise DomainError(float(w[w <= 0][0]))
    eps = np.asarray(material.evaluate(w), dtype=complex)
    mag2 = np.abs(eps) ** 2
    with np.errstate(divide='ignore', invalid='ignore'):
        return np.where(mag2 > 0, eps.imag / mag2, np.inf)


def enz_crossing(
    material: Material,
    omega_range: Optional[Tuple[float, float]] = None,
    samples: int = CROSSING_SAMPLES,
) -> List[float]:
    """
    All frequencies in range where Re eps changes sign, refined by bisection
    to relative tolerance 1e-10. An empty list means no crossing.
    """
    if omega_range is None:
        omega_range = default_search_range(material)
    lo, hi = omega_range
    if not (lo > 0 and hi > lo):
        raise ValueError(f"Invalid omega_range: {omega_range}")

    grid = np.geomspace(lo, hi, samples)
    re = np.real(material.evaluate(grid))
    signs = np.sign(re)

    def re_eps(w: float) -> float:
        return float(np.real(material.evaluate(w)))

    crossings: List[float] = []
    for i in range(len(grid)):
        if signs[i] == 0:
            crossings.append(float(grid[i]))
        elif i + 1 < len(grid) and signs[i] * signs[i + 1] < 0:
            root = optimize.bisect(
                re_eps, grid[i], grid[i + 1],
                xtol=CROSSING_RTOL * grid[i] * 1e-2, rtol=CROSSING_RTOL,
            )
            crossings.append(float(root))

    logger.debug("Found %d ENZ crossing(s) for '%s'", len(crossings), getattr(material, 'name', ''))
    return crossings


def select_enz_point(material: Material, crossings: Sequence[float]) -> Optional[float]:
    """The crossing with the smallest Im eps (the usable ENZ point)."""
    if not crossings:
        return None
    return min(crossings, key=lambda w: complex(material.evaluate(w)).imag)


def default_search_range(material: Material) -> Tuple[float, float]:
    """Validity range if known, else a wide band around the model's own frequencies."""
    validity = getattr(material, 'validity_range', None)
    if validity is not None:
        return validity
    scales: List[float] = []
    if isinstance(material, DispersionModel):
        if material.has_drude:
            scales.append(material.drude_plasma_frequency / math.sqrt(max(material.eps_infinity, 1e-12)))
        scales.extend(t.resonance_frequency for t in material.lorentz_terms if t.resonance_frequency > 0)
    if not scales:
        raise ValueError(f"Cannot infer a search range for '{getattr(material, 'name', '')}'")
    return min(scales) * 1e-2, max(scales) * 1e2


def kramers_kronig_real(
    material: Material,
    omegas: Union[float, Sequence[float]],
    omega_max: float,
    eps_infinity: float = 1.0,
    omega_min: Optional[float] = None,
) -> np.ndarray:
    """
    Re eps reconstructed from Im eps by a truncated principal-value transform:

        Re eps(w) = eps_inf + 2/pi P int w' Im eps(w') / (w'^2 - w^2) dw'
    """
    w = np.atleast_1d(np.asarray(omegas, dtype=float))
    lower = omega_min if omega_min is not None else omega_max * 1e-9
    out = np.empty(w.shape)
    for k, wk in enumerate(w):
        if not lower < wk < omega_max:
            raise ValueError(f"omega {wk} outside the integration grid ({lower}, {omega_max})")

        def f(x: float, wk: float = wk) -> float:
            return x * float(np.imag(material.evaluate(x))) / (x + wk)

        value, _ = integrate.quad(f, lower, omega_max, weight='cauchy', wvar=wk, limit=400)
        out[k] = eps_infinity + 2.0 / math.pi * value
    return out
