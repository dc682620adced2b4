"""
Least-squares fit of ENZ presets to published targets.

A preset is pinned by three numbers: the ENZ wavelength (Re eps = 0 there),
Im eps at that wavelength and the coherence time. Three free parameters are
fitted in log space starting from literature values.
"""

import logging
from typing import Callable, List, Sequence

import numpy as np
from scipy import optimize

from ..config import omega_of
from .coherence import coherence_time
from .exceptions import MaterialError
from .models import DispersionModel, OscillatorTerm

logger = logging.getLogger(__name__)

FIT_FORMS = ("lorentz", "drude")


def _builder(form: str, start: DispersionModel) -> "tuple[np.ndarray, Callable[[np.ndarray], DispersionModel]]":
    if form == "lorentz":
        if len(start.lorentz_terms) != 1 or start.has_drude:
            raise ValueError("lorentz fit needs a start model with exactly one oscillator and no Drude term")
        term = start.lorentz_terms[0]
        x0 = np.log([term.strength, term.resonance_frequency, term.damping])

        def build(x: np.ndarray) -> DispersionModel:
            s, w0, g = np.exp(x)
            return DispersionModel(
                eps_infinity=start.eps_infinity,
                lorentz_terms=(OscillatorTerm(float(s), float(w0), float(g)),),
                name=start.name,
                validity_range=start.validity_range,
            )
        return x0, build

    if form == "drude":
        if not start.has_drude or start.lorentz_terms:
            raise ValueError("drude fit needs a pure Drude start model")
        x0 = np.log([start.eps_infinity, start.drude_plasma_frequency, start.drude_damping])

        def build(x: np.ndarray) -> DispersionModel:
            eps_inf, wp, g = np.exp(x)
            return DispersionModel(
                eps_infinity=float(eps_inf),
                drude_plasma_frequency=float(wp),
                drude_damping=float(g),
                name=start.name,
                validity_range=start.validity_range,
            )
        return x0, build

    raise ValueError(f"Unknown fit form '{form}', expected one of {FIT_FORMS}")


def fit_enz_preset(
    form: str,
    target_wavelength: float,
    target_eps_imag: float,
    target_coherence_time: float,
    start: DispersionModel,
) -> DispersionModel:
    """
    Fit `start` so that Re eps(target) = 0, Im eps(target) = target_eps_imag
    and the loss-function coherence time equals target_coherence_time.
    """
    if target_wavelength <= 0 or target_eps_imag <= 0 or target_coherence_time <= 0:
        raise ValueError("fit targets must be positive")
    omega_t = omega_of(target_wavelength)
    x0, build = _builder(form, start)

    def residuals(x: np.ndarray) -> List[float]:
        model = build(x)
        eps = complex(model.evaluate(omega_t))
        try:
            tau = coherence_time(model, omega_t)
        except MaterialError:
            tau = 0.0
        return [
            eps.real / target_eps_imag,
            eps.imag / target_eps_imag - 1.0,
            tau / target_coherence_time - 1.0,
        ]

    result = optimize.least_squares(residuals, x0, diff_step=1e-6, xtol=1e-12, ftol=1e-12)
    fitted = build(result.x)
    logger.info(
        "Fitted %s preset '%s' (cost %.3e, %d evaluations)",
        form, start.name, result.cost, result.nfev,
    )
    return fitted


def fit_residuals(
    model: DispersionModel,
    target_wavelength: float,
    target_eps_imag: float,
    target_coherence_time: float,
) -> Sequence[float]:
    """Relative deviations of a model from its fit targets."""
    omega_t = omega_of(target_wavelength)
    eps = complex(model.evaluate(omega_t))
    tau = coherence_time(model, omega_t)
    return (
        eps.real / target_eps_imag,
        eps.imag / target_eps_imag - 1.0,
        tau / target_coherence_time - 1.0,
    )
