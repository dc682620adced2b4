"""
Closed-form limits used to validate numeric scans.
"""

from .exceptions import OracleError


def drude_fwhm_limit(wp: float, gamma: float, eps_infinity: float = 1.0) -> float:
    """
    Leading-order FWHM of Im(-1/eps) for a Drude metal: gamma.

    Only meaningful for weak damping (gamma < wp / 10).
    """
    if wp <= 0 or gamma < 0 or eps_infinity <= 0:
        raise OracleError(f"invalid Drude parameters wp={wp}, gamma={gamma}, eps_inf={eps_infinity}")
    if not gamma < wp / 10:
        raise OracleError(f"drude_fwhm_limit needs gamma < wp/10, got gamma/wp={gamma / wp:.3g}")
    return gamma
