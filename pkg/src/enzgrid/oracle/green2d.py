"""
Dyadic Green function of a homogeneous 2D medium (TM, in-plane E).

Solves curl curl G - k^2 G = I delta(r) with e^{-i omega t} time dependence:

    G_ij(R) = i/4 [ (H0(kR) - H1(kR)/(kR)) delta_ij + H2(kR) Rhat_i Rhat_j ]

E(r2) = omega^2 mu0 G(r2, r1) d for a line dipole of moment d per metre;
values are reported in 1/m per metre of out-of-plane length.
"""

import math
from typing import Sequence

import numpy as np
from scipy.special import hankel1

from ..constants import C0
from .exceptions import CoincidentPointsError
from .models import OracleResult


def vacuum_green_2d(
    r1: Sequence[float],
    r2: Sequence[float],
    omega: float,
    eps_background: float = 1.0,
) -> np.ndarray:
    """2x2 complex tensor G(r2, r1, omega)."""
    if omega <= 0:
        raise ValueError(f"omega must be positive, got {omega}")
    dx = float(r2[0]) - float(r1[0])
    dy = float(r2[1]) - float(r1[1])
    dist = math.hypot(dx, dy)
    if dist == 0:
        raise CoincidentPointsError(r1)

    k = omega / C0 * math.sqrt(eps_background)
    x = k * dist
    h0, h1, h2 = hankel1(0, x), hankel1(1, x), hankel1(2, x)
    rhat = np.array([dx / dist, dy / dist])
    return 0.25j * ((h0 - h1 / x) * np.eye(2) + h2 * np.outer(rhat, rhat))


def vacuum_self_green_imag() -> np.ndarray:
    """Im G(r, r) of the 2D vacuum Green function: I/8."""
    return np.eye(2) / 8.0


def green_reference(r1: Sequence[float], r2: Sequence[float], omega: float) -> OracleResult:
    return OracleResult(
        quantity="vacuum_green_2d",
        value=vacuum_green_2d(r1, r2, omega),
        units="1/m",
        validity="homogeneous vacuum, r1 != r2",
    )
