"""
Normal-incidence transfer matrices for planar stacks.

Amplitudes follow e^{i(n k0 x - omega t)}; r is referenced at the first
interface and t at the last one, so an empty slab of thickness L gives
t = e^{i k0 L}.
"""

from typing import Sequence, Tuple

import numpy as np

from ..constants import C0


def _index(eps: complex) -> complex:
    return complex(np.sqrt(complex(eps)))


def transfer_matrix_slab(eps: complex, thickness: float, omega: float) -> Tuple[complex, complex]:
    """Reflection and transmission of a slab in vacuum."""
    if thickness <= 0:
        raise ValueError(f"thickness must be positive, got {thickness}")
    n = _index(eps)
    r12 = (1 - n) / (1 + n)
    delta = n * omega / C0 * thickness
    phase = np.exp(2j * delta)
    denom = 1 - r12 ** 2 * phase
    r = r12 * (1 - phase) / denom
    t = (1 - r12 ** 2) * np.exp(1j * delta) / denom
    return complex(r), complex(t)


def _interface(n: complex) -> np.ndarray:
    return np.array([[1.0, 1.0], [n, -n]], dtype=complex)


def transfer_matrix_stack(
    layers: Sequence[Tuple[complex, float]],
    omega: float,
    eps_in: complex = 1.0,
    eps_out: complex = 1.0,
) -> Tuple[complex, complex]:
    """
    Reflection and transmission of a multilayer [(eps, thickness), ...]
    between semi-infinite media eps_in and eps_out.
    """
    k0 = omega / C0
    n_in, n_out = _index(eps_in), _index(eps_out)
    m = np.linalg.inv(_interface(n_in))
    for eps, d in layers:
        n = _index(eps)
        delta = n * k0 * d
        prop = np.diag([np.exp(-1j * delta), np.exp(1j * delta)])
        m = m @ _interface(n) @ prop @ np.linalg.inv(_interface(n))
    m = m @ _interface(n_out)
    t = 1.0 / m[0, 0]
    r = m[1, 0] / m[0, 0]
    return complex(r), complex(t)


def slab_flux_balance(eps: complex, thickness: float, omega: float) -> float:
    """|r|^2 + |t|^2 for a slab in vacuum (1 for lossless media)."""
    r, t = transfer_matrix_slab(eps, thickness, omega)
    return abs(r) ** 2 + abs(t) ** 2
