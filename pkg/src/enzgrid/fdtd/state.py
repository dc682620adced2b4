"""
Field state of a run and its discrete electromagnetic energy.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..constants import EPS0, MU0
from .layout import YeeLayout
from .media import EdgeMedia


@dataclass
class OscillatorState:
    """Polarization P^n, P^{n-1} and current J^{n-1/2} on one species' edges."""
    p: np.ndarray
    p_prev: np.ndarray
    j: np.ndarray


@dataclass
class FieldState:
    ex: np.ndarray
    ey: np.ndarray
    hz: np.ndarray
    oscillators: List[OscillatorState] = field(default_factory=list)
    hz_prev: Optional[np.ndarray] = None
    step: int = 0
    energy: float = 0.0

    @classmethod
    def zeros(cls, layout: YeeLayout, media: Optional[EdgeMedia] = None,
              track_energy: bool = False) -> 'FieldState':
        nx, ny = layout.nx, layout.ny
        oscillators = []
        if media is not None:
            for sp in media.species:
                oscillators.append(OscillatorState(
                    p=np.zeros(sp.size), p_prev=np.zeros(sp.size), j=np.zeros(sp.size),
                ))
        return cls(
            ex=np.zeros((nx, ny + 1)),
            ey=np.zeros((nx + 1, ny)),
            hz=np.zeros((nx, ny)),
            oscillators=oscillators,
            hz_prev=np.zeros((nx, ny)) if track_energy else None,
        )

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.hz.sum()) and np.isfinite(self.ex.sum()) and np.isfinite(self.ey.sum()))

    def ex_centered(self) -> np.ndarray:
        """Ex averaged onto cell centers."""
        return 0.5 * (self.ex[:, :-1] + self.ex[:, 1:])

    def ey_centered(self) -> np.ndarray:
        return 0.5 * (self.ey[:-1, :] + self.ey[1:, :])


def field_energy(state: FieldState, layout: YeeLayout, media: EdgeMedia) -> float:
    """
    Discrete field energy per unit length at integer step n:

        dx^2 [ eps0/2 sum eps_inf E^n.E^n + mu0/2 sum Hz^{n-1/2} Hz^{n+1/2} ]

    Exactly conserved by the lossless Yee update when evaluated between the
    H and E half-steps (E at n, hz_prev at n-1/2, hz at n+1/2). Without a
    tracked hz_prev the magnetic term uses hz alone.
    """
    e_term = 0.5 * EPS0 * (
        np.sum(np.where(media.pec_x, 0.0, media.eps_inf_x * state.ex ** 2))
        + np.sum(np.where(media.pec_y, 0.0, media.eps_inf_y * state.ey ** 2))
    )
    h_prev = state.hz_prev if state.hz_prev is not None else state.hz
    h_term = 0.5 * MU0 * np.sum(h_prev * state.hz)
    return float((e_term + h_term) * layout.dx ** 2)
