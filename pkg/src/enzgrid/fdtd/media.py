"""
Per-edge material coefficients built from a SceneRaster.

Each E edge takes the mean eps_inf of its two neighbouring cells and half
of each dispersive neighbour's oscillators. An edge touching PEC is PEC.
Drude terms are oscillators with w0 = 0 and strength wp^2.

ADE per oscillator (central differences at step n):

    (P+ - 2P + P-)/dt^2 + g (P+ - P-)/(2 dt) + w0^2 P = eps0 S w E^n
    J^{n+1/2} = (P+ - P) / dt
"""

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from ..constants import EPS0
from ..geometry.raster import SceneRaster
from .layout import YeeLayout

logger = logging.getLogger(__name__)


@dataclass
class OscillatorSpecies:
    """One oscillator of one material, restricted to the edges it touches."""
    component: str  # 'x' or 'y'
    material: str
    index: np.ndarray  # flat indices into the Ex or Ey array
    weight: np.ndarray
    a: float
    b: float
    c: float

    @property
    def size(self) -> int:
        return len(self.index)


@dataclass
class EdgeMedia:
    """Update coefficients dt/(eps0 eps_inf) per edge, zero where not updated."""
    ce_x: np.ndarray
    ce_y: np.ndarray
    eps_inf_x: np.ndarray
    eps_inf_y: np.ndarray
    pec_x: np.ndarray
    pec_y: np.ndarray
    species: List[OscillatorSpecies]

    @property
    def dispersive(self) -> bool:
        return bool(self.species)


def _ade_coefficients(strength: float, w0: float, gamma: float, dt: float) -> Tuple[float, float, float]:
    denom = 1.0 + gamma * dt / 2.0
    a = (2.0 - (w0 * dt) ** 2) / denom
    b = (1.0 - gamma * dt / 2.0) / denom
    c = EPS0 * strength * dt ** 2 / denom
    return a, b, c


def _oscillators(model) -> List[Tuple[float, float, float]]:
    terms = []
    if model.has_drude:
        terms.append((model.drude_plasma_frequency ** 2, 0.0, model.drude_damping))
    for term in model.lorentz_terms:
        terms.append((term.strength, term.resonance_frequency, term.damping))
    return terms


def build_media(raster: SceneRaster, layout: YeeLayout) -> EdgeMedia:
    nx, ny = raster.nx, raster.ny
    if (nx, ny) != (layout.nx, layout.ny):
        raise ValueError(f"raster {nx}x{ny} does not match layout {layout.nx}x{layout.ny}")

    eps_cell = np.ones((nx, ny))
    for k, entry in enumerate(raster.table):
        if not entry.is_pec:
            eps_cell[raster.ids == k] = entry.model.eps_infinity
    pec_cell = raster.pec_mask()

    eps_x = np.ones((nx, ny + 1))
    eps_y = np.ones((nx + 1, ny))
    eps_x[:, 1:-1] = 0.5 * (eps_cell[:, :-1] + eps_cell[:, 1:])
    eps_y[1:-1, :] = 0.5 * (eps_cell[:-1, :] + eps_cell[1:, :])

    pec_x = np.ones((nx, ny + 1), dtype=bool)
    pec_y = np.ones((nx + 1, ny), dtype=bool)
    pec_x[:, 1:-1] = pec_cell[:, :-1] | pec_cell[:, 1:]
    pec_y[1:-1, :] = pec_cell[:-1, :] | pec_cell[1:, :]

    ce_x = np.where(pec_x, 0.0, layout.dt / (EPS0 * eps_x))
    ce_y = np.where(pec_y, 0.0, layout.dt / (EPS0 * eps_y))

    species: List[OscillatorSpecies] = []
    for k, entry in enumerate(raster.table):
        if entry.is_pec or not entry.model.is_dispersive:
            continue
        occupied = (raster.ids == k).astype(float)
        w_x = np.zeros((nx, ny + 1))
        w_y = np.zeros((nx + 1, ny))
        w_x[:, 1:-1] = 0.5 * (occupied[:, :-1] + occupied[:, 1:])
        w_y[1:-1, :] = 0.5 * (occupied[:-1, :] + occupied[1:, :])
        w_x[pec_x] = 0.0
        w_y[pec_y] = 0.0
        for strength, w0, gamma in _oscillators(entry.model):
            a, b, c = _ade_coefficients(strength, w0, gamma, layout.dt)
            for component, weights in (('x', w_x), ('y', w_y)):
                index = np.flatnonzero(weights)
                if len(index) == 0:
                    continue
                species.append(OscillatorSpecies(
                    component=component,
                    material=entry.name,
                    index=index,
                    weight=weights.ravel()[index],
                    a=a, b=b, c=c,
                ))

    logger.debug(
        "Edge media: %d PEC Ex edges, %d PEC Ey edges, %d oscillator species",
        int(pec_x.sum()), int(pec_y.sum()), len(species),
    )
    return EdgeMedia(
        ce_x=ce_x, ce_y=ce_y, eps_inf_x=eps_x, eps_inf_y=eps_y,
        pec_x=pec_x, pec_y=pec_y, species=species,
    )
