"""
Data models for the quantities derived from run results.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..constants import C0

Point = Tuple[float, float]


def _complex_dict(value: complex) -> Dict[str, float]:
    return {'re': float(np.real(value)), 'im': float(np.imag(value))}


@dataclass
class GreensSample:
    """
    G(r2, r1, omega) in the 2D convention E = omega^2 mu0 G d (1/m).
    Columns not probed by any run are NaN.
    """
    r1: Point
    r2: Point
    omega: float
    tensor: np.ndarray
    self_term: bool = False

    def __post_init__(self):
        self.tensor = np.asarray(self.tensor, dtype=complex)
        if self.tensor.shape != (2, 2):
            raise ValueError(f"Green tensor must be 2x2, got shape {self.tensor.shape}")
        if self.omega <= 0:
            raise ValueError("omega must be positive")

    @property
    def k0(self) -> float:
        return self.omega / C0

    @property
    def complete(self) -> bool:
        return bool(np.all(np.isfinite(self.tensor)))

    def component(self, name: str) -> complex:
        """'xx', 'xy', 'yx' or 'yy'."""
        axes = {'x': 0, 'y': 1}
        return complex(self.tensor[axes[name[0]], axes[name[1]]])

    def transposed(self) -> 'GreensSample':
        return GreensSample(self.r2, self.r1, self.omega, self.tensor.T.copy(), self.self_term)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'r1': list(self.r1),
            'r2': list(self.r2),
            'omega': self.omega,
            'k0': self.k0,
            'self_term': self.self_term,
            'G': {name: _complex_dict(self.component(name)) for name in ('xx', 'xy', 'yx', 'yy')},
        }


@dataclass
class CouplingResult:
    gamma21: float
    lamb_shift: float
    gamma21_normalized: float
    lamb_shift_normalized: float
    d1: Tuple[float, float]
    d2: Tuple[float, float]
    omega: float

    def __post_init__(self):
        values = (self.gamma21, self.lamb_shift, self.gamma21_normalized, self.lamb_shift_normalized)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("coupling values must be finite")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'omega': self.omega,
            'gamma21': self.gamma21,
            'lamb_shift': self.lamb_shift,
            'gamma21_norm': self.gamma21_normalized,
            'lamb_norm': self.lamb_shift_normalized,
            'd1': list(self.d1),
            'd2': list(self.d2),
        }


@dataclass(frozen=True)
class DecayEntry:
    index: int
    distance: float
    value: float


@dataclass
class DecayCurve:
    """|E| per cavity normalized to the source cavity, sorted by distance."""
    entries: List[DecayEntry]
    source_index: int
    omega: float

    def values(self) -> Dict[int, float]:
        return {e.index: e.value for e in self.entries}

    def farthest(self) -> DecayEntry:
        return self.entries[-1]

    def ratio_to(self, other: 'DecayCurve') -> Dict[int, float]:
        """Per-cavity ratio self / other."""
        theirs = other.values()
        return {e.index: e.value / theirs[e.index] for e in self.entries if theirs.get(e.index)}

    def rows(self) -> List[Tuple[float, float]]:
        return [(e.distance, e.value) for e in self.entries]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'omega': self.omega,
            'source_index': self.source_index,
            'entries': [{'index': e.index, 'distance_m': e.distance, 'normalized_E': e.value}
                        for e in self.entries],
        }


@dataclass
class PhaseMap:
    """arg Hz per cavity, keyed by (row, col), and their circular spread."""
    phases: Dict[Tuple[int, int], float]
    spread: float
    omega: float
    excluded: List[Tuple[int, int]] = field(default_factory=list)

    def rows(self) -> List[Tuple[int, int, float]]:
        return [(i, j, phase) for (i, j), phase in sorted(self.phases.items())]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'omega': self.omega,
            'spread_rad': self.spread,
            'excluded': [list(k) for k in self.excluded],
            'phases': [{'cavity_i': i, 'cavity_j': j, 'phase_rad': p} for i, j, p in self.rows()],
        }


@dataclass(frozen=True)
class TimeBinQubit:
    """alpha |early> + beta e^{i phase} |late>."""
    alpha: complex
    beta: complex
    phase: float = 0.0
    separation: float = 0.0

    def __post_init__(self):
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"|alpha|^2 + |beta|^2 must be 1, got {norm}")
        if self.separation < 0:
            raise ValueError("pulse separation must be >= 0")

    @classmethod
    def from_angles(cls, theta: float, phase: float, separation: float = 0.0) -> 'TimeBinQubit':
        return cls(complex(math.cos(theta / 2)), complex(math.sin(theta / 2)), phase, separation)

    def state_vector(self) -> np.ndarray:
        return np.array([self.alpha, self.beta * np.exp(1j * self.phase)])

    def to_dict(self) -> Dict[str, Any]:
        return {
            'alpha': _complex_dict(self.alpha),
            'beta': _complex_dict(self.beta),
            'phase': self.phase,
            'separation': self.separation,
        }


@dataclass(frozen=True)
class SupercouplingQuery:
    a1: float
    a2: float
    channel_area: float
    k0: float
    mu_rp: float = 1.0

    def __post_init__(self):
        if self.a1 <= 0 or self.a2 <= 0:
            raise ValueError("guide widths must be positive")
        if self.channel_area < 0:
            raise ValueError("channel area must be >= 0")
        if self.k0 <= 0:
            raise ValueError("k0 must be positive")


@dataclass(frozen=True)
class TransportVerdict:
    feasible: bool
    margin: float
    path_length: float
    coherence_length: float
    qubit: Optional[TimeBinQubit] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'feasible': self.feasible,
            'margin_m': self.margin,
            'path_length_m': self.path_length,
            'coherence_length_m': self.coherence_length,
            'qubit': self.qubit.to_dict() if self.qubit else None,
        }


@dataclass(frozen=True)
class SlabSample:
    """Measured and model transmission of a slab at one frequency."""
    omega: float
    measured: complex
    model: complex

    @property
    def error(self) -> float:
        return abs(self.measured - self.model) / abs(self.model)


@dataclass
class SlabComparison:
    """
    Slab-over-vacuum transmission per frequency against the transfer-matrix
    value t exp(-i k0 d).
    """
    material: str
    thickness: float
    samples: List[SlabSample]

    @property
    def max_error(self) -> float:
        return max(s.error for s in self.samples)

    def rows(self) -> List[Tuple[float, float, float, float, float, float]]:
        return [
            (s.omega, s.measured.real, s.measured.imag, s.model.real, s.model.imag, s.error)
            for s in self.samples
        ]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'material': self.material,
            'thickness_m': self.thickness,
            'max_relative_error': self.max_error,
            'samples': [
                {'omega': s.omega, 'measured': _complex_dict(s.measured),
                 'model': _complex_dict(s.model), 'relative_error': s.error}
                for s in self.samples
            ],
        }
