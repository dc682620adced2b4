"""
Data models for dispersive materials.

Sign convention throughout: time dependence e^{-i omega t}, so loss means
Im(eps) > 0.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.interpolate import PchipInterpolator

from ..constants import C0
from .exceptions import ExtrapolationError, TableFormatError

TABLE_HEADER = ("wavelength_m", "eps_re", "eps_im")


@dataclass(frozen=True)
class OscillatorTerm:
    """
    A single Lorentz oscillator: strength / (w0^2 - omega^2 - i gamma omega).

    strength is in rad^2/s^2 (delta_eps * w0^2 for a phonon term).
    """
    strength: float
    resonance_frequency: float
    damping: float

    def __post_init__(self):
        if self.damping < 0:
            raise ValueError(f"Invalid damping: {self.damping}. Must be >= 0")
        if self.resonance_frequency < 0:
            raise ValueError(
                f"Invalid resonance_frequency: {self.resonance_frequency}. Must be >= 0"
            )

    @property
    def delta_eps(self) -> float:
        if self.resonance_frequency == 0:
            return math.inf
        return self.strength / self.resonance_frequency ** 2

    def to_dict(self) -> Dict[str, Any]:
        return {
            'strength': self.strength,
            'w0': self.resonance_frequency,
            'gamma': self.damping,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'OscillatorTerm':
        return cls(
            strength=float(data['strength']),
            resonance_frequency=float(data['w0']),
            damping=float(data['gamma']),
        )


@dataclass(frozen=True)
class DispersionModel:
    """
    Drude + Lorentz description of the complex relative permittivity.

    eps(w) = eps_inf - wp^2 / (w^2 + i g w) + sum_k S_k / (w0_k^2 - w^2 - i g_k w)
    """
    eps_infinity: float = 1.0
    drude_plasma_frequency: float = 0.0
    drude_damping: float = 0.0
    lorentz_terms: Tuple[OscillatorTerm, ...] = ()
    name: str = ""
    validity_range: Optional[Tuple[float, float]] = None  # rad/s

    def __post_init__(self):
        if self.drude_plasma_frequency < 0:
            raise ValueError("drude_plasma_frequency must be >= 0")
        if self.drude_damping < 0:
            raise ValueError("drude_damping must be >= 0")
        if not isinstance(self.lorentz_terms, tuple):
            object.__setattr__(self, 'lorentz_terms', tuple(self.lorentz_terms))
        if self.validity_range is not None:
            lo, hi = self.validity_range
            if not 0 < lo < hi:
                raise ValueError(f"Invalid validity_range: {self.validity_range}")
            object.__setattr__(self, 'validity_range', (float(lo), float(hi)))

    @property
    def has_drude(self) -> bool:
        return self.drude_plasma_frequency > 0

    @property
    def is_dispersive(self) -> bool:
        return self.has_drude or bool(self.lorentz_terms)

    def evaluate(self, omega: Union[float, np.ndarray]) -> Union[complex, np.ndarray]:
        """Vectorised permittivity, no domain checks."""
        w = np.asarray(omega, dtype=float)
        eps = np.full(w.shape, complex(self.eps_infinity), dtype=complex)
        if self.has_drude:
            eps -= self.drude_plasma_frequency ** 2 / (w * w + 1j * self.drude_damping * w)
        for term in self.lorentz_terms:
            eps += term.strength / (
                term.resonance_frequency ** 2 - w * w - 1j * term.damping * w
            )
        if eps.ndim == 0:
            return complex(eps)
        return eps

    def with_name(self, name: str) -> 'DispersionModel':
        return DispersionModel(
            eps_infinity=self.eps_infinity,
            drude_plasma_frequency=self.drude_plasma_frequency,
            drude_damping=self.drude_damping,
            lorentz_terms=self.lorentz_terms,
            name=name,
            validity_range=self.validity_range,
        )

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            'name': self.name,
            'eps_infinity': self.eps_infinity,
            'drude': {'wp': self.drude_plasma_frequency, 'gamma': self.drude_damping},
            'lorentz': [t.to_dict() for t in self.lorentz_terms],
        }
        if self.validity_range is not None:
            data['validity_range'] = list(self.validity_range)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'DispersionModel':
        drude = data.get('drude') or {}
        validity = data.get('validity_range')
        return cls(
            eps_infinity=float(data.get('eps_infinity', 1.0)),
            drude_plasma_frequency=float(drude.get('wp', 0.0)),
            drude_damping=float(drude.get('gamma', 0.0)),
            lorentz_terms=tuple(OscillatorTerm.from_dict(t) for t in data.get('lorentz', [])),
            name=data.get('name', ''),
            validity_range=tuple(validity) if validity else None,
        )


VACUUM = DispersionModel(eps_infinity=1.0, name="vacuum")


@dataclass(frozen=True)
class TabulatedPermittivity:
    """
    Measured permittivity samples, interpolated with monotone cubic splines
    on wavelength. Queries outside the sampled wavelengths are refused.
    """
    wavelengths: Tuple[float, ...]
    eps_real: Tuple[float, ...]
    eps_imag: Tuple[float, ...]
    name: str = ""
    _re: Any = field(default=None, init=False, repr=False, compare=False)
    _im: Any = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.wavelengths)
        if n < 2 or len(self.eps_real) != n or len(self.eps_imag) != n:
            raise ValueError("Table needs >= 2 samples with matching column lengths")
        wl = np.asarray(self.wavelengths, dtype=float)
        if np.any(np.diff(wl) <= 0):
            raise ValueError("Wavelengths must be strictly increasing")
        if wl[0] <= 0:
            raise ValueError("Wavelengths must be positive")
        if np.any(np.asarray(self.eps_imag) < 0):
            raise ValueError("eps_imag must be >= 0 (passive medium)")
        object.__setattr__(self, '_re', PchipInterpolator(wl, self.eps_real, extrapolate=False))
        object.__setattr__(self, '_im', PchipInterpolator(wl, self.eps_imag, extrapolate=False))

    @property
    def wavelength_range(self) -> Tuple[float, float]:
        return self.wavelengths[0], self.wavelengths[-1]

    @property
    def validity_range(self) -> Tuple[float, float]:
        lo, hi = self.wavelength_range
        return 2 * math.pi * C0 / hi, 2 * math.pi * C0 / lo

    def evaluate(self, omega: Union[float, np.ndarray]) -> Union[complex, np.ndarray]:
        w = np.asarray(omega, dtype=float)
        wl = 2 * math.pi * C0 / w
        lo, hi = self.wavelength_range
        # tolerate round-off from the omega <-> wavelength conversion at the edges
        slack = 1e-12 * hi
        bad = (wl < lo - slack) | (wl > hi + slack)
        if np.any(bad):
            raise ExtrapolationError(float(np.atleast_1d(wl)[np.argmax(np.atleast_1d(bad))]),
                                     (lo, hi))
        wl = np.clip(wl, lo, hi)
        eps = self._re(wl) + 1j * np.maximum(self._im(wl), 0.0)
        if eps.ndim == 0:
            return complex(eps)
        return eps

    @classmethod
    def from_samples(cls, samples: Sequence[Tuple[float, float, float]], name: str = "") -> 'TabulatedPermittivity':
        ordered = sorted(samples, key=lambda s: s[0])
        return cls(
            wavelengths=tuple(float(s[0]) for s in ordered),
            eps_real=tuple(float(s[1]) for s in ordered),
            eps_imag=tuple(float(s[2]) for s in ordered),
            name=name,
        )

    @classmethod
    def from_csv(cls, path: Union[str, Path], name: Optional[str] = None) -> 'TabulatedPermittivity':
        """Read a `wavelength_m,eps_re,eps_im` CSV file."""
        path = Path(path)
        try:
            frame = pd.read_csv(path, skip_blank_lines=True, skipinitialspace=True)
        except (OSError, ValueError, pd.errors.ParserError) as e:
            raise TableFormatError(str(path), str(e)) from e
        header = tuple(str(h).strip() for h in frame.columns)
        if header != TABLE_HEADER:
            raise TableFormatError(str(path), f"expected header {','.join(TABLE_HEADER)}")
        try:
            values = frame.apply(pd.to_numeric, errors='raise').to_numpy(dtype=float)
        except (TypeError, ValueError) as e:
            raise TableFormatError(str(path), f"non-numeric entry: {e}") from e
        if np.isnan(values).any():
            raise TableFormatError(str(path), "missing values")
        try:
            if np.any(np.diff(values[:, 0]) <= 0):
                raise ValueError("wavelengths must be strictly increasing")
            return cls.from_samples([tuple(row) for row in values], name=name or path.stem)
        except ValueError as e:
            raise TableFormatError(str(path), str(e)) from e


Material = Union[DispersionModel, TabulatedPermittivity]


@dataclass
class CoherenceReport:
    """
    Coherence numbers of a material at (or near) its ENZ point.

    coherence_length is always phase_velocity * coherence_time.
    """
    material: str
    omega: float
    eps: complex
    refractive_index: complex
    loss_fwhm: float
    coherence_time: float
    phase_velocity: float
    enz_omega: Optional[float] = None
    eps_at_enz: Optional[complex] = None
    at_crossing: bool = True
    coherence_length: float = field(init=False)

    def __post_init__(self):
        if not self.coherence_time > 0:
            raise ValueError(f"Invalid coherence_time: {self.coherence_time}. Must be > 0")
        if not self.phase_velocity > 0:
            raise ValueError(f"Invalid phase_velocity: {self.phase_velocity}. Must be > 0")
        self.coherence_length = self.phase_velocity * self.coherence_time

    @property
    def enz_wavelength(self) -> Optional[float]:
        if self.enz_omega is None:
            return None
        return 2 * math.pi * C0 / self.enz_omega

    @property
    def wavelength(self) -> float:
        return 2 * math.pi * C0 / self.omega

    def to_dict(self) -> Dict[str, Any]:
        def cplx(z: Optional[complex]) -> Optional[List[float]]:
            return None if z is None else [z.real, z.imag]

        return {
            'material': self.material,
            'omega_rad_s': self.omega,
            'wavelength_m': self.wavelength,
            'eps': cplx(self.eps),
            'enz_omega_rad_s': self.enz_omega,
            'enz_wavelength_m': self.enz_wavelength,
            'eps_at_enz': cplx(self.eps_at_enz),
            'at_crossing': self.at_crossing,
            'refractive_index': cplx(self.refractive_index),
            'loss_fwhm_rad_s': self.loss_fwhm,
            'coherence_time_s': self.coherence_time,
            'phase_velocity_m_s': self.phase_velocity,
            'coherence_length_m': self.coherence_length,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'CoherenceReport':
        def cplx(v: Optional[List[float]]) -> Optional[complex]:
            return None if v is None else complex(v[0], v[1])

        return cls(
            material=data['material'],
            omega=data['omega_rad_s'],
            eps=cplx(data['eps']),
            refractive_index=cplx(data['refractive_index']),
            loss_fwhm=data['loss_fwhm_rad_s'],
            coherence_time=data['coherence_time_s'],
            phase_velocity=data['phase_velocity_m_s'],
            enz_omega=data.get('enz_omega_rad_s'),
            eps_at_enz=cplx(data.get('eps_at_enz')),
            at_crossing=data.get('at_crossing', True),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def __str__(self) -> str:
        lines = [f"Material:           {self.material}"]
        if self.enz_wavelength is not None:
            lines.append(f"ENZ wavelength:     {self.enz_wavelength * 1e9:.2f} nm")
            lines.append(f"eps at ENZ:         {self.eps_at_enz.real:+.4e} {self.eps_at_enz.imag:+.4e}i")
        if not self.at_crossing:
            lines.append(f"Evaluated at:       {self.wavelength * 1e9:.2f} nm (not at crossing)")
            lines.append(f"eps there:          {self.eps.real:+.4e} {self.eps.imag:+.4e}i")
        lines += [
            f"Refractive index:   {self.refractive_index.real:.4f} {self.refractive_index.imag:+.4f}i",
            f"Loss FWHM:          {self.loss_fwhm:.4e} rad/s",
            f"Coherence time:     {self.coherence_time:.4e} s",
            f"Phase velocity:     {self.phase_velocity:.4e} m/s",
            f"Coherence length:   {self.coherence_length:.4e} m",
        ]
        return "\n".join(lines)
