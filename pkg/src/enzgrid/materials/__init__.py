"""
Dispersive material models, ENZ crossings and coherence numbers.
"""

from .models import (
    VACUUM,
    CoherenceReport,
    DispersionModel,
    Material,
    OscillatorTerm,
    TabulatedPermittivity,
)
from .dispersion import (
    drude,
    enz_crossing,
    enz_drude,
    kramers_kronig_real,
    lorentz,
    loss_function,
    loss_function_scan,
    permittivity,
    refractive_index,
    select_enz_point,
)
from .coherence import coherence_length, coherence_time, loss_fwhm, loss_peak
from .presets import MaterialPreset, list_presets, load_preset, resolve_material
from .fitting import fit_enz_preset, fit_residuals
from .exceptions import (
    DomainError,
    ExtrapolationError,
    InconclusiveFWHMError,
    InfinitePhaseVelocityError,
    MaterialError,
    NoCrossingError,
    PresetNotFoundError,
    SingularPointError,
    TableFormatError,
)

__all__ = [
    "VACUUM",
    "CoherenceReport",
    "DispersionModel",
    "Material",
    "OscillatorTerm",
    "TabulatedPermittivity",
    "drude",
    "enz_crossing",
    "enz_drude",
    "kramers_kronig_real",
    "lorentz",
    "loss_function",
    "loss_function_scan",
    "permittivity",
    "refractive_index",
    "select_enz_point",
    "coherence_length",
    "coherence_time",
    "loss_fwhm",
    "loss_peak",
    "MaterialPreset",
    "list_presets",
    "load_preset",
    "resolve_material",
    "fit_enz_preset",
    "fit_residuals",
    "DomainError",
    "ExtrapolationError",
    "InconclusiveFWHMError",
    "InfinitePhaseVelocityError",
    "MaterialError",
    "NoCrossingError",
    "PresetNotFoundError",
    "SingularPointError",
    "TableFormatError",
]
