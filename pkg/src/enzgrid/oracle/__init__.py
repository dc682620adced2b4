"""
Independent analytic references for the simulator and the analyses.
"""

from .green2d import green_reference, vacuum_green_2d, vacuum_self_green_imag
from .transfer_matrix import slab_flux_balance, transfer_matrix_slab, transfer_matrix_stack
from .limits import drude_fwhm_limit
from .models import OracleResult
from .exceptions import CoincidentPointsError, OracleError

__all__ = [
    "green_reference",
    "vacuum_green_2d",
    "vacuum_self_green_imag",
    "slab_flux_balance",
    "transfer_matrix_slab",
    "transfer_matrix_stack",
    "drude_fwhm_limit",
    "OracleResult",
    "CoincidentPointsError",
    "OracleError",
]
