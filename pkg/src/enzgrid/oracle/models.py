"""
Result type shared by the analytic references.
"""

from dataclasses import dataclass
from typing import Any, Dict, Union

import numpy as np


@dataclass(frozen=True)
class OracleResult:
    """A closed-form value with its units and range of validity."""
    quantity: str
    value: Union[complex, float, np.ndarray]
    units: str
    validity: str = ""

    def to_dict(self) -> Dict[str, Any]:
        value = np.asarray(self.value)
        if np.iscomplexobj(value):
            encoded: Any = {'re': value.real.tolist(), 'im': value.imag.tolist()}
        else:
            encoded = value.tolist()
        return {
            'quantity': self.quantity,
            'value': encoded,
            'units': self.units,
            'validity': self.validity,
        }
