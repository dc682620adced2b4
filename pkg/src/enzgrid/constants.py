"""
Physical constants (CODATA values from scipy.constants).
"""

from scipy.constants import c, epsilon_0, hbar, mu_0

C0 = c
EPS0 = epsilon_0
MU0 = mu_0
HBAR = hbar
ETA0 = (mu_0 / epsilon_0) ** 0.5

__all__ = ["C0", "EPS0", "MU0", "HBAR", "ETA0"]
