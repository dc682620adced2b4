"""
enzgrid

Dispersive 2D FDTD simulator and analytic coherence toolkit for
epsilon-near-zero waveguide networks.
"""

__version__ = "0.1.0"
__author__ = "The enzgrid Team"
