"""
fvnsf
Finite volume solver for the Navier-Stokes-Fourier system on the periodic torus
"""

__version__ = "1.0.0"
__description__ = "Implicit finite volume method with energy, entropy and convergence diagnostics"
