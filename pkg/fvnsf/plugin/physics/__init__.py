"""
Thermodynamics of the perfect gas and the numerical flux
"""

from .flux import diffusive_flux, flux_divergence, upwind_flux
from .thermo import (
    ballistic_energy,
    ballistic_energy_drho,
    entropy,
    entropy_hessian,
    hessian_bounds,
    pressure,
    relative_energy,
)

__all__ = [
    "pressure",
    "entropy",
    "entropy_hessian",
    "hessian_bounds",
    "ballistic_energy",
    "ballistic_energy_drho",
    "relative_energy",
    "upwind_flux",
    "diffusive_flux",
    "flux_divergence",
]
