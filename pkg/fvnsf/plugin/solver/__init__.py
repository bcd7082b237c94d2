"""
Implicit time stepping
"""

from .presets import ICPreset, build_preset
from .scheme import assemble_residual, initial_state, run, step
from .state import RunHistory, State, StepStats

__all__ = [
    "State",
    "StepStats",
    "RunHistory",
    "ICPreset",
    "build_preset",
    "initial_state",
    "assemble_residual",
    "step",
    "run",
]
