"""
Error types raised by the solver and its tooling
"""

from typing import Optional


class FVNSFError(Exception):
    """Base class for all fvnsf failures"""


class ConfigError(FVNSFError):
    """Configuration file could not be read or validated"""


class MeshError(FVNSFError, ValueError):
    """Degenerate grid topology"""


class FieldShapeError(FVNSFError, ValueError):
    """Field values do not fit the grid"""


class GridMismatchError(FVNSFError, ValueError):
    """Operands live on different grids or time stamps"""


class ThermoDomainError(FVNSFError, ValueError):
    """Thermodynamic function evaluated off the positive quadrant"""


class SolverError(FVNSFError):
    """Failure inside an implicit time step"""

    def __init__(self, message: str, step: Optional[int] = None):
        super().__init__(message)
        self.step = step

    def __str__(self) -> str:
        message = super().__str__()
        if self.step is None:
            return message
        return f"step {self.step}: {message}"


class NoConvergence(SolverError):
    """Picard iteration exceeded its cap"""


class PositivityLoss(SolverError):
    """Converged state has a nonpositive density or temperature"""


class BlowUpError(SolverError):
    """Nonfinite values appeared in the iterates"""


class LinearSolveError(SolverError):
    """Krylov sub-solve did not reach its tolerance"""


class StudyError(FVNSFError):
    """Convergence study failed on one of its levels"""

    def __init__(self, message: str, level: Optional[int] = None):
        super().__init__(message)
        self.level = level

    def __str__(self) -> str:
        message = super().__str__()
        if self.level is None:
            return message
        return f"level N={self.level}: {message}"
