"""
Diagnostics, consistency defects, convergence studies and the property suite
"""

from .consistency import ConsistencyReport, SpaceTimeFunction, builtin_test_functions, consistency_residuals
from .convergence import ErrorReport, StudyTable, eoc, error_norms, restrict, run_study
from .diagnostics import DiagnosticsRecord, DiagnosticsRecorder, hessian_bounds_check, record

__all__ = [
    "DiagnosticsRecord",
    "DiagnosticsRecorder",
    "record",
    "hessian_bounds_check",
    "ConsistencyReport",
    "SpaceTimeFunction",
    "builtin_test_functions",
    "consistency_residuals",
    "ErrorReport",
    "StudyTable",
    "restrict",
    "error_norms",
    "eoc",
    "run_study",
]
