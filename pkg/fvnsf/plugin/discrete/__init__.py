"""
Discrete calculus on the periodic grid
Mesh topology, piecewise constant fields and the finite volume operators
"""

from .fields import CellField, FaceField, face_traces, project_Q, project_W, upwind_value
from .mesh import Face, Grid, build_grid, face_cells
from .operators import div_h, grad_E, grad_h, laplace_h, tensor_calculus

__all__ = [
    "CellField",
    "FaceField",
    "Face",
    "Grid",
    "build_grid",
    "face_cells",
    "face_traces",
    "project_Q",
    "project_W",
    "upwind_value",
    "grad_h",
    "div_h",
    "grad_E",
    "laplace_h",
    "tensor_calculus",
]
