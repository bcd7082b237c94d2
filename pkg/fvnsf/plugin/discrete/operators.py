"""
Discrete differential operators on the periodic grid
Central cell gradients and divergences, dual-grid gradients and the compact Laplacian
"""

from typing import NamedTuple

import numpy as np

from ...exceptions import FieldShapeError
from .fields import CellField, FaceField, jumps, shifted


# Array kernels. Leading axes are components, the trailing d axes are cells.
def grad_array(values: np.ndarray, d: int, h: float) -> np.ndarray:
    """Central gradient; a new derivative axis is inserted right before the cell axes"""
    parts = [(shifted(values, d, i, 1) - shifted(values, d, i, -1)) / (2.0 * h) for i in range(d)]
    return np.stack(parts, axis=values.ndim - d)


def div_array(values: np.ndarray, d: int, h: float) -> np.ndarray:
    """Central divergence contracting the last component axis"""
    direction = values.ndim - d - 1
    total = np.zeros(values.shape[:direction] + values.shape[direction + 1:])
    for i in range(d):
        component = np.take(values, i, axis=direction)
        total += (shifted(component, d, i, 1) - shifted(component, d, i, -1)) / (2.0 * h)
    return total


def grad_e_array(values: np.ndarray, d: int, h: float) -> np.ndarray:
    return np.stack([jumps(values, d, i) / h for i in range(d)], axis=values.ndim - d)


def face_div_array(values: np.ndarray, d: int, h: float) -> np.ndarray:
    """Divergence of face-normal data: (1/h) sum_i (g_i(K) - g_i(K - e_i))"""
    direction = values.ndim - d - 1
    total = np.zeros(values.shape[:direction] + values.shape[direction + 1:])
    for i in range(d):
        component = np.take(values, i, axis=direction)
        total += (component - shifted(component, d, i, -1)) / h
    return total


def laplace_array(values: np.ndarray, d: int, h: float) -> np.ndarray:
    # neighbour differences, so constants cancel exactly
    total = np.zeros(values.shape)
    for i in range(d):
        total += (shifted(values, d, i, 1) - values) + (shifted(values, d, i, -1) - values)
    return total / (h * h)


def double_dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """A:B over the two leading tensor axes"""
    return np.einsum("ij...,ij...->...", a, b)


# Field-level operators
def _require_rank(field: CellField, allowed, name: str) -> None:
    if field.rank not in allowed:
        raise FieldShapeError(f"{name} does not accept a rank-{field.rank} field")


def grad_h(field: CellField) -> CellField:
    """Central gradient; rows of the result follow the components of a vector input"""
    _require_rank(field, (0, 1), "grad_h")
    grid = field.grid
    return CellField(grid, grad_array(field.values, grid.d, grid.h))


def div_h(field: CellField) -> CellField:
    """Central divergence; row-wise for tensors"""
    _require_rank(field, (1, 2), "div_h")
    grid = field.grid
    return CellField(grid, div_array(field.values, grid.d, grid.h))


def grad_E(field: CellField) -> FaceField:
    """Normal difference quotient [[r]]/h on every face"""
    grid = field.grid
    return FaceField(grid, grad_e_array(field.values, grid.d, grid.h))


def face_div(field: FaceField) -> CellField:
    grid = field.grid
    return CellField(grid, face_div_array(field.values, grid.d, grid.h))


def laplace_h(field: CellField) -> CellField:
    """Compact (2d+1)-point Laplacian"""
    grid = field.grid
    return CellField(grid, laplace_array(field.values, grid.d, grid.h))


class TensorCalculus(NamedTuple):
    grad: CellField
    sym_grad: CellField
    div: CellField


def tensor_calculus(u: CellField) -> TensorCalculus:
    """Velocity gradient, its symmetric part and the divergence"""
    _require_rank(u, (1,), "tensor_calculus")
    grid = u.grid
    gradient = grad_array(u.values, grid.d, grid.h)
    sym = 0.5 * (gradient + np.swapaxes(gradient, 0, 1))
    return TensorCalculus(
        CellField(grid, gradient),
        CellField(grid, sym),
        CellField(grid, np.trace(gradient, axis1=0, axis2=1)),
    )
