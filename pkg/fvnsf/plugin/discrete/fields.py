"""
Piecewise constant fields on cells and faces
Cell-mean and face-mean projections, face traces and the upwind selector
"""

import itertools
import logging
from typing import Callable, NamedTuple, Sequence, Union

import numpy as np
from numpy.polynomial.legendre import leggauss

from ...exceptions import FieldShapeError, GridMismatchError
from .mesh import Face, Grid, face_cells

logger = logging.getLogger(__name__)

# Sampler contract: x has shape (d, *S); the result has shape S (scalar) or (m, *S).
Sampler = Callable[[np.ndarray], Union[np.ndarray, float]]

# Five nodes per axis keep cell means of smooth data accurate to ~1e-13 at N = 8.
QUADRATURE_POINTS = 5
GAUSS_NODES, GAUSS_WEIGHTS = leggauss(QUADRATURE_POINTS)

Number = Union[int, float]


# Axis-wise kernels on raw arrays. Cell dimensions are always the trailing d axes.
def cell_axis(values: np.ndarray, d: int, axis: int) -> int:
    return values.ndim - d + axis


def shifted(values: np.ndarray, d: int, axis: int, step: int) -> np.ndarray:
    """Values of the neighbour K + step * e_axis, stored at K"""
    return np.roll(values, -step, axis=cell_axis(values, d, axis))


def jumps(values: np.ndarray, d: int, axis: int) -> np.ndarray:
    """[[v]] = v_out - v_in on the faces between K and K + e_axis"""
    return shifted(values, d, axis, 1) - values


def averages(values: np.ndarray, d: int, axis: int) -> np.ndarray:
    return 0.5 * (shifted(values, d, axis, 1) + values)


def upwind_select(v_in, v_out, speed):
    """Inflow value; the average where the speed is exactly zero"""
    return np.where(speed > 0, v_in, np.where(speed < 0, v_out, 0.5 * (v_in + v_out)))


class _PiecewiseConstant:
    """Shared arithmetic of cell and face fields"""

    __slots__ = ("grid", "values")

    _extra_axes = 0

    def __init__(self, grid: Grid, values):
        values = np.asarray(values, dtype=float)
        trailing = values.shape[values.ndim - grid.d:] if values.ndim >= grid.d else ()
        if trailing != grid.shape or values.ndim < grid.d + self._extra_axes:
            raise FieldShapeError(
                f"{type(self).__name__} values of shape {values.shape} do not fit grid d={grid.d} N={grid.N}"
            )
        if self._extra_axes and values.shape[values.ndim - grid.d - 1] != grid.d:
            raise FieldShapeError(f"face axis of length {grid.d} expected, got shape {values.shape}")
        self.grid = grid
        self.values = values

    @property
    def rank(self) -> int:
        return self.values.ndim - self.grid.d - self._extra_axes

    def _operand(self, other):
        if isinstance(other, _PiecewiseConstant):
            if type(other) is not type(self):
                raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
            if other.grid != self.grid:
                raise GridMismatchError("fields live on different grids")
            return other.values
        return other

    def _new(self, values):
        return type(self)(self.grid, values)

    def __add__(self, other):
        return self._new(self.values + self._operand(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._new(self.values - self._operand(other))

    def __rsub__(self, other):
        return self._new(self._operand(other) - self.values)

    def __mul__(self, other):
        return self._new(self.values * self._operand(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._new(self.values / self._operand(other))

    def __neg__(self):
        return self._new(-self.values)

    def copy(self):
        return self._new(self.values.copy())

    def component(self, index):
        return self._new(self.values[index])

    def _cell_axes(self):
        return tuple(range(self.values.ndim - self.grid.d, self.values.ndim))

    def l2_norm(self) -> float:
        """h^{d/2} times the Euclidean norm of all values"""
        return float(np.sqrt(self.grid.cell_volume * np.sum(self.values ** 2)))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def min(self) -> float:
        return float(np.min(self.values))

    def max(self) -> float:
        return float(np.max(self.values))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(d={self.grid.d}, N={self.grid.N}, shape={self.values.shape})"


class CellField(_PiecewiseConstant):
    """One scalar, vector or tensor value per cell"""

    @classmethod
    def zeros(cls, grid: Grid, components: Sequence[int] = ()) -> "CellField":
        return cls(grid, np.zeros(tuple(components) + grid.shape))

    @classmethod
    def constant(cls, grid: Grid, value) -> "CellField":
        value = np.asarray(value, dtype=float)
        return cls(grid, np.broadcast_to(value.reshape(value.shape + (1,) * grid.d), value.shape + grid.shape).copy())

    def integral(self):
        """Integral over the torus, per component"""
        total = self.grid.cell_volume * np.sum(self.values, axis=self._cell_axes())
        return float(total) if np.ndim(total) == 0 else total

    def at(self, cell) -> np.ndarray:
        return self.values[(Ellipsis,) + tuple(cell)]


class FaceField(_PiecewiseConstant):
    """One value per face; entry [..., i, K] sits on the face between K and K + e_i"""

    _extra_axes = 1

    def integral(self):
        """Integral over the dual cells, each of measure h^d"""
        axes = (self.values.ndim - self.grid.d - 1,) + self._cell_axes()
        total = self.grid.cell_volume * np.sum(self.values, axis=axes)
        return float(total) if np.ndim(total) == 0 else total

    def at(self, face: Face) -> np.ndarray:
        return self.values[(Ellipsis, face.axis) + tuple(face.cell)]


def box_average(sampler: Sampler, centers: np.ndarray, half_widths: Sequence[float]) -> np.ndarray:
    """
    Tensor Gauss-Legendre mean of a sampler over axis-aligned boxes

    Args:
        sampler: Function of x with shape (d, *S)
        centers: Box centers, shape (d, *S)
        half_widths: Half box width per axis; 0 collapses that axis to the center plane

    Returns:
        Box means with shape S or (m, *S)
    """
    d = centers.shape[0]
    rules = [
        (GAUSS_NODES, 0.5 * GAUSS_WEIGHTS) if width > 0 else (np.zeros(1), np.ones(1))
        for width in half_widths
    ]
    spatial = centers.shape[1:]
    total = None
    for combo in itertools.product(*(range(len(nodes)) for nodes, _ in rules)):
        offset = np.array([rules[a][0][combo[a]] * half_widths[a] for a in range(d)])
        weight = float(np.prod([rules[a][1][combo[a]] for a in range(d)]))
        value = np.asarray(sampler(centers + offset.reshape((d,) + (1,) * len(spatial))), dtype=float)
        if value.ndim == 0:
            # position-independent sampler: its mean is the value itself
            return np.full(spatial, float(value))
        total = weight * value if total is None else total + weight * value
    return total


def project_Q(sampler: Sampler, grid: Grid) -> CellField:
    """Cell means of a smooth periodic function"""
    return CellField(grid, box_average(sampler, grid.cell_centers(), [0.5 * grid.h] * grid.d))


def project_W(sampler: Sampler, grid: Grid) -> FaceField:
    """Face means of component i over the faces orthogonal to e_i"""
    values = []
    for axis in range(grid.d):
        widths = [0.5 * grid.h] * grid.d
        widths[axis] = 0.0
        mean = box_average(sampler, grid.face_centers(axis), widths)
        if mean.ndim == grid.d:
            raise FieldShapeError("project_W needs a vector-valued sampler")
        values.append(mean[axis])
    return FaceField(grid, np.stack(values))


class FaceTraces(NamedTuple):
    v_in: np.ndarray
    v_out: np.ndarray
    jump: np.ndarray
    average: np.ndarray


def face_traces(field: CellField, face: Face) -> FaceTraces:
    """Inner and outer values on a face with their jump and average"""
    in_cell, out_cell, _ = face_cells(field.grid, face)
    v_in = field.at(in_cell)
    v_out = field.at(out_cell)
    return FaceTraces(v_in, v_out, v_out - v_in, 0.5 * (v_in + v_out))


def upwind_value(field: CellField, face: Face, normal_speed: Number):
    traces = face_traces(field, face)
    value = upwind_select(traces.v_in, traces.v_out, normal_speed)
    return float(value) if np.ndim(value) == 0 else value
