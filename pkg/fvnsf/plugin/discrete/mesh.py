"""
Uniform periodic mesh of the unit torus
Cells, faces grouped by axis, and the neighbour topology
"""

import itertools
import logging
from typing import Iterator, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator

from ...exceptions import MeshError

logger = logging.getLogger(__name__)

CellIndex = Tuple[int, ...]


class Grid(BaseModel):
    """Immutable uniform grid with N cells per axis on [0,1)^d"""

    model_config = ConfigDict(frozen=True)

    d: int
    N: int

    @field_validator("d")
    @classmethod
    def check_dimension(cls, value: int) -> int:
        if value not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {value}")
        return value

    @field_validator("N")
    @classmethod
    def check_cells(cls, value: int) -> int:
        if value < 2:
            raise ValueError(f"need at least 2 cells per axis, got {value}")
        return value

    @property
    def h(self) -> float:
        return 1.0 / self.N

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.N,) * self.d

    @property
    def cell_volume(self) -> float:
        return self.h ** self.d

    @property
    def face_area(self) -> float:
        return self.h ** (self.d - 1)

    @property
    def num_cells(self) -> int:
        return self.N ** self.d

    @property
    def num_faces(self) -> int:
        return self.d * self.N ** self.d

    def cell_centers(self) -> np.ndarray:
        """Centers (k + 1/2) h, stacked as shape (d, N, ..., N)"""
        axis = (np.arange(self.N) + 0.5) * self.h
        return np.stack(np.meshgrid(*([axis] * self.d), indexing="ij"))

    def face_centers(self, axis: int) -> np.ndarray:
        """Centers of the faces between K and K + e_axis, shape (d, N, ..., N)"""
        centers = self.cell_centers()
        centers[axis] += 0.5 * self.h
        return centers

    def cells(self) -> Iterator[CellIndex]:
        return itertools.product(range(self.N), repeat=self.d)

    def faces(self) -> Iterator["Face"]:
        for axis in range(self.d):
            for cell in self.cells():
                yield Face(axis=axis, cell=cell)

    def neighbor(self, cell: CellIndex, axis: int, step: int = 1) -> CellIndex:
        index = list(cell)
        index[axis] = (index[axis] + step) % self.N
        return tuple(index)


class Face(BaseModel):
    """Face between `cell` and its +e_axis neighbour; the normal points out of `cell`"""

    model_config = ConfigDict(frozen=True)

    axis: int
    cell: CellIndex

    @model_validator(mode="after")
    def check_axis(self):
        if self.axis < 0 or self.axis >= len(self.cell):
            raise ValueError(f"axis {self.axis} out of range for a {len(self.cell)}-d cell index")
        return self

    def center(self, grid: Grid) -> np.ndarray:
        x = (np.asarray(self.cell, dtype=float) + 0.5) * grid.h
        x[self.axis] += 0.5 * grid.h
        return x


def build_grid(d: int, N: int) -> Grid:
    """
    Build the uniform periodic grid

    Args:
        d: Dimension, 2 or 3
        N: Cells per axis, at least 2

    Returns:
        Grid with N^d cells and d*N^d faces
    """
    try:
        grid = Grid(d=d, N=N)
    except ValidationError as e:
        message = "; ".join(error["msg"] for error in e.errors())
        logger.error(f"Rejected grid d={d}, N={N}: {message}")
        raise MeshError(message) from e

    logger.debug(f"Built grid d={d} N={N} h={grid.h}")
    return grid


def face_cells(grid: Grid, face: Face) -> Tuple[CellIndex, CellIndex, int]:
    """Incident cells of a face as (in_cell, out_cell, axis)"""
    if len(face.cell) != grid.d or any(k < 0 or k >= grid.N for k in face.cell):
        raise MeshError(f"face {face} does not belong to grid d={grid.d} N={grid.N}")
    return face.cell, grid.neighbor(face.cell, face.axis, 1), face.axis


def face_left_of(grid: Grid, cell: CellIndex, axis: int) -> Face:
    """Face between cell - e_axis and cell"""
    return Face(axis=axis, cell=grid.neighbor(cell, axis, -1))
