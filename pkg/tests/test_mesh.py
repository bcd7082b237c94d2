import collections

import numpy
import pytest

from fvnsf.exceptions import MeshError
from fvnsf.plugin.discrete.mesh import Face, build_grid, face_cells, face_left_of


@pytest.mark.parametrize("d, N, cells, faces, h", [(2, 8, 64, 128, 0.125), (3, 4, 64, 192, 0.25)])
def test_counts(d, N, cells, faces, h):
    grid = build_grid(d, N)
    assert grid.num_cells == cells
    assert grid.num_faces == faces
    assert grid.h == pytest.approx(h)
    assert len(list(grid.faces())) == faces
    assert grid.cell_volume == pytest.approx(h ** d)
    assert grid.face_area == pytest.approx(h ** (d - 1))


@pytest.mark.parametrize("d, N", [(2, 1), (1, 8), (4, 4), (3, 0)])
def test_rejects_degenerate_grids(d, N):
    with pytest.raises(MeshError):
        build_grid(d, N)


def test_total_volume():
    for N in (2, 3, 7, 16):
        grid = build_grid(2, N)
        assert grid.num_cells * grid.cell_volume == pytest.approx(1.0, abs=1e-14)


def test_face_cells_adjacency_and_wrap():
    grid = build_grid(2, 4)
    assert face_cells(grid, Face(axis=0, cell=(0, 0))) == ((0, 0), (1, 0), 0)
    assert face_cells(grid, Face(axis=0, cell=(3, 0))) == ((3, 0), (0, 0), 0)
    assert face_cells(grid, Face(axis=1, cell=(2, 3))) == ((2, 3), (2, 0), 1)


def test_each_cell_touched_2d_times():
    grid = build_grid(2, 4)
    touched = collections.Counter()
    inner = collections.Counter()
    outer = collections.Counter()
    for face in grid.faces():
        in_cell, out_cell, _ = face_cells(grid, face)
        touched[in_cell] += 1
        touched[out_cell] += 1
        inner[in_cell] += 1
        outer[out_cell] += 1
    assert set(touched.values()) == {2 * grid.d}
    assert set(inner.values()) == {grid.d}
    assert set(outer.values()) == {grid.d}


def test_face_left_of_out_cell_is_same_face():
    grid = build_grid(3, 4)
    for face in grid.faces():
        _, out_cell, axis = face_cells(grid, face)
        assert face_left_of(grid, out_cell, axis) == face


def test_face_outside_grid_rejected():
    grid = build_grid(2, 4)
    with pytest.raises(MeshError):
        face_cells(grid, Face(axis=0, cell=(4, 0)))


def test_centers():
    grid = build_grid(2, 4)
    centers = grid.cell_centers()
    assert centers.shape == (2, 4, 4)
    assert centers[0, 1, 2] == pytest.approx(0.375)
    assert centers[1, 1, 2] == pytest.approx(0.625)
    numpy.testing.assert_allclose(Face(axis=1, cell=(1, 2)).center(grid), [0.375, 0.75])
    numpy.testing.assert_allclose(grid.face_centers(1)[:, 1, 2], [0.375, 0.75])
