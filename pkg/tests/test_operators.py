import math

import numpy
import pytest

from fvnsf.plugin.analysis.properties import (
    check_face_duality,
    check_grad_div_duality,
    check_laplace_composition,
    check_laplace_duality,
)
from fvnsf.plugin.discrete.fields import CellField, project_Q
from fvnsf.plugin.discrete.mesh import build_grid
from fvnsf.plugin.discrete.operators import div_h, face_div, grad_E, grad_h, laplace_h, tensor_calculus

TWO_PI = 2 * math.pi


def test_constants_are_annihilated(grid3):
    scalar = CellField.constant(grid3, 2.5)
    vector = CellField.constant(grid3, [1.0, -1.0, 0.5])
    assert numpy.all(grad_h(scalar).values == 0)
    assert numpy.all(div_h(vector).values == 0)
    assert numpy.all(grad_E(scalar).values == 0)
    assert numpy.all(laplace_h(scalar).values == 0)
    for part in tensor_calculus(vector):
        assert numpy.all(part.values == 0)


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("value", [0.7, 1.3, 1.0 / 3.0])
def test_laplace_cancels_inexact_constants(d, value):
    field = CellField.constant(build_grid(d, 4), value)
    assert numpy.all(laplace_h(field).values == 0.0)


def test_grad_h_matches_stencil():
    grid = build_grid(2, 16)
    x = grid.cell_centers()
    r = numpy.sin(TWO_PI * x[0])
    gradient = grad_h(CellField(grid, r)).values
    for k in range(16):
        expected = (r[(k + 1) % 16, 3] - r[(k - 1) % 16, 3]) / (2 * grid.h)
        assert gradient[0, k, 3] == expected
    assert numpy.all(gradient[1] == 0)


def test_div_of_grad_is_wide_laplacian(rng, grid2):
    r = rng.standard_normal(grid2.shape)
    composed = div_h(grad_h(CellField(grid2, r))).values
    wide = numpy.zeros_like(r)
    for axis in range(2):
        wide += (numpy.roll(r, -2, axis) - 2 * r + numpy.roll(r, 2, axis)) / (4 * grid2.h ** 2)
    numpy.testing.assert_allclose(composed, wide, atol=1e-10)


def test_div_telescopes(rng, grid3):
    v = CellField(grid3, rng.standard_normal((3,) + grid3.shape))
    assert div_h(v).integral() == pytest.approx(0.0, abs=1e-13)


def test_grad_E_definition():
    grid = build_grid(2, 4)
    values = numpy.zeros(grid.shape)
    values[0, 0], values[1, 0] = 1.0, 3.0
    assert grad_E(CellField(grid, values)).values[0, 0, 0] == pytest.approx(8.0)


def test_laplace_spike():
    grid = build_grid(2, 4)
    values = numpy.zeros(grid.shape)
    values[1, 1] = 1.0
    lap = laplace_h(CellField(grid, values)).values
    assert lap[1, 1] == pytest.approx(-64.0)
    for cell in [(0, 1), (2, 1), (1, 0), (1, 2)]:
        assert lap[cell] == pytest.approx(16.0)
    assert lap.sum() == pytest.approx(0.0, abs=1e-12)


def test_laplace_is_face_div_of_grad_E(rng, grid3):
    r = CellField(grid3, rng.standard_normal(grid3.shape))
    numpy.testing.assert_allclose(laplace_h(r).values, face_div(grad_E(r)).values, atol=1e-10)


@pytest.mark.parametrize("d, N", [(2, 8), (3, 4)])
def test_dualities_randomized(rng, d, N):
    grid = build_grid(d, N)
    for _ in range(100):
        assert check_grad_div_duality(rng, grid) <= 1e-12
        assert check_laplace_duality(rng, grid) <= 1e-12
        assert check_face_duality(rng, grid) <= 1e-12
        assert check_laplace_composition(rng, grid) <= 1e-12


def test_tensor_calculus_traces(rng, grid2):
    u = CellField(grid2, rng.standard_normal((2,) + grid2.shape))
    gradient, sym, div = tensor_calculus(u)
    numpy.testing.assert_allclose(numpy.trace(sym.values), div.values, atol=1e-13)
    numpy.testing.assert_allclose(numpy.trace(gradient.values), div_h(u).values, atol=1e-13)
    numpy.testing.assert_allclose(sym.values, numpy.swapaxes(sym.values, 0, 1))


def test_grad_transpose_identity(rng, grid3):
    u = CellField(grid3, rng.standard_normal((3,) + grid3.shape))
    gradient, _, div = tensor_calculus(u)
    cross = grid3.cell_volume * numpy.sum(numpy.einsum("ij...,ji...->...", gradient.values, gradient.values))
    assert cross == pytest.approx(div.l2_norm() ** 2, rel=1e-12)
    assert cross >= 0


def test_grad_E_of_projection_converges():
    errors = []
    for N in (8, 16, 32, 64):
        grid = build_grid(2, N)
        faces = grad_E(project_Q(lambda x: numpy.sin(TWO_PI * x[0]), grid)).values
        points = grid.face_centers(0)
        worst = 0.0
        for shift in (-0.5, 0.0, 0.5):
            exact = TWO_PI * numpy.cos(TWO_PI * (points[0] + shift * grid.h))
            worst = max(worst, numpy.max(numpy.abs(exact - faces[0])))
        errors.append(worst)
    rates = [math.log2(a / b) for a, b in zip(errors, errors[1:])]
    assert min(rates) >= 0.9
