import math

import numpy
import pytest

from fvnsf.plugin.analysis.consistency import builtin_test_functions, consistency_residuals, trig_product
from fvnsf.plugin.discrete.mesh import build_grid
from fvnsf.plugin.solver.scheme import run
from fvnsf.plugin.solver.state import State

from .conftest import make_params, smooth_wave


def by_name(name):
    return next(phi for phi in builtin_test_functions() if phi.name == name)


@pytest.fixture
def wave_run(grid2):
    params = make_params(grid2)
    _, history = run(smooth_wave(grid2, params), params, 4 * params.dt)
    return history, params


def test_trig_product_derivatives():
    phi = trig_product("check", [1, 2], ["sin", "cos"], offset=0.5, amplitude=2.0, growth=3.0)
    x = numpy.array([[0.1, 0.37], [0.8, 0.05]])
    t, step = 0.4, 1e-6
    shift = numpy.array([[step, step], [0.0, 0.0]])
    expected = (phi.value(t, x + shift) - phi.value(t, x - shift)) / (2 * step)
    numpy.testing.assert_allclose(phi.grad(t, x)[0], expected, rtol=1e-6)
    expected_t = (phi.value(t + step, x) - phi.value(t - step, x)) / (2 * step)
    numpy.testing.assert_allclose(phi.dt(t, x), expected_t, rtol=1e-6)
    assert phi.nonnegative is False


def test_constant_function_sees_conservation(wave_run):
    history, params = wave_run
    report = consistency_residuals(history, by_name("one"), params, tau=4 * params.dt)
    assert abs(report.e_rho) <= 1e-12
    assert report.e_m_norm <= 1e-8
    assert report.e_s_signed is not None
    assert report.e_s_signed >= -1e-8
    assert report.tau == pytest.approx(4 * params.dt)


def test_uniform_rest_state_has_no_defect(grid2):
    params = make_params(grid2)
    _, history = run(State.uniform(grid2), params, 2 * params.dt)
    for phi in builtin_test_functions():
        report = consistency_residuals(history, phi, params, tau=2 * params.dt)
        assert abs(report.e_rho) <= 1e-12
        assert report.e_m_norm <= 1e-10
        if report.e_s_signed is not None:
            assert abs(report.e_s_signed) <= 1e-12


def test_entropy_defect_needs_nonnegative_function(wave_run):
    history, params = wave_run
    with pytest.raises(ValueError):
        consistency_residuals(history, by_name("sin1"), params, tau=params.dt, with_entropy=True)
    report = consistency_residuals(history, by_name("sin1"), params, tau=params.dt)
    assert report.e_s_signed is None
    assert len(report.e_m) == 2


def test_bump_function_entropy_sign(wave_run):
    history, params = wave_run
    report = consistency_residuals(history, by_name("bump"), params, tau=4 * params.dt)
    assert report.e_s_signed is not None
    assert math.isfinite(report.e_s_signed)


def test_tau_must_lie_in_run(wave_run):
    history, params = wave_run
    with pytest.raises(ValueError):
        consistency_residuals(history, by_name("one"), params, tau=5 * params.dt)
    with pytest.raises(ValueError):
        consistency_residuals(history, by_name("one"), params, tau=1.5 * params.dt)


@pytest.mark.slow
def test_mass_defect_decays_with_h():
    tau = 1.0 / 64
    phi = by_name("sin1cos2")
    one = by_name("one")
    hs, defects = [], []
    for N in (8, 16, 32, 64):
        grid = build_grid(2, N)
        params = make_params(grid, dt=grid.h ** 2)
        _, history = run(smooth_wave(grid, params), params, tau)
        report = consistency_residuals(history, phi, params, tau)
        hs.append(grid.h)
        defects.append(abs(report.e_rho))
        assert consistency_residuals(history, one, params, tau).e_s_signed >= -1e-8
    slope = numpy.polyfit(numpy.log(hs), numpy.log(defects), 1)[0]
    assert slope >= 0.8
