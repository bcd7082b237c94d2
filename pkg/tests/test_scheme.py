import itertools

import numpy
import pytest

from fvnsf.exceptions import GridMismatchError, NoConvergence, PositivityLoss, ThermoDomainError
from fvnsf.plugin.discrete.fields import CellField
from fvnsf.plugin.discrete.mesh import build_grid, face_cells
from fvnsf.plugin.physics.flux import diffusive_flux
from fvnsf.plugin.solver.scheme import assemble_residual, initial_state, run, step
from fvnsf.plugin.solver.state import State

from .conftest import make_params, random_state, smooth_wave


def constant(value):
    return lambda x: numpy.full(x.shape[1:], value)


def test_initial_state_constants(grid2):
    params = make_params(grid2)
    state = initial_state(constant(1.0), lambda x: numpy.zeros(x.shape), constant(1.0), grid2, params)
    numpy.testing.assert_array_equal(state.rho.values, 1.0)
    numpy.testing.assert_array_equal(state.u.values, 0.0)
    assert state.t == 0.0


def test_initial_state_cell_means():
    grid = build_grid(2, 16)
    params = make_params(grid)
    state = initial_state(
        lambda x: 1.0 + 0.2 * numpy.sin(2 * numpy.pi * x[0]), lambda x: numpy.zeros(x.shape), constant(1.0), grid, params
    )
    left = numpy.arange(grid.N) * grid.h
    means = 1.0 + 0.2 * (numpy.cos(2 * numpy.pi * left) - numpy.cos(2 * numpy.pi * (left + grid.h))) / (2 * numpy.pi * grid.h)
    numpy.testing.assert_allclose(state.rho.values, means[:, None] * numpy.ones(grid.N), atol=1e-10)
    assert state.rho.integral() == pytest.approx(1.0, abs=1e-10)


def test_initial_state_rejects_nonpositive_means(grid2):
    params = make_params(grid2)
    with pytest.raises(ThermoDomainError):
        initial_state(lambda x: numpy.sin(2 * numpy.pi * x[0]), lambda x: numpy.zeros(x.shape), constant(1.0), grid2, params)
    with pytest.raises(ThermoDomainError):
        initial_state(constant(1.0), lambda x: numpy.zeros(x.shape), constant(-1.0), grid2, params)


def test_initial_state_rejects_foreign_params(grid2):
    with pytest.raises(GridMismatchError):
        initial_state(constant(1.0), lambda x: numpy.zeros(x.shape), constant(1.0), grid2, make_params(build_grid(2, 4)))


def test_uniform_residual_is_zero(grid2):
    state = State.uniform(grid2, rho=1.3, theta=0.7)
    residual = assemble_residual(state, state, make_params(grid2, alpha=1.5))
    assert residual.max_abs() == 0.0


def dense_residual(candidate, previous, params):
    """Weak form tested with the indicator of every cell, assembled face by face"""
    grid = candidate.grid
    d, h, N = grid.d, grid.h, grid.N
    volume, area = grid.cell_volume, grid.face_area
    c_v = params.gas.c_v
    rho, u, theta = candidate.rho.values, candidate.u.values, candidate.theta.values
    rho0, u0, theta0 = previous.rho.values, previous.u.values, previous.theta.values
    cells = list(itertools.product(range(N), repeat=d))
    faces = list(grid.faces())

    gradient = numpy.zeros((d, d) + grid.shape)
    for L in cells:
        for j in range(d):
            for i in range(d):
                plus, minus = grid.neighbor(L, i, 1), grid.neighbor(L, i, -1)
                gradient[(j, i) + L] = (u[(j,) + plus] - u[(j,) + minus]) / (2 * h)
    divergence = sum(gradient[i, i] for i in range(d))
    p = rho * theta
    tensor = params.mu * (gradient + numpy.swapaxes(gradient, 0, 1))
    for i in range(d):
        tensor[i, i] += (params.lam * divergence) - p

    def indicator_jump(face, K):
        inner, outer, _ = face_cells(grid, face)
        return float(outer == K) - float(inner == K)

    def flux_term(r, K):
        field = CellField(grid, r)
        velocity = CellField(grid, u)
        return -area * sum(diffusive_flux(field, velocity, face, params.flux) * indicator_jump(face, K) for face in faces)

    def dual_term(values, K):
        jumps = 0.0
        for face in faces:
            inner, outer, _ = face_cells(grid, face)
            jumps += (values[outer] - values[inner]) * indicator_jump(face, K)
        return volume * jumps / (h * h)

    continuity = numpy.zeros(grid.shape)
    momentum = numpy.zeros((d,) + grid.shape)
    temperature = numpy.zeros(grid.shape)
    for K in cells:
        continuity[K] = volume * (rho[K] - rho0[K]) / params.dt + flux_term(rho, K)
        for j in range(d):
            value = volume * (rho[K] * u[(j,) + K] - rho0[K] * u0[(j,) + K]) / params.dt
            value += flux_term(rho * u[j], K)
            for L in cells:
                for i in range(d):
                    weight = float(grid.neighbor(L, i, 1) == K) - float(grid.neighbor(L, i, -1) == K)
                    value += volume * tensor[(j, i) + L] * weight / (2 * h)
            if params.alpha is not None:
                value += h ** params.alpha * dual_term(u[j], K)
            momentum[(j,) + K] = value
        work = sum(tensor[(j, i) + K] * gradient[(j, i) + K] for j in range(d) for i in range(d))
        temperature[K] = (
            c_v * volume * (rho[K] * theta[K] - rho0[K] * theta0[K]) / params.dt
            + c_v * flux_term(rho * theta, K)
            + params.kappa * dual_term(theta, K)
            - volume * work
        )
    return continuity, momentum, temperature


@pytest.mark.parametrize("eps, alpha", [(0.0, None), (0.4, 1.5), (-0.3, None)])
def test_residual_matches_dense_assembly(rng, eps, alpha):
    grid = build_grid(2, 4)
    params = make_params(grid, eps=eps, alpha=alpha, lam=0.05)
    previous = random_state(rng, grid)
    candidate = random_state(rng, grid, t=params.dt)
    expected = dense_residual(candidate, previous, params)
    actual = assemble_residual(candidate, previous, params)
    for mine, theirs in zip(actual, expected):
        scale = 10.0 * (1.0 + numpy.max(numpy.abs(theirs)))
        numpy.testing.assert_allclose(mine, theirs, rtol=0, atol=1e-12 * scale)


def test_residual_rejects_mixed_grids(rng):
    grid = build_grid(2, 4)
    other = random_state(rng, build_grid(2, 8))
    with pytest.raises(GridMismatchError):
        assemble_residual(random_state(rng, grid), other, make_params(grid))


def test_uniform_state_is_a_fixed_point(grid2):
    state = State.uniform(grid2, rho=1.2, theta=0.9)
    new, stats = step(state, make_params(grid2))
    assert stats.iterations == 1
    numpy.testing.assert_allclose(new.rho.values, 1.2, rtol=1e-14)
    numpy.testing.assert_allclose(new.theta.values, 0.9, rtol=1e-14)
    assert new.t == pytest.approx(grid2.h / 2)


def test_step_solves_the_residual(grid2):
    params = make_params(grid2)
    state = smooth_wave(grid2, params)
    new, stats = step(state, params)
    assert stats.iterations <= params.picard_max
    assert stats.increment <= params.picard_tol
    assert stats.rho_min > 0 and stats.theta_min > 0
    residual = assemble_residual(new, state, params)
    assert residual.max_abs() <= 1e-8


def test_step_conserves_mass(grid2):
    params = make_params(grid2, eps=0.5)
    state = smooth_wave(grid2, params, a=0.3, b=0.2)
    new, stats = step(state, params)
    before = state.rho.integral()
    assert abs(new.rho.integral() - before) <= 1e-12 * before
    # the continuity solve itself conserves mass; the shift only removes solver noise
    assert stats.mass_correction <= 1e-10


def test_mass_shift_is_measured(grid2, monkeypatch, caplog):
    from fvnsf.plugin.solver import scheme

    def lossy(matvec, rhs, guess, diagonal, tol, maxiter, label):
        return 0.99 * guess, 1

    params = make_params(grid2)
    state = smooth_wave(grid2, params)
    solver = scheme.PicardSolver(state, params)
    monkeypatch.setattr(scheme, "solve_block", lossy)
    with caplog.at_level("WARNING", logger="fvnsf.plugin.solver.scheme"):
        rho = solver.solve_continuity(state.rho.values, state.u.values)
    assert numpy.sum(rho) == pytest.approx(numpy.sum(state.rho.values), rel=1e-14)
    assert solver.mass_correction == pytest.approx(0.01, rel=1e-12)
    assert "lost" in caplog.text


def test_step_with_artificial_viscosity(grid3):
    params = make_params(grid3, alpha=1.0)
    state = smooth_wave(grid3, params)
    new, stats = step(state, params)
    assert new.is_positive()
    assert assemble_residual(new, state, params).max_abs() <= 1e-8


def test_picard_cap_raises(grid2):
    params = make_params(grid2, picard_max=1)
    state = smooth_wave(grid2, params)
    with pytest.raises(NoConvergence):
        step(state, params)


def test_positivity_loss_is_reported(grid2, monkeypatch):
    from fvnsf.plugin.solver import scheme

    params = make_params(grid2)
    state = State.uniform(grid2)
    monkeypatch.setattr(scheme.PicardSolver, "solve_temperature", lambda self, rho, u, theta: numpy.full_like(theta, -1.0))
    with pytest.raises(PositivityLoss):
        step(state, params)


def test_run_zero_time(grid2):
    params = make_params(grid2)
    state = smooth_wave(grid2, params)
    final, history = run(state, params, 0.0)
    assert final is state
    assert len(history) == 0


def test_run_records_every_step(grid2):
    params = make_params(grid2)
    state = smooth_wave(grid2, params)
    seen = []
    final, history = run(state, params, 3 * params.dt, observers=[lambda k, prev, new, stats: seen.append(k)])
    assert len(history) == 3
    assert seen == [1, 2, 3]
    assert final.t == pytest.approx(3 * params.dt)
    assert history.times() == pytest.approx([k * params.dt for k in range(4)])


def test_run_rejects_fractional_steps(grid2):
    params = make_params(grid2)
    with pytest.raises(ValueError):
        run(State.uniform(grid2), params, 2.5 * params.dt)


def test_run_propagates_step_index(grid2):
    params = make_params(grid2, picard_max=1)
    with pytest.raises(NoConvergence) as info:
        run(smooth_wave(grid2, params), params, 2 * params.dt)
    assert info.value.step == 1
    assert str(info.value).startswith("step 1: ")


def test_uniform_state_stays_uniform():
    grid = build_grid(2, 4)
    params = make_params(grid)
    state = State.uniform(grid, rho=1.0, u=[0.3, -0.2], theta=1.0)
    final, history = run(state, params, 100 * params.dt)
    assert len(history) == 100
    numpy.testing.assert_allclose(final.rho.values, 1.0, atol=1e-13)
    numpy.testing.assert_allclose(final.u.values[0], 0.3, atol=1e-13)
    numpy.testing.assert_allclose(final.u.values[1], -0.2, atol=1e-13)
    numpy.testing.assert_allclose(final.theta.values, 1.0, atol=1e-13)


def test_solve_block_on_a_diagonal_system(rng):
    from fvnsf.plugin.solver.linear import solve_block

    diagonal = rng.uniform(1.0, 2.0, (4, 4))
    rhs = rng.standard_normal((4, 4))
    solution, _ = solve_block(lambda x: diagonal * x, rhs, numpy.zeros_like(rhs), diagonal, 1e-12, 50, "test")
    numpy.testing.assert_allclose(solution, rhs / diagonal, rtol=1e-10)
