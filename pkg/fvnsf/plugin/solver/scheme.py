"""
Implicit finite volume step and time loop
Residuals of the discrete balance laws and their Gauss-Seidel Picard solution
"""

import logging
import math
from typing import Callable, Iterable, NamedTuple, Optional, Tuple

import numpy as np

from ...exceptions import (
    BlowUpError,
    GridMismatchError,
    NoConvergence,
    PositivityLoss,
    SolverError,
    ThermoDomainError,
)
from ...models import SchemeParams, steps_for
from ..discrete.fields import CellField, Sampler, project_Q
from ..discrete.mesh import Grid
from ..discrete.operators import div_array, double_dot, grad_array, laplace_array
from ..physics.flux import flux_diagonal, flux_divergence_array
from ..physics.thermo import pressure
from .linear import solve_block
from .state import RunHistory, State, StepStats

logger = logging.getLogger(__name__)

Observer = Callable[[int, State, State, Optional[StepStats]], None]

MASS_CORRECTION_WARN = 1e-8


def _check_grid(grid: Grid, params: SchemeParams) -> None:
    if not math.isclose(grid.h, params.h, rel_tol=1e-12):
        raise GridMismatchError(f"flux parameters use h={params.h} but the grid has h={grid.h}")


def initial_state(rho0: Sampler, u0: Sampler, theta0: Sampler, grid: Grid, params: SchemeParams) -> State:
    """Cell means of the initial data"""
    _check_grid(grid, params)
    state = State(rho=project_Q(rho0, grid), u=project_Q(u0, grid), theta=project_Q(theta0, grid), t=0.0)
    if state.u.rank != 1 or state.u.values.shape[0] != grid.d:
        raise ThermoDomainError("initial velocity sampler must return d components")
    if state.rho.min() <= 0:
        raise ThermoDomainError(f"initial density has nonpositive cell mean {state.rho.min()}")
    if state.theta.min() <= 0:
        raise ThermoDomainError(f"initial temperature has nonpositive cell mean {state.theta.min()}")
    return state


def stress_array(gradient: np.ndarray, divergence: np.ndarray, mu: float, lam: float) -> np.ndarray:
    """S = 2 mu D(u) + lam div(u) I"""
    d = gradient.shape[0]
    stress = mu * (gradient + np.swapaxes(gradient, 0, 1))
    for i in range(d):
        stress[i, i] += lam * divergence
    return stress


class Residual(NamedTuple):
    continuity: np.ndarray
    momentum: np.ndarray
    temperature: np.ndarray

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(part))) for part in self)


def assemble_residual(candidate: State, previous: State, params: SchemeParams) -> Residual:
    """
    Per-cell residuals of the three balance laws, already multiplied by |K|

    All spatial terms are evaluated at the candidate; the time derivative is
    the backward difference against the previous state.
    """
    grid = candidate.grid
    if previous.grid != grid:
        raise GridMismatchError("candidate and previous states live on different grids")
    _check_grid(grid, params)

    d, h, dt = grid.d, grid.h, params.dt
    volume = grid.cell_volume
    c_v = params.gas.c_v
    rho, u, theta = candidate.rho.values, candidate.u.values, candidate.theta.values
    rho0, u0, theta0 = previous.rho.values, previous.u.values, previous.theta.values

    p = pressure(rho, theta)
    gradient = grad_array(u, d, h)
    divergence = np.trace(gradient, axis1=0, axis2=1)
    stress = stress_array(gradient, divergence, params.mu, params.lam)

    continuity = (rho - rho0) / dt + flux_divergence_array(rho, u, d, h, params.eps)

    momentum = (rho * u - rho0 * u0) / dt + flux_divergence_array(rho * u, u, d, h, params.eps)
    momentum = momentum + grad_array(p, d, h) - div_array(stress, d, h)
    if params.alpha is not None:
        momentum = momentum - h ** params.alpha * laplace_array(u, d, h)

    temperature = c_v * (rho * theta - rho0 * theta0) / dt
    temperature = temperature + c_v * flux_divergence_array(rho * theta, u, d, h, params.eps)
    temperature = temperature - params.kappa * laplace_array(theta, d, h)
    temperature = temperature - (double_dot(stress, gradient) - p * divergence)

    residual = Residual(volume * continuity, volume * momentum, volume * temperature)
    if not all(np.all(np.isfinite(part)) for part in residual):
        raise BlowUpError("nonfinite residual")
    return residual


def _relative_increment(old: Tuple[np.ndarray, ...], new: Tuple[np.ndarray, ...]) -> float:
    change = sum(float(np.sum((b - a) ** 2)) for a, b in zip(old, new))
    size = sum(float(np.sum(b ** 2)) for b in new)
    return math.sqrt(change / size) if size > 0 else math.sqrt(change)


class PicardSolver:
    """Gauss-Seidel Picard sweeps over the continuity, momentum and temperature blocks"""

    def __init__(self, previous: State, params: SchemeParams):
        self.grid = previous.grid
        _check_grid(self.grid, params)
        self.params = params
        self.previous = previous
        self.d = self.grid.d
        self.h = self.grid.h
        self.dt = params.dt
        self.rho0 = previous.rho.values
        self.u0 = previous.u.values
        self.theta0 = previous.theta.values
        self.tol = params.inner_tolerance()
        self.linear_iterations = 0
        self.mass_correction = 0.0

    def _flux_div(self, r: np.ndarray, u: np.ndarray) -> np.ndarray:
        return flux_divergence_array(r, u, self.d, self.h, self.params.eps)

    def _solve(self, matvec, rhs, guess, diagonal, label) -> np.ndarray:
        solution, iterations = solve_block(
            matvec, rhs, guess, diagonal, self.tol, self.params.linear_maxiter, label
        )
        self.linear_iterations += iterations
        return solution

    def solve_continuity(self, rho: np.ndarray, u: np.ndarray) -> np.ndarray:
        """Density with the velocity frozen, shifted to the previous mass"""
        dt = self.dt
        rho_new = self._solve(
            lambda r: r / dt + self._flux_div(r, u),
            self.rho0 / dt,
            rho,
            1.0 / dt + flux_diagonal(u, self.d, self.h, self.params.eps),
            "continuity",
        )
        mass = float(np.sum(self.rho0))
        shift = (mass - float(np.sum(rho_new))) / rho_new.size
        self.mass_correction = abs(shift) * rho_new.size / mass
        if self.mass_correction > MASS_CORRECTION_WARN:
            logger.warning(f"Continuity solve lost {self.mass_correction:.3e} of the mass; shifted back")
        return rho_new + shift

    def _viscous(self, v: np.ndarray) -> np.ndarray:
        params = self.params
        gradient = grad_array(v, self.d, self.h)
        divergence = np.trace(gradient, axis1=0, axis2=1)
        term = -div_array(stress_array(gradient, divergence, params.mu, params.lam), self.d, self.h)
        if params.alpha is not None:
            term = term - self.h ** params.alpha * laplace_array(v, self.d, self.h)
        return term

    def _acoustic(self, v: np.ndarray, wave: np.ndarray) -> np.ndarray:
        # -dt grad(gamma p div v); cancels against its lagged copy at the fixed point
        return -self.dt * grad_array(wave * div_array(v, self.d, self.h), self.d, self.h)

    def solve_momentum(self, rho: np.ndarray, u_star: np.ndarray, theta: np.ndarray) -> np.ndarray:
        """Velocity from the momentum m = rho u with lagged convective velocity and pressure"""
        params, dt, d, h = self.params, self.dt, self.d, self.h
        p = pressure(rho, theta)
        wave = params.gas.gamma * p

        def apply(m):
            v = m / rho
            return m / dt + self._flux_div(m, u_star) + self._viscous(v) + self._acoustic(v, wave)

        rhs = self.rho0 * self.u0 / dt - grad_array(p, d, h) + self._acoustic(u_star, wave)

        # viscous and acoustic parts act on m / rho
        stiffness = ((d + 1) * params.mu + params.lam) / (2.0 * h * h) + dt * wave / (2.0 * h * h)
        if params.alpha is not None:
            stiffness = stiffness + 2.0 * d * h ** params.alpha / (h * h)
        diagonal = 1.0 / dt + flux_diagonal(u_star, d, h, params.eps) + stiffness / rho
        diagonal = np.broadcast_to(diagonal, u_star.shape)

        momentum = self._solve(apply, rhs, rho * u_star, diagonal, "momentum")
        return momentum / rho

    def solve_temperature(self, rho: np.ndarray, u: np.ndarray, theta: np.ndarray) -> np.ndarray:
        """Temperature from q = rho theta; the pressure work p div u = q div u is implicit"""
        params, dt, d, h = self.params, self.dt, self.d, self.h
        c_v = params.gas.c_v
        gradient = grad_array(u, d, h)
        divergence = np.trace(gradient, axis1=0, axis2=1)
        heating = double_dot(stress_array(gradient, divergence, params.mu, params.lam), gradient)

        def apply(q):
            return (
                c_v * q / dt
                + c_v * self._flux_div(q, u)
                - params.kappa * laplace_array(q / rho, d, h)
                + q * divergence
            )

        diagonal = c_v / dt + c_v * flux_diagonal(u, d, h, params.eps)
        diagonal = diagonal + 2.0 * d * params.kappa / (h * h * rho) + divergence

        q = self._solve(apply, c_v * self.rho0 * self.theta0 / dt + heating, rho * theta, diagonal, "temperature")
        return q / rho

    def solve(self) -> Tuple[State, StepStats]:
        params = self.params
        rho, u, theta = self.rho0.copy(), self.u0.copy(), self.theta0.copy()
        increment = math.inf

        for iteration in range(1, params.picard_max + 1):
            rho_new = self.solve_continuity(rho, u)
            u_new = self.solve_momentum(rho_new, u, theta)
            theta_new = self.solve_temperature(rho_new, u_new, theta)

            if not all(np.all(np.isfinite(v)) for v in (rho_new, u_new, theta_new)):
                logger.error(f"Nonfinite iterate after {iteration} Picard sweeps")
                raise BlowUpError(f"nonfinite iterate after {iteration} Picard sweeps")

            increment = _relative_increment((rho, u, theta), (rho_new, u_new, theta_new))
            rho, u, theta = rho_new, u_new, theta_new
            logger.debug(f"Picard sweep {iteration}: increment {increment:.3e}")
            if increment <= params.picard_tol:
                break
        else:
            logger.error(f"Picard iteration stalled at increment {increment:.3e} after {params.picard_max} sweeps")
            raise NoConvergence(
                f"Picard increment {increment:.3e} above {params.picard_tol:.1e} after "
                f"{params.picard_max} sweeps; consider a smaller dt"
            )

        rho_min, theta_min = float(np.min(rho)), float(np.min(theta))
        if rho_min <= 0 or theta_min <= 0:
            logger.error(f"Converged state lost positivity: min rho={rho_min}, min theta={theta_min}")
            raise PositivityLoss(f"min rho={rho_min}, min theta={theta_min}; tighten the solver tolerances")

        state = State.from_arrays(self.grid, rho, u, theta, t=self.previous.t + params.dt)
        stats = StepStats(
            iterations=iteration,
            increment=increment,
            rho_min=rho_min,
            theta_min=theta_min,
            linear_iterations=self.linear_iterations,
            mass_correction=self.mass_correction,
        )
        return state, stats


def step(previous: State, params: SchemeParams) -> Tuple[State, StepStats]:
    """Advance one implicit step of length params.dt"""
    speed = float(np.max(np.sqrt(np.sum(previous.u.values ** 2, axis=0))))
    if speed > 0 and params.dt > previous.grid.h / speed:
        logger.warning(f"dt={params.dt} exceeds h/max|u|={previous.grid.h / speed:.3e}; Picard may converge slowly")
    return PicardSolver(previous, params).solve()


def run(
    initial: State,
    params: SchemeParams,
    t_end: float,
    observers: Iterable[Observer] = (),
) -> Tuple[State, RunHistory]:
    """
    Apply t_end/dt implicit steps

    Args:
        initial: State at t = 0
        params: Scheme parameters
        t_end: Final time, an integer multiple of params.dt
        observers: Callables invoked as observer(step, previous, current, stats) after every step

    Returns:
        Final state and the run history
    """
    steps = steps_for(t_end, params.dt)
    observers = list(observers)
    history = RunHistory(initial, params)
    logger.info(f"Running {steps} steps on N={initial.grid.N}, d={initial.grid.d}, dt={params.dt}")

    state = initial
    for index in range(1, steps + 1):
        try:
            new_state, stats = step(state, params)
        except SolverError as e:
            e.step = index
            logger.error(f"Run aborted: {e}")
            raise
        history.append(new_state, stats)
        for observer in observers:
            observer(index, state, new_state, stats)
        state = new_state

    return state, history
