"""
Per-step diagnostics of the discrete solution
Mass, energy balance with its dissipation terms, entropy production and bound monitors
"""

import logging
import math
from typing import List, NamedTuple, Optional

import numpy as np
from pydantic import BaseModel

from ...models import GasParams, SchemeParams
from ..discrete.fields import averages, jumps, shifted, upwind_select
from ..discrete.operators import grad_array, grad_e_array
from ..physics.flux import face_speeds
from ..physics.thermo import entropy, hessian_bounds, hessian_eigenvalues, pressure
from ..solver.scheme import stress_array
from ..solver.state import RunHistory, State, StepStats

logger = logging.getLogger(__name__)


class DiagnosticsRecord(BaseModel):
    """Energy, entropy and range summary of one step"""

    step: int
    t: float
    mass: float
    e_kin: float
    e_int: float
    e_tot: float
    diss_eps: float
    diss_dt: float
    diss_up: float
    diss_alpha: float
    energy_residual: float
    entropy_prod: float
    entropy_kappa: float
    rho_min: float
    rho_max: float
    theta_min: float
    theta_max: float
    s_min: float
    s_max: float
    p_min: float
    p_max: float
    picard_iters: int = 0
    picard_increment: float = 0.0


class EnergyParts(NamedTuple):
    kinetic: float
    internal: float


def energy_parts(state: State, gas: GasParams) -> EnergyParts:
    volume = state.grid.cell_volume
    rho, u, theta = state.rho.values, state.u.values, state.theta.values
    kinetic = 0.5 * volume * float(np.sum(rho * np.sum(u * u, axis=0)))
    internal = gas.c_v * volume * float(np.sum(rho * theta))
    return EnergyParts(kinetic, internal)


def _face_sum(state: State, weight_fn) -> float:
    """sum over faces of |sigma| * weight_fn(axis)"""
    grid = state.grid
    return grid.face_area * sum(float(np.sum(weight_fn(axis))) for axis in range(grid.d))


def dissipation_terms(previous: State, current: State, params: SchemeParams):
    """The four numerical dissipation terms of the discrete energy balance"""
    grid = current.grid
    d, h = grid.d, grid.h
    rho, u = current.rho.values, current.u.values
    squared_jump = [np.sum(jumps(u, d, axis) ** 2, axis=0) for axis in range(d)]

    diss_eps = h ** params.eps * _face_sum(current, lambda axis: averages(rho, d, axis) * squared_jump[axis])

    rate = (u - previous.u.values) / params.dt
    diss_dt = 0.5 * params.dt * grid.cell_volume * float(np.sum(previous.rho.values * np.sum(rate ** 2, axis=0)))

    def upwind_weight(axis):
        speed = face_speeds(u, d, axis)
        rho_up = upwind_select(rho, shifted(rho, d, axis, 1), speed)
        return rho_up * np.abs(speed) * squared_jump[axis]

    diss_up = 0.5 * _face_sum(current, upwind_weight)

    diss_alpha = 0.0
    if params.alpha is not None:
        diss_alpha = h ** params.alpha * grid.cell_volume * float(np.sum(grad_e_array(u, d, h) ** 2))

    return diss_eps, diss_dt, diss_up, diss_alpha


def entropy_production(previous: State, current: State, params: SchemeParams):
    """
    Entropy production with the constant test function

    Returns:
        (total production, conduction part); the conduction part is never positive
    """
    grid = current.grid
    d, h = grid.d, grid.h
    gas = params.gas
    rho, u, theta = current.rho.values, current.u.values, current.theta.values
    volume = grid.cell_volume

    rho_s = rho * entropy(rho, theta, gas)
    rho_s_old = previous.rho.values * entropy(previous.rho.values, previous.theta.values, gas)
    storage = volume * float(np.sum(rho_s - rho_s_old)) / params.dt

    inverse = 1.0 / theta
    kappa_part = params.kappa / h * _face_sum(
        current, lambda axis: jumps(theta, d, axis) * jumps(inverse, d, axis)
    )

    gradient = grad_array(u, d, h)
    divergence = np.trace(gradient, axis1=0, axis2=1)
    stress = stress_array(gradient, divergence, params.mu, params.lam)
    viscous = volume * float(np.sum(np.einsum("ij...,ij...->...", stress, gradient) / theta))

    return storage + kappa_part - viscous, kappa_part


def record(
    previous: State,
    current: State,
    params: SchemeParams,
    stats: Optional[StepStats] = None,
    step: int = 0,
) -> DiagnosticsRecord:
    """Diagnostics of the step previous -> current"""
    gas = params.gas
    rho, theta = current.rho.values, current.theta.values

    now = energy_parts(current, gas)
    before = energy_parts(previous, gas)
    e_tot = now.kinetic + now.internal
    e_tot_before = before.kinetic + before.internal

    diss = dissipation_terms(previous, current, params)
    residual = abs((e_tot - e_tot_before) / params.dt + sum(diss))
    production, kappa_part = entropy_production(previous, current, params)

    s = entropy(rho, theta, gas)
    p = pressure(rho, theta)

    return DiagnosticsRecord(
        step=step,
        t=current.t,
        mass=current.rho.integral(),
        e_kin=now.kinetic,
        e_int=now.internal,
        e_tot=e_tot,
        diss_eps=diss[0],
        diss_dt=diss[1],
        diss_up=diss[2],
        diss_alpha=diss[3],
        energy_residual=residual,
        entropy_prod=production,
        entropy_kappa=kappa_part,
        rho_min=float(np.min(rho)),
        rho_max=float(np.max(rho)),
        theta_min=float(np.min(theta)),
        theta_max=float(np.max(theta)),
        s_min=float(np.min(s)),
        s_max=float(np.max(s)),
        p_min=float(np.min(p)),
        p_max=float(np.max(p)),
        picard_iters=stats.iterations if stats else 0,
        picard_increment=stats.increment if stats else 0.0,
    )


class HessianMargin(NamedTuple):
    lower: float
    upper: float

    @property
    def ok(self) -> bool:
        return self.lower > 0 and self.upper > 0


def hessian_margins(rho, theta, gas: GasParams) -> HessianMargin:
    """min(lambda_1 - lambda_lower) and min(lambda_upper - lambda_2) over the samples"""
    smallest, largest = hessian_eigenvalues(rho, theta, gas)
    bounds = hessian_bounds(rho, theta, gas)
    return HessianMargin(float(np.min(smallest - bounds.lower)), float(np.min(bounds.upper - largest)))


def hessian_bounds_check(state: State, gas: GasParams) -> HessianMargin:
    return hessian_margins(state.rho.values, state.theta.values, gas)


# Assumption window
class ImpliedBounds(NamedTuple):
    p_min: float
    p_max: float
    s_min: float
    s_max: float


class AssumptionWindow(BaseModel):
    """Realised lower and upper bounds of density and temperature"""

    rho_min: float = math.inf
    rho_max: float = -math.inf
    theta_min: float = math.inf
    theta_max: float = -math.inf

    def update(self, state: State) -> None:
        self.rho_min = min(self.rho_min, state.rho.min())
        self.rho_max = max(self.rho_max, state.rho.max())
        self.theta_min = min(self.theta_min, state.theta.min())
        self.theta_max = max(self.theta_max, state.theta.max())

    @classmethod
    def of_history(cls, history: RunHistory) -> "AssumptionWindow":
        window = cls()
        for state in history.states:
            window.update(state)
        return window


def implied_bounds(window: AssumptionWindow, gas: GasParams) -> ImpliedBounds:
    """Pressure and entropy boxes implied by the density and temperature window"""
    return ImpliedBounds(
        p_min=window.rho_min * window.theta_min,
        p_max=window.rho_max * window.theta_max,
        s_min=gas.c_v * math.log(window.theta_min) - math.log(window.rho_max),
        s_max=gas.c_v * math.log(window.theta_max) - math.log(window.rho_min),
    )


def window_violations(state: State, window: AssumptionWindow, gas: GasParams, slack: float = 1e-12) -> int:
    """Number of cells whose pressure or entropy leaves the implied boxes"""
    bounds = implied_bounds(window, gas)
    rho, theta = state.rho.values, state.theta.values
    p = pressure(rho, theta)
    s = entropy(rho, theta, gas)
    outside = (
        (p < bounds.p_min * (1 - slack))
        | (p > bounds.p_max * (1 + slack))
        | (s < bounds.s_min - slack * (1 + abs(bounds.s_min)))
        | (s > bounds.s_max + slack * (1 + abs(bounds.s_max)))
    )
    return int(np.count_nonzero(outside))


class DiagnosticsRecorder:
    """Run observer collecting records every `record_every` steps and the assumption window"""

    def __init__(self, params: SchemeParams, record_every: int = 1):
        self.params = params
        self.record_every = record_every
        self.records: List[DiagnosticsRecord] = []
        self.window = AssumptionWindow()

    def __call__(self, step: int, previous: State, current: State, stats: Optional[StepStats]) -> None:
        if step == 1:
            self.window.update(previous)
        self.window.update(current)
        if step % self.record_every == 0:
            entry = record(previous, current, self.params, stats, step)
            self.records.append(entry)
            logger.debug(
                f"step {step}: e_tot={entry.e_tot:.12g} residual={entry.energy_residual:.3e} "
                f"entropy_prod={entry.entropy_prod:.3e}"
            )


# Uniform bounds behind the error estimate
class UniformBoundsReport(BaseModel):
    velocity_linf_l2: float
    grad_theta_l2l2: float
    stress_l2l2: float
    jump_dissipation: float
    div_identity_defect: float


def uniform_bounds(history: RunHistory, params: SchemeParams) -> UniformBoundsReport:
    """Norms that stay bounded under refinement when the scheme is stable"""
    grid = history.grid
    d, h, volume = grid.d, grid.h, grid.cell_volume
    velocity = max(state.u.l2_norm() for state in history.states)
    grad_theta = stress_sq = jump_sum = 0.0
    defect = 0.0

    for state in history.states[1:]:
        u, theta = state.u.values, state.theta.values
        grad_theta += params.dt * volume * float(np.sum(grad_e_array(theta, d, h) ** 2))
        gradient = grad_array(u, d, h)
        divergence = np.trace(gradient, axis1=0, axis2=1)
        stress = stress_array(gradient, divergence, params.mu, params.lam)
        stress_sq += params.dt * volume * float(np.sum(stress ** 2))
        jump_sum += params.dt * h ** params.eps * grid.face_area * sum(
            float(np.sum(jumps(u, d, axis) ** 2)) for axis in range(d)
        )
        cross = volume * float(np.sum(np.einsum("ij...,ji...->...", gradient, gradient)))
        defect = max(defect, abs(cross - volume * float(np.sum(divergence ** 2))))

    return UniformBoundsReport(
        velocity_linf_l2=velocity,
        grad_theta_l2l2=math.sqrt(grad_theta),
        stress_l2l2=math.sqrt(stress_sq),
        jump_dissipation=jump_sum,
        div_identity_defect=defect,
    )
