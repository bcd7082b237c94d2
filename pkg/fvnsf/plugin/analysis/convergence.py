"""
Error norms, grid transfer and convergence studies
Self-convergence against a finer run restricted by exact cell averaging
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from ...config import CONFIG
from ...exceptions import GridMismatchError, SolverError, StudyError
from ...models import RunConfig, SchemeParams, level_dt, steps_for
from ..discrete.fields import CellField, project_Q
from ..discrete.mesh import Grid, build_grid
from ..discrete.operators import grad_array, grad_e_array
from ..physics.thermo import relative_energy
from ..solver.presets import build_preset
from ..solver.scheme import initial_state, run, stress_array
from ..solver.state import RunHistory, State
from .diagnostics import AssumptionWindow

logger = logging.getLogger(__name__)

SURROGATE_NOTE = (
    "errors are measured against a finer numerical run, not the strong solution; "
    "rates are meaningful, constants are not"
)

# t -> (rho, u, theta) samplers of a known solution
ReferenceTrajectory = Callable[[float], Tuple[Callable, Callable, Callable]]


def restrict(fine: CellField, coarse: Grid) -> CellField:
    """Exact mean of the m^d fine children of every coarse cell"""
    grid = fine.grid
    if grid.d != coarse.d or grid.N % coarse.N:
        raise GridMismatchError(f"cannot restrict N={grid.N} to N={coarse.N}: ratio is not an integer")
    ratio = grid.N // coarse.N
    d = grid.d
    lead = fine.values.shape[: fine.values.ndim - d]
    split = lead + sum(((coarse.N, ratio) for _ in range(d)), ())
    child_axes = tuple(len(lead) + 2 * i + 1 for i in range(d))
    return CellField(coarse, fine.values.reshape(split).mean(axis=child_axes))


def restrict_state(state: State, coarse: Grid) -> State:
    return State(
        rho=restrict(state.rho, coarse), u=restrict(state.u, coarse), theta=restrict(state.theta, coarse), t=state.t
    )


class ErrorReport(BaseModel):
    err_rho: float
    err_u: float
    err_theta: float
    err_gradu: float
    err_gradtheta: float
    sup_relenergy: float
    rel_dissipation: float
    h: float
    dt: float
    eps: float
    alpha: Optional[float] = None


def error_norms(history: RunHistory, reference: Sequence[State], params: SchemeParams) -> ErrorReport:
    """
    Errors of a run against reference states at the same time stamps

    L-infinity-in-time norms take the maximum over all stored states; L2-in-time
    norms are step-weighted sums over the steps. Gradients of the reference are
    its discrete gradients on the same grid.
    """
    states = history.states
    if len(reference) != len(states):
        raise GridMismatchError(f"{len(states)} states but {len(reference)} reference states")
    grid = history.grid
    d, h, volume = grid.d, grid.h, grid.cell_volume
    gas, dt = params.gas, params.dt

    err_rho = err_u = err_theta = 0.0
    grad_u_sq = grad_theta_sq = 0.0
    sup_relenergy = 0.0
    dissipation = 0.0

    for index, (state, ref) in enumerate(zip(states, reference)):
        if ref.grid != grid:
            raise GridMismatchError("reference state lives on another grid")
        if abs(ref.t - state.t) > 1e-9 * max(1.0, abs(state.t)):
            raise GridMismatchError(f"time stamps differ: {state.t} vs {ref.t}")

        err_rho = max(err_rho, (state.rho - ref.rho).l2_norm())
        err_u = max(err_u, (state.u - ref.u).l2_norm())
        err_theta = max(err_theta, (state.theta - ref.theta).l2_norm())
        sup_relenergy = max(sup_relenergy, relative_energy(state, ref, gas))
        if index == 0:
            continue

        grad_u = grad_array(state.u.values, d, h)
        grad_ref = grad_array(ref.u.values, d, h)
        grad_u_sq += dt * volume * float(np.sum((grad_u - grad_ref) ** 2))
        grad_theta_sq += dt * volume * float(
            np.sum((grad_e_array(state.theta.values, d, h) - grad_e_array(ref.theta.values, d, h)) ** 2)
        )

        theta, theta_ref = state.theta.values, ref.theta.values
        ratio = theta / theta_ref
        sym = 0.5 * (grad_u + np.swapaxes(grad_u, 0, 1))
        sym_ref = 0.5 * (grad_ref + np.swapaxes(grad_ref, 0, 1))
        div = np.trace(grad_u, axis1=0, axis2=1)
        div_ref = np.trace(grad_ref, axis1=0, axis2=1)
        integrand = 2.0 * params.mu * np.sum((sym - ratio * sym_ref) ** 2, axis=(0, 1))
        integrand = integrand + params.lam * (div - ratio * div_ref) ** 2
        dissipation += dt * volume * float(np.sum(integrand / ratio))

    return ErrorReport(
        err_rho=err_rho,
        err_u=err_u,
        err_theta=err_theta,
        err_gradu=math.sqrt(grad_u_sq),
        err_gradtheta=math.sqrt(grad_theta_sq),
        sup_relenergy=sup_relenergy,
        rel_dissipation=dissipation,
        h=h,
        dt=dt,
        eps=params.eps,
        alpha=params.alpha,
    )


def eoc(errors: Sequence[Tuple[float, float]]) -> List[float]:
    """
    Observed orders between consecutive (h, e) pairs

    Returns:
        One rate per consecutive pair; nan where an error is zero, negative or nonfinite
    """
    if len(errors) < 2:
        raise ValueError("eoc needs at least two (h, e) pairs")
    rates = []
    for (h_coarse, e_coarse), (h_fine, e_fine) in zip(errors, errors[1:]):
        usable = all(math.isfinite(v) and v > 0 for v in (e_coarse, e_fine, h_coarse, h_fine))
        if not usable or h_coarse == h_fine:
            rates.append(math.nan)
            continue
        rates.append(math.log(e_coarse / e_fine) / math.log(h_coarse / h_fine))
    return rates


class StudyRow(BaseModel):
    N: int
    h: float
    dt: float
    report: ErrorReport
    window: AssumptionWindow
    rate_rho: float = math.nan
    rate_u: float = math.nan
    rate_theta: float = math.nan
    rate_gradu: float = math.nan
    rate_gradtheta: float = math.nan


class StudyTable(BaseModel):
    rows: List[StudyRow]
    reference_N: Optional[int] = None
    note: str = SURROGATE_NOTE


def simulate(config: RunConfig, N: int, dt: float) -> Tuple[SchemeParams, RunHistory]:
    """Run the configured initial data on an N-grid with time step dt"""
    grid = build_grid(config.grid.d, N)
    params = config.scheme_params(grid.h, dt)
    preset = build_preset(config.ic)
    start = initial_state(preset.rho, preset.u, preset.theta, grid, params)
    _, history = run(start, params, config.section("time").t_end)
    return params, history


def _analytic_states(trajectory: ReferenceTrajectory, grid: Grid, times: Sequence[float]) -> List[State]:
    states = []
    for t in times:
        rho, u, theta = trajectory(t)
        states.append(State(rho=project_Q(rho, grid), u=project_Q(u, grid), theta=project_Q(theta, grid), t=t))
    return states


def run_study(config: RunConfig, reference: Optional[ReferenceTrajectory] = None) -> StudyTable:
    """
    Convergence study over a doubling chain of grids

    Args:
        config: Configuration with a [study] section
        reference: Optional known solution; otherwise the reference_N run is used

    Returns:
        StudyTable ordered by decreasing h, with pairwise rates and assumption windows
    """
    study = config.section("study")
    t_end = config.section("time").t_end

    reference_history = None
    reference_dt = None
    if reference is None:
        reference_dt = level_dt(study.dt_rule, study.dt_factor, 1.0 / study.reference_N)
        logger.info(f"Reference run N={study.reference_N}, dt={reference_dt}")
        try:
            _, reference_history = simulate(config, study.reference_N, reference_dt)
        except (SolverError, ValueError) as e:
            raise StudyError(str(e), level=study.reference_N) from e

    def level(N: int) -> StudyRow:
        dt = level_dt(study.dt_rule, study.dt_factor, 1.0 / N)
        try:
            steps_for(t_end, dt)
            params, history = simulate(config, N, dt)
        except (SolverError, ValueError) as e:
            logger.error(f"Study level N={N} failed: {e}")
            raise StudyError(str(e), level=N) from e

        if reference_history is None:
            states = _analytic_states(reference, history.grid, history.times())
        else:
            stride = round(dt / reference_dt)
            if abs(stride * reference_dt - dt) > 1e-9 * dt:
                raise StudyError(f"time stamps do not nest: dt={dt}, reference dt={reference_dt}", level=N)
            states = [restrict_state(reference_history.states[k * stride], history.grid) for k in range(len(history) + 1)]

        report = error_norms(history, states, params)
        logger.info(f"Level N={N}: err_rho={report.err_rho:.3e} err_u={report.err_u:.3e} err_theta={report.err_theta:.3e}")
        return StudyRow(N=N, h=1.0 / N, dt=dt, report=report, window=AssumptionWindow.of_history(history))

    with ThreadPoolExecutor(max_workers=max(1, CONFIG.threads)) as pool:
        rows = list(pool.map(level, study.levels))

    for name in ("rho", "u", "theta", "gradu", "gradtheta"):
        rates = eoc([(row.h, getattr(row.report, f"err_{name}")) for row in rows])
        for row, rate in zip(rows[1:], rates):
            setattr(row, f"rate_{name}", rate)

    return StudyTable(rows=rows, reference_N=None if reference else study.reference_N)
