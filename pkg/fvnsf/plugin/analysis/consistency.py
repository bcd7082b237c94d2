"""
Consistency defects of the discrete solution
Tests the stored run against smooth space-time functions in the weak formulations
of the mass, momentum and entropy balances
"""

import logging
import math
from typing import Callable, List, Optional, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from pydantic import BaseModel, ConfigDict

from ...models import SchemeParams, steps_for
from ..discrete.fields import box_average, jumps
from ..discrete.operators import grad_array
from ..physics.thermo import entropy, pressure
from ..solver.scheme import stress_array
from ..solver.state import RunHistory

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
TIME_NODES, TIME_WEIGHTS = leggauss(3)

SpaceTimeSampler = Callable[[float, np.ndarray], np.ndarray]


class SpaceTimeFunction(BaseModel):
    """Smooth scalar test function with its time derivative and spatial gradient"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    name: str
    value: SpaceTimeSampler
    dt: SpaceTimeSampler
    grad: SpaceTimeSampler
    nonnegative: bool = False


class ConsistencyReport(BaseModel):
    name: str
    N: int
    h: float
    dt: float
    eps: float
    tau: float
    e_rho: float
    e_m: List[float]
    e_m_norm: float
    e_s_signed: Optional[float] = None  # >= 0 means the entropy inequality holds


def trig_product(
    name: str,
    wavenumbers: Sequence[int],
    kinds: Sequence[str],
    offset: float = 0.0,
    amplitude: float = 1.0,
    growth: float = 0.0,
) -> SpaceTimeFunction:
    """
    (1 + growth t) (offset + amplitude prod_i f_i(2 pi k_i x_i)) with f_i in {sin, cos}

    Axes beyond len(wavenumbers) do not enter the product.
    """
    ks = [TWO_PI * k for k in wavenumbers]

    def factors(x):
        out = []
        for axis, (k, kind) in enumerate(zip(ks, kinds)):
            arg = k * x[axis]
            if kind == "sin":
                out.append((np.sin(arg), k * np.cos(arg)))
            else:
                out.append((np.cos(arg), -k * np.sin(arg)))
        return out

    def spatial(x):
        product = np.ones(x.shape[1:])
        for value, _ in factors(x):
            product = product * value
        return offset + amplitude * product

    def value(t, x):
        return (1.0 + growth * t) * spatial(x)

    def time_derivative(t, x):
        return growth * spatial(x)

    def gradient(t, x):
        parts = factors(x)
        grad = np.zeros(x.shape)
        for axis in range(len(parts)):
            term = np.full(x.shape[1:], amplitude)
            for other, (val, deriv) in enumerate(parts):
                term = term * (deriv if other == axis else val)
            grad[axis] = term
        return (1.0 + growth * t) * grad

    lowest = offset - abs(amplitude)
    return SpaceTimeFunction(
        name=name, value=value, dt=time_derivative, grad=gradient, nonnegative=lowest >= 0.0 and growth >= 0.0
    )


def builtin_test_functions() -> List[SpaceTimeFunction]:
    """Constant one and low-wavenumber sine/cosine products"""
    return [
        trig_product("one", [], [], offset=1.0, amplitude=0.0),
        trig_product("sin1", [1], ["sin"], growth=1.0),
        trig_product("sin1cos2", [1, 2], ["sin", "cos"]),
        trig_product("cos2cos1", [2, 1], ["cos", "cos"], growth=1.0),
        trig_product("bump", [1, 1], ["cos", "sin"], offset=1.0, amplitude=0.5, growth=1.0),
    ]


def _time_integral(sampler: SpaceTimeSampler, t0: float, t1: float):
    half = 0.5 * (t1 - t0)
    mid = 0.5 * (t1 + t0)

    def integrated(x):
        total = 0.0
        for node, weight in zip(TIME_NODES, TIME_WEIGHTS):
            total = total + weight * half * np.asarray(sampler(mid + half * node, x), dtype=float)
        return total

    return integrated


def _check_nonnegative(phi: SpaceTimeFunction, grid, times: Sequence[float]) -> None:
    centers = grid.cell_centers()
    for t in times:
        for shift in (-0.5, 0.0, 0.5):
            sample = np.asarray(phi.value(t, centers + shift * grid.h), dtype=float)
            if np.min(sample) < -1e-14:
                raise ValueError(f"test function {phi.name} is negative; the entropy defect needs phi >= 0")


def consistency_residuals(
    history: RunHistory,
    phi: SpaceTimeFunction,
    params: SchemeParams,
    tau: float,
    with_entropy: Optional[bool] = None,
) -> ConsistencyReport:
    """
    Weak-form defects e_rho, e_m (for phi e_j, j = 1..d) and the signed entropy defect

    The state of step k is held on (t_{k-1}, t_k]; time integrals over a step use
    3-point Gauss-Legendre, the time derivative of phi is integrated exactly.
    """
    steps = steps_for(tau, params.dt)
    if steps > len(history):
        raise ValueError(f"tau={tau} lies beyond the {len(history)} stored steps")
    with_entropy = phi.nonnegative if with_entropy is None else with_entropy

    grid = history.grid
    d, h, volume, dt = grid.d, grid.h, grid.cell_volume, params.dt
    gas, kappa = params.gas, params.kappa
    cell_widths = [0.5 * h] * d
    centers = grid.cell_centers()
    times = [k * dt for k in range(steps + 1)]

    if with_entropy:
        _check_nonnegative(phi, grid, times)

    def cell_mean(sampler):
        return box_average(sampler, centers, cell_widths)

    means = [cell_mean(lambda x, t=t: phi.value(t, x)) for t in times]

    first, last = history.states[0], history.states[steps]
    momentum_first = first.rho.values * first.u.values
    momentum_last = last.rho.values * last.u.values

    e_rho = volume * float(np.sum(last.rho.values * means[-1] - first.rho.values * means[0]))
    e_m = volume * np.sum(momentum_last * means[-1] - momentum_first * means[0], axis=tuple(range(1, d + 1)))
    e_s = None
    if with_entropy:
        rho_s_first = first.rho.values * entropy(first.rho.values, first.theta.values, gas)
        rho_s_last = last.rho.values * entropy(last.rho.values, last.theta.values, gas)
        e_s = volume * float(np.sum(rho_s_last * means[-1] - rho_s_first * means[0]))

    for k in range(1, steps + 1):
        state = history.states[k]
        rho, u, theta = state.rho.values, state.u.values, state.theta.values
        change = means[k] - means[k - 1]
        grad_integral = cell_mean(_time_integral(phi.grad, times[k - 1], times[k]))  # (d, *cells)
        transport = np.sum(u * grad_integral, axis=0)

        e_rho -= volume * float(np.sum(rho * change + rho * transport))

        gradient = grad_array(u, d, h)
        divergence = np.trace(gradient, axis1=0, axis2=1)
        stress = stress_array(gradient, divergence, params.mu, params.lam)
        p = pressure(rho, theta)
        momentum = rho * u
        for j in range(d):
            integrand = (
                momentum[j] * change
                + momentum[j] * transport
                + p * grad_integral[j]
                - np.sum(stress[j] * grad_integral, axis=0)
            )
            e_m[j] -= volume * float(np.sum(integrand))

        if with_entropy:
            rho_s = rho * entropy(rho, theta, gas)
            value_integral = _time_integral(phi.value, times[k - 1], times[k])
            heating = np.einsum("ij...,ij...->...", stress, gradient) / theta
            e_s -= volume * float(
                np.sum(rho_s * change + rho_s * transport + heating * cell_mean(value_integral))
            )
            e_s -= _conduction_terms(grid, theta, kappa, value_integral, _time_integral(phi.grad, times[k - 1], times[k]))

    e_m = [float(value) for value in e_m]
    report = ConsistencyReport(
        name=phi.name,
        N=grid.N,
        h=h,
        dt=dt,
        eps=params.eps,
        tau=tau,
        e_rho=e_rho,
        e_m=e_m,
        e_m_norm=math.sqrt(sum(value * value for value in e_m)),
        e_s_signed=e_s,
    )
    logger.debug(f"Consistency of {phi.name} on N={grid.N}: e_rho={e_rho:.3e} e_s={e_s}")
    return report


def _conduction_terms(grid, theta: np.ndarray, kappa: float, value_integral, grad_integral) -> float:
    """
    Heat-flux terms of the entropy defect on the dual cells

    kappa phi |grad_E theta|^2 / (theta_in theta_out) minus kappa grad_E theta . grad phi / theta,
    the latter with the temperature of the half cell it is integrated over.
    """
    d, h = grid.d, grid.h
    half_volume = 0.5 * grid.cell_volume
    centers = grid.cell_centers()
    total = 0.0
    for axis in range(d):
        widths = [0.5 * h] * d
        widths[axis] = 0.25 * h
        inner_centers = centers.copy()
        inner_centers[axis] += 0.25 * h
        outer_centers = centers.copy()
        outer_centers[axis] += 0.75 * h

        theta_out = np.roll(theta, -1, axis=axis)
        slope = jumps(theta, d, axis) / h

        phi_inner = box_average(value_integral, inner_centers, widths)
        phi_outer = box_average(value_integral, outer_centers, widths)
        grad_inner = box_average(grad_integral, inner_centers, widths)[axis]
        grad_outer = box_average(grad_integral, outer_centers, widths)[axis]

        production = kappa * slope ** 2 / (theta * theta_out) * (phi_inner + phi_outer)
        flux = kappa * slope * (grad_inner / theta + grad_outer / theta_out)
        total += half_volume * float(np.sum(production - flux))
    return total
