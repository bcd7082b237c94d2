"""
Perfect gas thermodynamics
Pressure, entropy, entropy Hessian bounds, ballistic free energy and relative energy
"""

import logging
from typing import NamedTuple

import numpy as np

from ...exceptions import GridMismatchError, ThermoDomainError
from ...models import GasParams

logger = logging.getLogger(__name__)

# Below this distance from 1 the log-convexity gaps are evaluated by their Taylor series.
_SERIES_RADIUS = 1e-4


def _check_positive(**values) -> None:
    for name, value in values.items():
        if np.any(~(np.asarray(value) > 0)):
            raise ThermoDomainError(f"{name} must be positive")


def pressure(rho, theta):
    """rho * theta, clamped to 0 where theta <= 0"""
    rho = np.asarray(rho, dtype=float)
    theta = np.asarray(theta, dtype=float)
    p = np.where(theta > 0, rho * theta, 0.0)
    return float(p) if p.ndim == 0 else p


def entropy(rho, theta, gas: GasParams):
    """Specific entropy c_v log(theta) - log(rho)"""
    _check_positive(rho=rho, theta=theta)
    s = gas.c_v * np.log(theta) - np.log(rho)
    return float(s) if np.ndim(s) == 0 else s


def entropy_hessian(rho, theta, gas: GasParams) -> np.ndarray:
    """Hessian of -rho*s in (rho, p) coordinates expressed through (rho, theta); shape (..., 2, 2)"""
    _check_positive(rho=rho, theta=theta)
    rho = np.asarray(rho, dtype=float)
    theta = np.asarray(theta, dtype=float)
    c_v = gas.c_v
    off = -c_v / (rho * theta)
    return np.stack(
        [
            np.stack([(1.0 + c_v) / rho, off], axis=-1),
            np.stack([off, c_v / (rho * theta ** 2)], axis=-1),
        ],
        axis=-2,
    )


class HessianBounds(NamedTuple):
    lower: np.ndarray
    upper: np.ndarray


def hessian_bounds(rho, theta, gas: GasParams) -> HessianBounds:
    _check_positive(rho=rho, theta=theta)
    rho = np.asarray(rho, dtype=float)
    theta = np.asarray(theta, dtype=float)
    c_v = gas.c_v
    lower = np.minimum(1.0 / ((2.0 + c_v) * rho), c_v / ((2.0 + c_v) * rho * theta ** 2))
    upper = (c_v + (1.0 + c_v) * theta ** 2) / (rho * theta ** 2)
    return HessianBounds(lower, upper)


def hessian_eigenvalues(rho, theta, gas: GasParams):
    """
    Closed-form eigenvalues of the entropy Hessian

    Returns:
        (smallest, largest); the smallest is det/largest to avoid cancellation
    """
    _check_positive(rho=rho, theta=theta)
    rho = np.asarray(rho, dtype=float)
    theta = np.asarray(theta, dtype=float)
    c_v = gas.c_v
    a = (1.0 + c_v) / rho
    c = c_v / (rho * theta ** 2)
    b = -c_v / (rho * theta)
    half_trace = 0.5 * (a + c)
    det = a * c - b * b
    largest = half_trace + np.sqrt(0.25 * (a - c) ** 2 + b * b)
    return det / largest, largest


def ballistic_energy(rho, theta, theta_ref, gas: GasParams):
    """H(rho, theta) = rho (c_v theta - theta_ref s(rho, theta))"""
    return rho * (gas.c_v * theta - theta_ref * entropy(rho, theta, gas))


def ballistic_energy_drho(rho, theta, theta_ref, gas: GasParams):
    """dH/drho = c_v theta - theta_ref (s - 1)"""
    return gas.c_v * theta - theta_ref * (entropy(rho, theta, gas) - 1.0)


def _log_gap(x):
    """x - 1 - log x >= 0"""
    y = np.asarray(x, dtype=float) - 1.0
    series = y * y * (0.5 - y * (1.0 / 3.0 - 0.25 * y))
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = y - np.log1p(y)
    return np.where(np.abs(y) < _SERIES_RADIUS, series, direct)


def _entropy_gap(z):
    """z log z - z + 1 >= 0"""
    w = np.asarray(z, dtype=float) - 1.0
    series = w * w * (0.5 - w * (1.0 / 6.0 - w / 12.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = (1.0 + w) * np.log1p(w) - w
    return np.where(np.abs(w) < _SERIES_RADIUS, series, direct)


def relative_energy_density(rho, u, theta, rho_ref, u_ref, theta_ref, gas: GasParams) -> np.ndarray:
    """
    Per-cell integrand of the relative energy

    The thermal part E(rho, theta | rho_ref, theta_ref) is evaluated in the
    equivalent form rho c_v theta_ref (x - 1 - log x) + theta_ref rho_ref (z log z - z + 1)
    with x = theta/theta_ref and z = rho/rho_ref, which is nonnegative term by term.
    """
    _check_positive(rho=rho, theta=theta, rho_ref=rho_ref, theta_ref=theta_ref)
    kinetic = 0.5 * rho * np.sum((u - u_ref) ** 2, axis=0)
    thermal = rho * gas.c_v * theta_ref * _log_gap(theta / theta_ref)
    thermal = thermal + theta_ref * rho_ref * _entropy_gap(rho / rho_ref)
    return kinetic + thermal


def relative_energy(state, reference, gas: GasParams) -> float:
    """Integral of the relative energy density between a state and a reference state"""
    if state.grid != reference.grid:
        raise GridMismatchError("relative energy needs both states on the same grid")
    density = relative_energy_density(
        state.rho.values, state.u.values, state.theta.values,
        reference.rho.values, reference.u.values, reference.theta.values,
        gas,
    )
    return float(state.grid.cell_volume * np.sum(density))
