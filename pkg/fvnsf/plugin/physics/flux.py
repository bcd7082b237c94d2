"""
Diffusive upwind numerical flux
One kernel transports density, momentum components and thermal energy
"""

import numpy as np

from ...models import FluxParams
from ..discrete.fields import CellField, averages, face_traces, jumps, shifted
from ..discrete.mesh import Face


def upwind_flux(r: CellField, u: CellField, face: Face):
    """<r> <u>.n - 1/2 |<u>.n| [[r]]"""
    traces = face_traces(r, face)
    speed = face_traces(u, face).average[face.axis]
    value = traces.average * speed - 0.5 * abs(speed) * traces.jump
    return float(value) if np.ndim(value) == 0 else value


def diffusive_flux(r: CellField, u: CellField, face: Face, params: FluxParams):
    """Upwind flux minus h^eps [[r]]"""
    penalty = params.h ** params.eps * face_traces(r, face).jump
    value = upwind_flux(r, u, face) - penalty
    return float(value) if np.ndim(value) == 0 else value


def face_speeds(u: np.ndarray, d: int, axis: int) -> np.ndarray:
    """<u>.n on the faces orthogonal to e_axis"""
    return averages(u[axis], d, axis)


def face_flux_array(r: np.ndarray, u: np.ndarray, d: int, axis: int, h: float, eps: float) -> np.ndarray:
    """Flux from K to K + e_axis for every K; r may carry leading component axes"""
    speed = face_speeds(u, d, axis)
    jump = jumps(r, d, axis)
    return averages(r, d, axis) * speed - (0.5 * np.abs(speed) + h ** eps) * jump


def flux_divergence_array(r: np.ndarray, u: np.ndarray, d: int, h: float, eps: float) -> np.ndarray:
    """(1/|K|) sum over the faces of K of |sigma| times the outgoing flux"""
    total = np.zeros_like(r, dtype=float)
    for axis in range(d):
        flux = face_flux_array(r, u, d, axis, h, eps)
        total += (flux - shifted(flux, d, axis, -1)) / h
    return total


def flux_diagonal(u: np.ndarray, d: int, h: float, eps: float) -> np.ndarray:
    """Derivative of the flux divergence at K with respect to r_K"""
    total = np.zeros(u.shape[1:])
    penalty = h ** eps
    for axis in range(d):
        speed = face_speeds(u, d, axis)
        upstream = shifted(speed, d, axis, -1)
        total += (0.5 * (speed + np.abs(speed)) - 0.5 * (upstream - np.abs(upstream)) + 2.0 * penalty) / h
    return total


def flux_divergence(r: CellField, u: CellField, params: FluxParams) -> CellField:
    grid = r.grid
    return CellField(grid, flux_divergence_array(r.values, u.values, grid.d, params.h, params.eps))
