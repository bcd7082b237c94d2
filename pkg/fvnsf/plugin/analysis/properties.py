"""
Randomized invariant suite
Dualities, product rule, Laplacian composition, flux telescoping, Hessian bounds
and projection orders on seeded random data
"""

import logging
import math
from typing import Callable, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from ...models import GasParams
from ..discrete import operators
from ..discrete.fields import CellField, averages, jumps, project_Q, project_W
from ..discrete.mesh import Grid, build_grid
from ..physics.flux import flux_divergence_array
from .convergence import eoc
from .diagnostics import hessian_margins

logger = logging.getLogger(__name__)

IDENTITY_TOL = 1e-12
HESSIAN_SAMPLES = 100_000
DECAY_LEVELS = (8, 16, 32, 64)
DECAY_MIN_RATE = 0.9
DEFAULT_GRIDS = ((2, 8), (3, 4))


class PropertyResult(BaseModel):
    name: str
    passed: bool
    worst: float
    threshold: float

    def line(self) -> str:
        mark = "✅ PASS" if self.passed else "❌ FAIL"
        return f"{mark}  {self.name:<24} worst={self.worst:.3e} threshold={self.threshold:.1e}"


def _relative(residual: float, scale: float) -> float:
    return abs(residual) / scale if scale > 0 else abs(residual)


def _random_cell(rng: np.random.Generator, grid: Grid, components: Tuple[int, ...] = ()) -> np.ndarray:
    return rng.standard_normal(components + grid.shape)


def check_grad_div_duality(rng, grid: Grid) -> float:
    """int r div_h v + int grad_h r . v = 0"""
    r = CellField(grid, _random_cell(rng, grid))
    v = CellField(grid, _random_cell(rng, grid, (grid.d,)))
    grad_r = operators.grad_h(r).values
    lhs = (r * operators.div_h(v)).integral()
    rhs = grid.cell_volume * float(np.sum(grad_r * v.values))
    scale = grid.cell_volume * float(np.sum(np.abs(r.values)) * np.max(np.abs(v.values))) / grid.h
    return _relative(lhs + rhs, scale)


def check_laplace_duality(rng, grid: Grid) -> float:
    """int lap r f = -int grad_E r . grad_E f = int r lap f"""
    r = CellField(grid, _random_cell(rng, grid))
    f = CellField(grid, _random_cell(rng, grid))
    first = (operators.laplace_h(r) * f).integral()
    middle = -(operators.grad_E(r) * operators.grad_E(f)).integral()
    last = (r * operators.laplace_h(f)).integral()
    scale = grid.cell_volume * float(np.sum(np.abs(r.values)) * np.max(np.abs(f.values))) / grid.h ** 2
    return max(_relative(first - middle, scale), _relative(last - middle, scale))


def _separable_field(rng, d: int):
    """
    phi_i = sin(2 pi k x_i + c) * prod_{j != i} q_ij(x_j) with quadratic q_ij

    Face means are exact under the Gauss rule and cell integrals of div phi have closed form.
    """
    waves = rng.integers(1, 3, size=d)
    phases = rng.uniform(0, 2 * math.pi, size=d)
    coeffs = rng.uniform(-1, 1, size=(d, d, 3))

    def quad(i, j, x):
        a, b, c = coeffs[i, j]
        return 1.0 + a * x + b * x * x + 0.1 * c

    def quad_integral(i, j, lo, hi):
        a, b, c = coeffs[i, j]
        return (1.0 + 0.1 * c) * (hi - lo) + a * (hi ** 2 - lo ** 2) / 2 + b * (hi ** 3 - lo ** 3) / 3

    def along(i, x):
        return np.sin(2 * math.pi * waves[i] * x + phases[i])

    def sampler(x):
        out = np.empty(x.shape)
        for i in range(d):
            term = along(i, x[i])
            for j in range(d):
                if j != i:
                    term = term * quad(i, j, x[j])
            out[i] = term
        return out

    def div_cell_integrals(grid: Grid) -> np.ndarray:
        h = grid.h
        lower = grid.cell_centers() - 0.5 * h
        total = np.zeros(grid.shape)
        for i in range(d):
            term = along(i, lower[i] + h) - along(i, lower[i])
            for j in range(d):
                if j != i:
                    term = term * quad_integral(i, j, lower[j], lower[j] + h)
            total += term
        return total

    return sampler, div_cell_integrals


def check_face_duality(rng, grid: Grid) -> float:
    """int r div phi = -int grad_E r . Pi_W phi"""
    sampler, div_cell_integrals = _separable_field(rng, grid.d)
    r = CellField(grid, _random_cell(rng, grid))
    lhs = float(np.sum(r.values * div_cell_integrals(grid)))
    rhs = -(operators.grad_E(r) * project_W(sampler, grid)).integral()
    scale = grid.cell_volume * float(np.sum(np.abs(r.values))) / grid.h
    return _relative(lhs - rhs, scale)


def check_product_rule(rng, grid: Grid) -> float:
    """[[fg]] = [[f]]<g> + <f>[[g]] on every face"""
    f = _random_cell(rng, grid)
    g = _random_cell(rng, grid)
    worst = 0.0
    for axis in range(grid.d):
        lhs = jumps(f * g, grid.d, axis)
        rhs = jumps(f, grid.d, axis) * averages(g, grid.d, axis) + averages(f, grid.d, axis) * jumps(g, grid.d, axis)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))) / (1.0 + float(np.max(np.abs(lhs)))))
    return worst


def check_laplace_composition(rng, grid: Grid) -> float:
    """Compact Laplacian equals the face divergence of grad_E"""
    r = CellField(grid, _random_cell(rng, grid))
    direct = operators.laplace_h(r).values
    composed = operators.face_div(operators.grad_E(r)).values
    return float(np.max(np.abs(direct - composed))) * grid.h ** 2 / (1.0 + float(np.max(np.abs(r.values))))


def check_flux_telescoping(rng, grid: Grid) -> float:
    """Flux divergences sum to zero over the torus"""
    r = rng.uniform(0.5, 2.0, size=grid.shape)
    u = _random_cell(rng, grid, (grid.d,))
    eps = float(rng.uniform(-0.9, 0.9))
    divergence = flux_divergence_array(r, u, grid.d, grid.h, eps)
    scale = float(np.sum(np.abs(divergence))) + 1.0
    return _relative(float(np.sum(divergence)), scale)


def check_hessian_bounds(rng) -> float:
    """Negative margin of the worst sample; below zero means every eigenvalue is strictly inside"""
    rho = rng.uniform(0.1, 10.0, size=HESSIAN_SAMPLES)
    theta = rng.uniform(0.1, 10.0, size=HESSIAN_SAMPLES)
    worst = math.inf
    for gamma in (1.4, 5.0 / 3.0, 1.1):
        margin = hessian_margins(rho, theta, GasParams(gamma=gamma))
        worst = min(worst, margin.lower, margin.upper)
    return -worst


def _dual_sample_points(grid: Grid, axis: int) -> List[np.ndarray]:
    h = grid.h
    center = grid.face_centers(axis)
    points = [center]
    for offset in (-0.5 * h, 0.5 * h):
        for other in range(grid.d):
            moved = center.copy()
            moved[other] += offset
            points.append(moved)
    return points


def projection_rates(levels: Sequence[int] = DECAY_LEVELS) -> Tuple[float, float]:
    """Smallest observed rates of the face projection and of grad_E applied to the cell projection"""
    two_pi = 2 * math.pi

    def vector(x):
        return np.stack([np.sin(two_pi * x[i]) * np.cos(two_pi * x[(i + 1) % len(x)]) for i in range(len(x))])

    def scalar(x):
        return np.sin(two_pi * x[0])

    def scalar_grad(x):
        grad = np.zeros(x.shape)
        grad[0] = two_pi * np.cos(two_pi * x[0])
        return grad

    w_errors, e_errors = [], []
    for N in levels:
        grid = build_grid(2, N)
        face_means = project_W(vector, grid).values
        grad_e = operators.grad_E(project_Q(scalar, grid)).values
        w_worst = e_worst = 0.0
        for axis in range(grid.d):
            for point in _dual_sample_points(grid, axis):
                w_worst = max(w_worst, float(np.max(np.abs(vector(point)[axis] - face_means[axis]))))
                e_worst = max(e_worst, float(np.max(np.abs(scalar_grad(point)[axis] - grad_e[axis]))))
        w_errors.append((grid.h, w_worst))
        e_errors.append((grid.h, e_worst))
    return min(eoc(w_errors)), min(eoc(e_errors))


def run_property_suite(
    seed: int,
    trials: int = 100,
    grids: Sequence[Tuple[int, int]] = DEFAULT_GRIDS,
) -> List[PropertyResult]:
    """
    Evaluate every property on seeded random data

    Args:
        seed: Seed of numpy's default generator
        trials: Random draws per property and grid
        grids: (d, N) pairs to test on

    Returns:
        One result per property, in a fixed order
    """
    rng = np.random.default_rng(seed)
    identity_checks: List[Tuple[str, Callable]] = [
        ("duality_grad_div", check_grad_div_duality),
        ("duality_laplace", check_laplace_duality),
        ("duality_face", check_face_duality),
        ("product_rule", check_product_rule),
        ("laplace_composition", check_laplace_composition),
        ("flux_telescoping", check_flux_telescoping),
    ]

    results = []
    built = [build_grid(d, N) for d, N in grids]
    for name, check in identity_checks:
        worst = 0.0
        for grid in built:
            for _ in range(trials):
                worst = max(worst, check(rng, grid))
        results.append(PropertyResult(name=name, passed=worst <= IDENTITY_TOL, worst=worst, threshold=IDENTITY_TOL))

    hessian = check_hessian_bounds(rng)
    results.append(PropertyResult(name="hessian_bounds", passed=hessian < 0, worst=hessian, threshold=0.0))

    w_rate, e_rate = projection_rates()
    results.append(
        PropertyResult(name="projection_face_order", passed=w_rate >= DECAY_MIN_RATE, worst=w_rate, threshold=DECAY_MIN_RATE)
    )
    results.append(
        PropertyResult(name="projection_grad_order", passed=e_rate >= DECAY_MIN_RATE, worst=e_rate, threshold=DECAY_MIN_RATE)
    )

    for result in results:
        logger.debug(result.line())
    return results
