import numpy
import pytest

from fvnsf.models import FluxParams, GasParams, ICPresetName, ICSection, SchemeParams
from fvnsf.plugin.discrete.mesh import build_grid
from fvnsf.plugin.solver.presets import build_preset
from fvnsf.plugin.solver.scheme import initial_state
from fvnsf.plugin.solver.state import State


def make_params(grid, dt=None, eps=0.0, alpha=None, mu=0.1, lam=0.0, kappa=0.01, gamma=1.4, **kwargs):
    return SchemeParams(
        gas=GasParams(gamma=gamma),
        mu=mu,
        lam=lam,
        kappa=kappa,
        flux=FluxParams(eps=eps, h=grid.h),
        dt=grid.h / 2 if dt is None else dt,
        alpha=alpha,
        **kwargs,
    )


def smooth_wave(grid, params, a=0.2, b=0.1, c=0.1):
    preset = build_preset(ICSection(preset=ICPresetName.SMOOTH_WAVE, a=a, b=b, c=c))
    return initial_state(preset.rho, preset.u, preset.theta, grid, params)


def random_state(rng, grid, t=0.0):
    return State.from_arrays(
        grid,
        rng.uniform(0.5, 1.5, size=grid.shape),
        0.3 * rng.standard_normal((grid.d,) + grid.shape),
        rng.uniform(0.5, 1.5, size=grid.shape),
        t=t,
    )


@pytest.fixture
def rng():
    return numpy.random.default_rng(1234)


@pytest.fixture
def grid2():
    return build_grid(2, 8)


@pytest.fixture
def grid3():
    return build_grid(3, 4)


@pytest.fixture
def gas():
    return GasParams(gamma=1.4)
