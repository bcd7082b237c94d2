"""
Closed-form initial data
"""

from typing import Callable, NamedTuple

import numpy as np

from ...models import ICPresetName, ICSection

TWO_PI = 2.0 * np.pi


class ICPreset(NamedTuple):
    name: ICPresetName
    rho: Callable[[np.ndarray], np.ndarray]
    u: Callable[[np.ndarray], np.ndarray]
    theta: Callable[[np.ndarray], np.ndarray]


def _ones(x: np.ndarray) -> np.ndarray:
    return np.ones(x.shape[1:])


def _still(x: np.ndarray) -> np.ndarray:
    return np.zeros(x.shape)


def build_preset(section: ICSection) -> ICPreset:
    """Samplers of the configured preset with its amplitudes"""
    a, b, c = section.a, section.b, section.c

    if section.preset == ICPresetName.CONSTANT:
        return ICPreset(section.preset, _ones, _still, _ones)

    if section.preset == ICPresetName.SMOOTH_WAVE:
        def rho(x):
            return 1.0 + a * np.sin(TWO_PI * x[0])

        def u(x):
            velocity = np.zeros(x.shape)
            velocity[0] = b * np.sin(TWO_PI * x[1])
            velocity[1] = b * np.sin(TWO_PI * x[0])
            return velocity

        def theta(x):
            return 1.0 + c * np.cos(TWO_PI * x[0])

        return ICPreset(section.preset, rho, u, theta)

    def spot(x):
        return 1.0 + c * np.prod(np.cos(np.pi * x) ** 2, axis=0)

    return ICPreset(section.preset, _ones, _still, spot)
