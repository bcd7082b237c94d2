"""
Solver state and run records
"""

from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from ...exceptions import FieldShapeError, GridMismatchError
from ...models import SchemeParams
from ..discrete.fields import CellField
from ..discrete.mesh import Grid


class State(BaseModel):
    """Density, velocity and temperature at one time level"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    rho: CellField
    u: CellField
    theta: CellField
    t: float = 0.0

    @model_validator(mode="after")
    def check_fields(self):
        grid = self.rho.grid
        if self.u.grid != grid or self.theta.grid != grid:
            raise GridMismatchError("state fields live on different grids")
        if self.rho.rank != 0 or self.theta.rank != 0:
            raise FieldShapeError("density and temperature must be scalar fields")
        if self.u.rank != 1 or self.u.values.shape[0] != grid.d:
            raise FieldShapeError("velocity must be a d-vector field")
        return self

    @property
    def grid(self) -> Grid:
        return self.rho.grid

    def is_positive(self) -> bool:
        return bool(np.all(self.rho.values > 0) and np.all(self.theta.values > 0))

    @classmethod
    def from_arrays(cls, grid: Grid, rho, u, theta, t: float = 0.0) -> "State":
        return cls(rho=CellField(grid, rho), u=CellField(grid, u), theta=CellField(grid, theta), t=t)

    @classmethod
    def uniform(cls, grid: Grid, rho: float = 1.0, u=None, theta: float = 1.0, t: float = 0.0) -> "State":
        velocity = np.zeros(grid.d) if u is None else np.asarray(u, dtype=float)
        return cls(
            rho=CellField.constant(grid, rho),
            u=CellField.constant(grid, velocity),
            theta=CellField.constant(grid, theta),
            t=t,
        )


class StepStats(BaseModel):
    """Convergence record of one implicit step"""

    iterations: int
    increment: float
    rho_min: float
    theta_min: float
    linear_iterations: int = 0
    # relative mass shift applied after the last continuity solve
    mass_correction: float = 0.0


class RunHistory:
    """States of a run, the initial one first, with the stats of every step"""

    def __init__(self, initial: State, params: SchemeParams):
        self.params = params
        self.states: List[State] = [initial]
        self.stats: List[StepStats] = []

    def append(self, state: State, stats: Optional[StepStats]) -> None:
        self.states.append(state)
        self.stats.append(stats)

    def __len__(self) -> int:
        return len(self.stats)

    @property
    def grid(self) -> Grid:
        return self.states[0].grid

    @property
    def initial(self) -> State:
        return self.states[0]

    @property
    def final(self) -> State:
        return self.states[-1]

    def times(self) -> List[float]:
        return [state.t for state in self.states]

    def state_at(self, t: float) -> State:
        """Stored state at time stamp t"""
        tolerance = 1e-9 * max(1.0, abs(t))
        for state in self.states:
            if abs(state.t - t) <= tolerance:
                return state
        raise GridMismatchError(f"no state stored at t={t}")
