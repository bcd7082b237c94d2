"""
Parameter and configuration models
Validated pydantic records shared by the solver, the analysis tools and the CLI
"""

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .exceptions import ConfigError


# Enums
class ICPresetName(str, Enum):
    CONSTANT = "constant"
    SMOOTH_WAVE = "smooth-wave"
    THERMAL_SPOT = "thermal-spot"


class DtRule(str, Enum):
    LINEAR = "linear"  # dt = factor * h
    QUADRATIC = "quadratic"  # dt = factor * h^2


# Physical and numerical parameters
class GasParams(BaseModel):
    """Perfect gas with p = rho * theta"""

    model_config = ConfigDict(frozen=True)

    gamma: float = Field(1.4, gt=1.0, description="Adiabatic coefficient")

    @property
    def c_v(self) -> float:
        return 1.0 / (self.gamma - 1.0)


class FluxParams(BaseModel):
    """Diffusive upwind flux parameters"""

    model_config = ConfigDict(frozen=True)

    eps: float = Field(0.0, gt=-1.0, lt=1.0, description="Diffusivity exponent")
    h: float = Field(..., gt=0.0, description="Mesh width")


class SchemeParams(BaseModel):
    """Everything one implicit step needs besides the states"""

    model_config = ConfigDict(frozen=True)

    gas: GasParams = GasParams()
    mu: float = Field(..., gt=0.0)
    lam: float = Field(0.0, ge=0.0)
    kappa: float = Field(..., gt=0.0)
    flux: FluxParams
    dt: float = Field(..., gt=0.0)
    alpha: Optional[float] = Field(None, gt=0.0, description="Artificial viscosity exponent, None disables")
    picard_tol: float = Field(1e-10, gt=0.0)
    picard_max: int = Field(200, ge=1)
    linear_tol: float = Field(1e-12, gt=0.0)
    linear_maxiter: int = Field(1000, ge=1)

    @property
    def h(self) -> float:
        return self.flux.h

    @property
    def eps(self) -> float:
        return self.flux.eps

    def inner_tolerance(self) -> float:
        """Krylov tolerance, kept well below the Picard tolerance"""
        return min(self.linear_tol, 0.01 * self.picard_tol)


# Configuration file sections
class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


def _parse_int_list(value):
    if isinstance(value, str):
        return [int(item) for item in value.replace(",", " ").split()]
    return value


def _parse_optional(value):
    if isinstance(value, str) and value.strip().lower() in ("", "none", "off"):
        return None
    return value


class GridSection(_Section):
    d: int = Field(2, description="Dimension, 2 or 3")
    N: int = Field(16, ge=2, description="Cells per axis")

    @field_validator("d")
    @classmethod
    def check_dimension(cls, value: int) -> int:
        if value not in (2, 3):
            raise ValueError("d must be 2 or 3")
        return value


class TimeSection(_Section):
    dt: Optional[float] = Field(None, gt=0.0)
    t_end: float = Field(..., ge=0.0)


class PhysicsSection(_Section):
    gamma: float = Field(1.4, gt=1.0)
    mu: float = Field(0.1, gt=0.0)
    lam: float = Field(0.0, ge=0.0, alias="lambda")
    kappa: float = Field(0.01, gt=0.0)


class SchemeSection(_Section):
    eps: float = Field(0.0, gt=-1.0, lt=1.0)
    alpha: Optional[float] = Field(None, gt=0.0)
    picard_tol: float = Field(1e-10, gt=0.0)
    picard_max: int = Field(200, ge=1)
    linear_tol: float = Field(1e-12, gt=0.0)
    linear_maxiter: int = Field(1000, ge=1)

    parse_alpha = field_validator("alpha", mode="before")(_parse_optional)


class ICSection(_Section):
    preset: ICPresetName = ICPresetName.SMOOTH_WAVE
    a: float = 0.2
    b: float = 0.1
    c: float = 0.1

    @model_validator(mode="after")
    def check_amplitudes(self):
        if abs(self.a) >= 1.0:
            raise ValueError("ic.a must satisfy |a| < 1 to keep the density positive")
        if abs(self.c) >= 1.0:
            raise ValueError("ic.c must satisfy |c| < 1 to keep the temperature positive")
        return self


class OutputSection(_Section):
    directory: Optional[str] = None
    record_every: int = Field(1, ge=1)


class StudySection(_Section):
    levels: List[int]
    reference_N: int = Field(..., ge=2)
    dt_rule: DtRule = DtRule.LINEAR
    dt_factor: float = Field(0.5, gt=0.0)

    parse_levels = field_validator("levels", mode="before")(_parse_int_list)

    @model_validator(mode="after")
    def check_chain(self):
        levels = self.levels
        if len(levels) < 2:
            raise ValueError("study.levels needs at least two levels")
        for coarse, fine in zip(levels, levels[1:]):
            if fine != 2 * coarse:
                raise ValueError(f"study.levels must be a doubling chain, got {coarse} -> {fine}")
        if self.reference_N <= levels[-1] or self.reference_N % levels[-1]:
            raise ValueError("study.reference_N must be a strictly finer multiple of every level")
        return self


class ConsistencySection(_Section):
    levels: List[int]
    dt_rule: DtRule = DtRule.QUADRATIC
    dt_factor: float = Field(1.0, gt=0.0)
    tau: Optional[float] = Field(None, gt=0.0)

    parse_levels = field_validator("levels", mode="before")(_parse_int_list)
    parse_tau = field_validator("tau", mode="before")(_parse_optional)


class CheckSection(_Section):
    seed: Optional[int] = None
    trials: int = Field(100, ge=1)


class RunConfig(_Section):
    """Full configuration file, one model field per INI section"""

    grid: GridSection = GridSection()
    time: Optional[TimeSection] = None
    physics: PhysicsSection = PhysicsSection()
    scheme: SchemeSection = SchemeSection()
    ic: ICSection = ICSection()
    output: OutputSection = OutputSection()
    study: Optional[StudySection] = None
    consistency: Optional[ConsistencySection] = None
    check: Optional[CheckSection] = None

    @model_validator(mode="after")
    def check_step_count(self):
        if self.time is not None and self.time.dt is not None:
            steps_for(self.time.t_end, self.time.dt)
        return self

    def section(self, name: str):
        """A section the current command cannot do without"""
        value = getattr(self, name)
        if value is None:
            raise ConfigError(f"{name}: section required for this command")
        return value

    def scheme_params(self, h: float, dt: float) -> SchemeParams:
        """Build solver parameters for a grid of width h and a time step dt"""
        return SchemeParams(
            gas=GasParams(gamma=self.physics.gamma),
            mu=self.physics.mu,
            lam=self.physics.lam,
            kappa=self.physics.kappa,
            flux=FluxParams(eps=self.scheme.eps, h=h),
            dt=dt,
            alpha=self.scheme.alpha,
            picard_tol=self.scheme.picard_tol,
            picard_max=self.scheme.picard_max,
            linear_tol=self.scheme.linear_tol,
            linear_maxiter=self.scheme.linear_maxiter,
        )


def steps_for(t_end: float, dt: float) -> int:
    """
    Number of time steps covering [0, t_end]

    Args:
        t_end: Final time
        dt: Time step

    Returns:
        Integer step count

    Raises:
        ValueError: t_end is not an integer multiple of dt
    """
    count = round(t_end / dt)
    if abs(count * dt - t_end) > 1e-9 * max(1.0, t_end):
        raise ValueError(f"t_end={t_end} is not an integer multiple of dt={dt}")
    return int(count)


def level_dt(rule: DtRule, factor: float, h: float) -> float:
    """Time step tied to the mesh width by the configured rule"""
    if rule == DtRule.QUADRATIC:
        return factor * h * h
    return factor * h
