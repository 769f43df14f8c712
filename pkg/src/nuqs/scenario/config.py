"""Scenario recipes

A recipe is a YAML mapping validated into :class:`ScenarioConfig`. Dotted ``key=value``
overrides (values parsed as YAML) are applied on top of the file before validation.
Anything left unset falls back to the defaults of the scenario kind, see
:meth:`ScenarioConfig.resolved_grid` and friends.
"""

__all__ = [
    "ScenarioKind",
    "OutputFormat",
    "XKind",
    "ParamsConfig",
    "GridConfig",
    "ScenarioConfig",
    "RuntimeSettings",
    "apply_overrides",
    "load_config",
]

import logging
import math
import os
from enum import auto
from pathlib import Path
from typing import Any, Literal, Optional, Sequence, Union

import numpy as np
import yaml
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)
from pydantic_settings import BaseSettings, SettingsConfigDict

from nuqs import configs
from nuqs.oscillation.constant import (
    DEFAULT_MATTER_ENERGY_GEV,
    DEFAULT_MIXING_DEG,
    DEFAULT_POTENTIALS_EV,
    DEFAULT_SPLITTINGS_EV2,
    DUNE_BASELINE_KM,
    ApproxForm,
    Backend,
    CustomNamingEnum,
    Flavor,
    MatterMode,
    PotentialConvention,
)
from nuqs.oscillation.functional import OscParams
from nuqs.utils.exceptions import ConfigError

# config logger
logger = logging.getLogger(__name__)


class ScenarioKind(CustomNamingEnum):
    VACUUM_SWEEP = auto()
    MATTER_SWEEP = auto()
    DUNE_CP_SCAN = auto()
    DUNE_MATTER_COMPARE = auto()
    CIRCUIT_VALIDATE = auto()
    READOUT_DEMO = auto()


class OutputFormat(CustomNamingEnum):
    CSV = auto()
    JSON = auto()


class XKind(CustomNamingEnum):
    """Sweep axis: ``L/E`` in km/GeV or ``E`` in GeV"""

    L_OVER_E = auto()
    ENERGY = auto()


def _enum_field(enum_cls, value):
    if value is None or isinstance(value, enum_cls):
        return value
    try:
        return enum_cls.from_name(value)
    except ValueError as error:
        raise ValueError(str(error)) from error


class ParamsConfig(BaseModel):
    """Oscillation parameters as written in recipes (angles in degrees)"""

    model_config = ConfigDict(extra="forbid")

    theta12_deg: float = DEFAULT_MIXING_DEG["theta12"]
    theta13_deg: float = DEFAULT_MIXING_DEG["theta13"]
    theta23_deg: float = DEFAULT_MIXING_DEG["theta23"]
    delta_deg: float = DEFAULT_MIXING_DEG["delta"]
    dm2_21: float = DEFAULT_SPLITTINGS_EV2["dm2_21"]
    dm2_31: float = DEFAULT_SPLITTINGS_EV2["dm2_31"]

    @field_validator("*")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("must be finite")
        return value

    def to_osc_params(self) -> OscParams:
        return OscParams.from_degrees(
            theta12=self.theta12_deg,
            theta13=self.theta13_deg,
            theta23=self.theta23_deg,
            delta=self.delta_deg,
            dm2_21=self.dm2_21,
            dm2_31=self.dm2_31,
        )


class GridConfig(BaseModel):
    """Evenly spaced sweep axis including both ends"""

    model_config = ConfigDict(extra="forbid")

    min: float
    max: float
    steps: int = Field(ge=2)

    @model_validator(mode="after")
    def _ordered(self) -> "GridConfig":
        if not (math.isfinite(self.min) and math.isfinite(self.max)):
            raise ValueError("grid bounds must be finite")
        if not self.min < self.max:
            raise ValueError(f"grid needs min < max, got {self.min} >= {self.max}")
        return self

    def values(self) -> list[float]:
        return [float(x) for x in np.linspace(self.min, self.max, self.steps)]


_DEFAULT_GRIDS = {
    XKind.L_OVER_E: GridConfig(min=0.0, max=1600.0, steps=200),
    XKind.ENERGY: GridConfig(min=0.5, max=8.0, steps=200),
}

_DEFAULT_DELTAS_RAD = {
    "vacuum-sweep": [0.0],
    "matter-sweep": [0.0],
    "dune-cp-scan": [0.0, math.pi / 2, math.pi, -math.pi / 2],
    "dune-matter-compare": [0.0, -math.pi / 2],
    "readout-demo": [0.0],
}

_DEFAULT_POTENTIALS_EV = {
    "matter-sweep": list(DEFAULT_POTENTIALS_EV),
    "dune-matter-compare": [0.0, 1.0e-4],
}


_NAMED_ENUMS = {
    "scenario": ScenarioKind,
    "backend": Backend,
    "potential_convention": PotentialConvention,
    "approx_form": ApproxForm,
    "output_format": OutputFormat,
}


class ScenarioConfig(BaseModel):
    """Everything a scenario run depends on

    Optional fields left as ``None`` take the defaults of the scenario kind.
    """

    model_config = ConfigDict(extra="forbid")

    scenario: ScenarioKind
    params: ParamsConfig = Field(default_factory=ParamsConfig)
    grid: Optional[GridConfig] = None
    initial_flavors: Optional[list[Flavor]] = None
    potentials_ev: Optional[list[float]] = None
    deltas_deg: Optional[list[float]] = None
    deltas_rad: Optional[list[float]] = None
    baseline_km: float = Field(default=DUNE_BASELINE_KM, gt=0)
    energy_gev: float = Field(default=DEFAULT_MATTER_ENERGY_GEV, gt=0)
    backend: Backend = Backend.CLOSED_FORM
    matter_modes: list[MatterMode] = Field(default_factory=lambda: [MatterMode.APPROX])
    potential_convention: PotentialConvention = PotentialConvention.OPERATIONAL
    approx_form: ApproxForm = ApproxForm.CORRECTED
    phi_ab_policy: Union[Literal["sum", "zero"], float] = "sum"
    antineutrino: bool = False
    sigma: float = Field(default=0.0, ge=0)
    eta: float = Field(default=1.0, gt=0, le=1)
    seed: int = 0
    draws: int = Field(default=20, ge=0)
    haar_draws: int = Field(default=20, ge=0)
    tolerance: float = Field(default=1e-9, gt=0)
    output_path: Optional[Path] = None
    output_format: OutputFormat = OutputFormat.CSV

    @field_validator(*_NAMED_ENUMS, mode="before")
    @classmethod
    def _named_enum(cls, value, info):
        return _enum_field(_NAMED_ENUMS[info.field_name], value)

    @field_validator("matter_modes", mode="before")
    @classmethod
    def _named_modes(cls, value):
        if isinstance(value, (str, MatterMode)):
            value = [value]
        return [_enum_field(MatterMode, v) for v in value]

    @field_validator("initial_flavors", mode="before")
    @classmethod
    def _named_flavors(cls, value):
        if value is None:
            return value
        if isinstance(value, (str, Flavor)):
            value = [value]
        flavors = [_enum_field(Flavor, v) for v in value]
        if Flavor.CHI in flavors:
            raise ValueError("the sterile state cannot be an initial flavor")
        return flavors

    @field_validator("potentials_ev")
    @classmethod
    def _non_negative(cls, value):
        if value is not None:
            if not value:
                raise ValueError("potential list must not be empty")
            if any(not math.isfinite(v) or v < 0 for v in value):
                raise ValueError("potentials must be finite and non-negative")
        return value

    @model_validator(mode="after")
    def _one_delta_unit(self) -> "ScenarioConfig":
        if self.deltas_deg is not None and self.deltas_rad is not None:
            raise ValueError("give either deltas_deg or deltas_rad, not both")
        for deltas in (self.deltas_deg, self.deltas_rad):
            if deltas is not None and not deltas:
                raise ValueError("delta list must not be empty")
        if not self.matter_modes:
            raise ValueError("matter_modes must not be empty")
        return self

    @property
    def x_kind(self) -> XKind:
        if self.scenario in (ScenarioKind.DUNE_CP_SCAN, ScenarioKind.DUNE_MATTER_COMPARE):
            return XKind.ENERGY
        return XKind.L_OVER_E

    def resolved_grid(self) -> GridConfig:
        return self.grid if self.grid is not None else _DEFAULT_GRIDS[self.x_kind]

    def resolved_deltas(self) -> list[float]:
        """CP phases in radians; the recipe's ``params.delta_deg`` is the fallback"""
        if self.deltas_rad is not None:
            return list(self.deltas_rad)
        if self.deltas_deg is not None:
            return [math.radians(d) for d in self.deltas_deg]
        if "delta_deg" in self.params.model_fields_set:
            return [math.radians(self.params.delta_deg)]
        return list(_DEFAULT_DELTAS_RAD.get(self.scenario.name, [0.0]))

    def resolved_potentials(self) -> list[float]:
        if self.potentials_ev is not None:
            return list(self.potentials_ev)
        return list(_DEFAULT_POTENTIALS_EV.get(self.scenario.name, [0.0]))

    def resolved_initial_flavors(self) -> list[Flavor]:
        if self.initial_flavors is not None:
            return list(self.initial_flavors)
        if self.scenario in (ScenarioKind.DUNE_CP_SCAN, ScenarioKind.DUNE_MATTER_COMPARE):
            return [Flavor.MU]
        return [Flavor.E, Flavor.MU, Flavor.TAU]


class RuntimeSettings(BaseSettings):
    """Process-wide settings read from ``NUQS_*`` environment variables"""

    model_config = SettingsConfigDict(env_prefix="NUQS_")

    workers: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)
    log_level: Literal["debug", "info"] = "info"


def _parse_override(item: str):
    key, sep, raw = item.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigError(f"Override '{item}' is not of the form key=value.")
    try:
        value = yaml.safe_load(raw) if raw.strip() else None
    except yaml.YAMLError as error:
        raise ConfigError(f"Override '{item}' has an unparsable value: {error}") from error
    return key.split("."), value


def apply_overrides(data: dict[str, Any], overrides: Sequence[str]) -> dict[str, Any]:
    """Applies dotted ``key=value`` overrides to a recipe mapping in place

    Args:
        data (dict[str, Any]): Parsed recipe
        overrides (Sequence[str]): E.g. ``["params.theta13_deg=9", "grid.steps=50"]``

    Raises:
        ConfigError: If an override is malformed or walks into a non-mapping value

    Returns:
        dict[str, Any]: ``data``
    """
    for item in overrides:
        path, value = _parse_override(item)
        node = data
        for part in path[:-1]:
            child = node.get(part)
            if child is None:
                child = node[part] = {}
            if not isinstance(child, dict):
                raise ConfigError(f"Override '{item}': '{part}' is not a mapping.")
            node = child
        node[path[-1]] = value
    return data


def load_config(
    scenario: Union[ScenarioKind, str],
    path: Optional[Union[str, Path]] = None,
    overrides: Sequence[str] = (),
) -> ScenarioConfig:
    """Reads, overrides and validates a recipe

    Args:
        scenario (Union[ScenarioKind, str]): Scenario to run
        path (Optional[Union[str, Path]], optional): Recipe file. Defaults to the
            shipped recipe of ``scenario`` (see :data:`nuqs.configs.SCENARIO_RECIPES`).
        overrides (Sequence[str], optional): Dotted ``key=value`` overrides

    Raises:
        ConfigError: If the file cannot be read or parsed, names another scenario,
            or fails validation

    Returns:
        ScenarioConfig: validated configuration
    """
    try:
        kind = ScenarioKind.from_name(scenario)
    except ValueError as error:
        raise ConfigError(str(error)) from error
    path = Path(path) if path is not None else configs.SCENARIO_RECIPES[kind.name]

    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as error:
        raise ConfigError(f"Cannot read recipe '{path}': {error}") from error
    if not isinstance(data, dict):
        raise ConfigError(f"Recipe '{path}' must be a mapping.")

    data = apply_overrides(data, overrides)
    declared = data.setdefault("scenario", kind.name)
    if str(declared).strip().lower().replace("_", "-") != kind.name:
        raise ConfigError(
            f"Recipe '{path}' describes '{declared}', not '{kind.name}'."
        )

    try:
        cfg = ScenarioConfig.model_validate(data)
    except ValidationError as error:
        raise ConfigError(f"Invalid configuration in '{path}':\n{error}") from error
    logger.debug(f"Loaded '{kind.name}' recipe from '{path}'.")
    return cfg
