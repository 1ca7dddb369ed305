"""Strict JSON scenario files."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .estimator import DiscretizedEnvironment

__all__ = ["Scenario", "ScenarioError", "load_scenario", "bundled_scenarios", "SWEEP_AXES"]

SWEEP_AXES = {"g0": ("spectral", "g0"), "gamma": ("spectral", "gamma"), "temperature": ("bath", "temperature")}


class ScenarioError(ValueError):
    """Scenario file could not be parsed or failed validation."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class SpectralConfig(_Strict):
    kind: Literal["lorentz_drude"] = "lorentz_drude"
    g0: float = Field(ge=0, allow_inf_nan=False)
    gamma: float = Field(gt=0, allow_inf_nan=False)


class BathConfig(_Strict):
    omega_max: float = Field(10.0, gt=0, allow_inf_nan=False)
    n_max: int = Field(250, ge=0)
    temperature: float = Field(1.0, ge=0, allow_inf_nan=False)
    statistics: Literal["boson", "fermion"] = "boson"


class LevelConfig(_Strict):
    frequency: float = Field(allow_inf_nan=False)
    initial_occupation: float = Field(0.0, ge=0, le=1)


class SystemConfig(_Strict):
    preset: Literal["two_level", "three_level", "custom"]
    Omega: float = Field(1.0, allow_inf_nan=False)
    Omega_U: Optional[float] = None
    Omega_L: Optional[float] = None
    occupations: Optional[List[float]] = None
    levels: Optional[List[LevelConfig]] = None
    counterterm: Optional[bool] = None

    @model_validator(mode="after")
    def _check_preset(self):
        if self.preset == "custom":
            if not self.levels:
                raise ValueError("preset 'custom' requires a non-empty 'levels' list")
            if self.occupations is not None:
                raise ValueError("preset 'custom' takes occupations inside 'levels'")
        elif self.levels is not None:
            raise ValueError(f"'levels' is only valid with preset 'custom', not {self.preset!r}")
        if self.preset != "three_level" and (self.Omega_U is not None or self.Omega_L is not None):
            raise ValueError("'Omega_U'/'Omega_L' are only valid with preset 'three_level'")
        expected = {"two_level": 1, "three_level": 2}.get(self.preset)
        if expected and self.occupations is not None:
            if len(self.occupations) != expected:
                raise ValueError(f"preset {self.preset!r} expects {expected} occupations, got {len(self.occupations)}")
            if any(not 0.0 <= x <= 1.0 for x in self.occupations):
                raise ValueError("occupations must lie in [0, 1]")
        return self

    def level_table(self) -> tuple[tuple[float, ...], tuple[float, ...], bool]:
        """Level frequencies, initial occupations and counterterm flag."""
        if self.preset == "two_level":
            freqs = (self.Omega,)
            occ = tuple(self.occupations or (0.0,))
            ct = True
        elif self.preset == "three_level":
            up = self.Omega if self.Omega_U is None else self.Omega_U
            low = self.Omega if self.Omega_L is None else self.Omega_L
            freqs = (up, -low)
            occ = tuple(self.occupations or (0.0, 0.0))
            ct = False
        else:
            freqs = tuple(lv.frequency for lv in self.levels)
            occ = tuple(lv.initial_occupation for lv in self.levels)
            ct = False
        if self.counterterm is not None:
            ct = self.counterterm
        return freqs, occ, ct


class GridConfig(_Strict):
    t_start: float = Field(0.0, ge=0, allow_inf_nan=False)
    t_end: float = Field(allow_inf_nan=False)
    n_points: int = Field(ge=2)

    @model_validator(mode="after")
    def _check_order(self):
        if not self.t_end > self.t_start:
            raise ValueError("t_end must exceed t_start")
        return self


class OutputsConfig(_Strict):
    occupations: bool = True
    coherences: bool = False
    bath_occupations: bool = False
    kernel: bool = False


class Scenario(_Strict):
    label: str = ""
    spectral: SpectralConfig
    bath: BathConfig = BathConfig()
    system: SystemConfig
    grid: GridConfig
    outputs: OutputsConfig = OutputsConfig()

    def estimator(self, **overrides) -> DiscretizedEnvironment:
        freqs, occ, ct = self.system.level_table()
        params = dict(
            g0=self.spectral.g0, gamma=self.spectral.gamma,
            omega_max=self.bath.omega_max, n_max=self.bath.n_max,
            temperature=self.bath.temperature, statistics=self.bath.statistics,
            level_frequencies=freqs, initial_occupations=occ, counterterm=ct,
        )
        params.update(overrides)
        return DiscretizedEnvironment(**params)

    def replace(self, section: str, **values) -> "Scenario":
        """Copy with fields of one section replaced, re-validated."""
        data = self.model_dump()
        data[section].update(values)
        return Scenario.model_validate(data)

    def with_axis(self, axis: str, value: float) -> "Scenario":
        if axis not in SWEEP_AXES:
            raise ScenarioError(f"unknown sweep axis {axis!r}; expected one of {sorted(SWEEP_AXES)}")
        section, key = SWEEP_AXES[axis]
        try:
            return self.replace(section, **{key: value})
        except ValidationError as exc:
            raise ScenarioError(_format_validation(exc)) from exc

    def times(self):
        import numpy as np

        return np.linspace(self.grid.t_start, self.grid.t_end, self.grid.n_points)


def _format_validation(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        lines.append(f"{loc}: {err['msg']}")
    return "; ".join(lines)


def load_scenario(path) -> Scenario:
    """Parse and validate a scenario file, rejecting unknown keys."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    try:
        return Scenario.model_validate(data)
    except ValidationError as exc:
        raise ScenarioError(f"{path}: {_format_validation(exc)}") from exc


def bundled_scenarios() -> dict[str, Path]:
    """Name -> path of the scenario files shipped with the package."""
    root = resources.files("demsim") / "scenarios"
    return {p.name[:-5]: Path(str(p)) for p in sorted(root.iterdir(), key=lambda p: p.name) if p.name.endswith(".json")}
