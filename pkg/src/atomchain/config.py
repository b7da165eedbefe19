"""Experiment configuration: pydantic models plus INI/JSON loaders.

The same models serve as the request bodies of the HTTP service, so
everything a run needs is validated up front with field-level diagnostics.
Config files are INI-style (flat key/value with sections) or JSON; a run
manifest (which embeds the resolved config under "config") also loads.
"""

from __future__ import annotations

import configparser
import json
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field, ValidationError, model_validator

from .chain import DefectSpec
from .errors import ConfigError
from .potential import PotentialParams, critical_constants


class PotentialConfig(BaseModel):
    """Interaction constants; give either A or three_A (the stress prefactor)."""

    A: float | None = None
    three_A: float | None = Field(default=None, alias="3A")
    r0: float = 1.0
    eta_cut: float = 1e-2

    model_config = {"populate_by_name": True}

    @model_validator(mode="after")
    def _resolve(self):
        if self.A is not None and self.three_A is not None:
            if abs(self.three_A - 3.0 * self.A) > 1e-12 * max(1.0, abs(self.three_A)):
                raise ValueError("give either A or three_A, not two conflicting values")
        if self.A is None:
            self.A = (self.three_A if self.three_A is not None else 0.25) / 3.0
        self.three_A = 3.0 * self.A
        if self.A <= 0:
            raise ValueError("energy scale must be positive")
        if not 0 < self.eta_cut < 1:
            raise ValueError("eta_cut must lie in (0, 1)")
        return self

    def params(self) -> PotentialParams:
        return PotentialParams(A=self.A, r0=self.r0, eta_cut=self.eta_cut)


class DefectConfig(BaseModel):
    s1: float = 1.0
    s2: float = 1.1
    delta: float = 0.1

    def spec(self) -> DefectSpec:
        return DefectSpec(s1=self.s1, s2=self.s2, delta=self.delta)


class ExperimentConfig(BaseModel):
    """Everything a simulation/consistency run needs, validated at load time."""

    potential: PotentialConfig = PotentialConfig()
    defect: DefectConfig = DefectConfig()
    meshes: list[int] = [16, 32, 64, 128]
    rho0: float = 1.0
    mu: float = 0.01
    bc: Literal["fixed", "end_load"] = "fixed"
    v0: float = -0.05
    times: list[float] | None = None
    dt: float = 0.01
    nt: int = 4
    raw: bool = True
    mollified: bool = True
    viscous: bool = True
    eps: float | None = None  # averaging-scale override; default is the per-mesh policy
    rel_tol: float = 1e-6
    abs_tol: float = 1e-9
    max_step: float | None = None
    outdir: str = "out"
    format: Literal["csv", "json"] = "csv"
    plot: bool = False

    @model_validator(mode="after")
    def _validate(self):
        if not self.meshes:
            raise ValueError("meshes: at least one mesh size is required")
        if any(M < 2 for M in self.meshes):
            raise ValueError("meshes: every entry must be >= 2")
        if self.rho0 <= 0:
            raise ValueError("rho0 must be positive")
        if self.mu < 0:
            raise ValueError("mu must be nonnegative")
        if self.times is None:
            if self.dt <= 0 or self.nt < 1:
                raise ValueError("dt must be positive and nt >= 1")
            self.times = [round(self.dt * i, 12) for i in range(1, self.nt + 1)]
        if any(t <= 0 for t in self.times):
            raise ValueError("times must be positive")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("times must be strictly increasing")
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_step is not None and self.max_step <= 0:
            raise ValueError("max_step must be positive")
        cc = critical_constants(self.potential.params())
        for name, s in (("s1", self.defect.s1), ("s2", self.defect.s2)):
            if not 0 < s <= cc.z_cut:
                raise ValueError(
                    f"defect.{name}={s} outside (0, z_cut={cc.z_cut:.6f}]"
                )
        if not 0 < self.defect.delta < 0.5:
            raise ValueError("defect.delta must lie in (0, 1/2)")
        if self.eps is not None:
            for M in self.meshes:
                if not 1.0 / M < self.eps < 1.0:
                    raise ValueError(
                        f"eps={self.eps} must satisfy 1/M < eps < 1 for M={M}"
                    )
        if not (self.raw or self.mollified or self.viscous):
            raise ValueError("at least one of raw/mollified/viscous must be enabled")
        return self


_SECTION_FIELDS = {
    "potential": ("a", "three_a", "3a", "r0", "eta_cut"),
    "defect": ("s1", "s2", "delta"),
}

_LIST_KEYS = {"meshes", "times"}
_BOOL_KEYS = {"raw", "mollified", "viscous", "plot"}
_INT_KEYS = {"nt"}
_STR_KEYS = {"bc", "outdir", "format"}


def _coerce(key: str, value: str):
    key = key.lower()
    if key in _STR_KEYS:
        return value.strip()
    if key in _BOOL_KEYS:
        lowered = value.strip().lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key}: expected a boolean, got {value!r}")
    if key in _LIST_KEYS:
        items = [v for v in value.replace(",", " ").split() if v]
        return [int(v) if key == "meshes" else float(v) for v in items]
    if key in _INT_KEYS:
        return int(value)
    if value.strip().lower() in ("none", ""):
        return None
    return float(value)


def _ini_to_dict(text: str, source: str) -> dict:
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    data: dict = {}
    for section in parser.sections():
        lowered = section.lower()
        for key, value in parser.items(section):
            try:
                coerced = _coerce(key, value)
            except (ValueError, ConfigError) as exc:
                raise ConfigError(f"{source} [{section}] {key}: {exc}") from exc
            if lowered in _SECTION_FIELDS:
                name = {"3a": "three_A", "three_a": "three_A", "a": "A"}.get(key.lower(), key.lower())
                data.setdefault(lowered, {})[name] = coerced
            else:
                data[key.lower()] = coerced
    return data


def config_from_dict(data: dict) -> ExperimentConfig:
    if "config" in data and isinstance(data["config"], dict):
        data = data["config"]  # run manifests embed the resolved config
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        lines = [
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}"
            for err in exc.errors()
        ]
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(lines)) from exc


def load_config(path: str | Path) -> ExperimentConfig:
    """Load an INI or JSON config file (JSON detected by content)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON (line {exc.lineno}): {exc.msg}") from exc
        return config_from_dict(data)
    return config_from_dict(_ini_to_dict(text, str(path)))
