"""Run configuration: JSON file, environment overrides and defaults.

Precedence is command-line flags > environment (``HFMDOT_*``) > config file
> built-in defaults. Recognised keys (flat JSON object)::

    material        {"m_eff_ratio": 0.067, "epsilon_r": 12.0}
    hbar_omega0_meV confinement energy (5.0)
    b_field_T       single field value for ground-state runs (0.0)
    b_range         "START:STOP:STEPS" or [start, stop, steps] in Tesla ("0:0:1")
    beta_meV        pair-log prefactor; null selects e^2/(eps_r l0)
    rho0            log reference length in internal units (1.0)
    k_max, n_max    basis truncation (6, 20)
    L               relative angular momentum (0)
    symmetry        "symmetric" | "mixed" | "antisymmetric" ("symmetric")
    prefactor       "oracle" | "paper" ("oracle")
    n_alpha, n_phi  angular quadrature orders (64, 64)
    n_levels        levels per field point in interacting sweeps (5)
    cm_n_max, cm_m_max  Fock-Darwin table extent (1, 5)
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .spectrum import SolverSettings
from .units import DotConfig, MaterialParams

ENV_PREFIX = "HFMDOT_"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    material: MaterialParams = field(default_factory=MaterialParams)
    hbar_omega0_meV: float = 5.0
    b_field_T: float = 0.0
    b_range: tuple[float, float, int] = (0.0, 0.0, 1)
    beta_meV: float | None = None
    rho0: float = 1.0
    k_max: int = 6
    n_max: int = 20
    L: int = 0
    symmetry: str = "symmetric"
    prefactor: str = "oracle"
    n_alpha: int = 64
    n_phi: int = 64
    n_levels: int = 5
    cm_n_max: int = 1
    cm_m_max: int = 5

    def dot(self, b_field: float | None = None) -> DotConfig:
        return DotConfig(
            self.hbar_omega0_meV,
            self.b_field_T if b_field is None else b_field,
            self.beta_meV,
            self.rho0,
            self.material,
        )

    def settings(self) -> SolverSettings:
        return SolverSettings(self.k_max, self.n_max, self.L, self.symmetry, self.prefactor, self.n_alpha, self.n_phi)

    def b_values(self) -> list[float]:
        start, stop, steps = self.b_range
        return [float(x) for x in np.linspace(start, stop, int(steps))]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["b_range"] = list(self.b_range)
        return d

    def validate(self) -> "RunConfig":
        try:
            self.dot()
            self.settings()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.b_range[2] < 1 or self.b_range[0] < 0 or self.b_range[1] < 0:
            raise ConfigError(f"invalid field range {self.b_range}")
        if self.n_levels < 1 or self.cm_n_max < 0 or self.cm_m_max < 0:
            raise ConfigError("n_levels must be >= 1 and cm extents >= 0")
        return self


PINNED_REFERENCE_CONFIG = RunConfig(
    material=MaterialParams(0.067, 12.0),
    hbar_omega0_meV=5.0,
    b_field_T=0.0,
    beta_meV=None,
    rho0=1.0,
    k_max=6,
    n_max=20,
    L=0,
    symmetry="symmetric",
    prefactor="paper",
)


def parse_range(text) -> tuple[float, float, int]:
    """'START:STOP:STEPS' (or a 3-sequence) -> (start, stop, steps)."""
    if isinstance(text, (list, tuple)):
        parts = list(text)
    else:
        parts = str(text).split(":")
        if len(parts) == 1:
            parts = [parts[0], parts[0], 1]
    if len(parts) != 3:
        raise ConfigError(f"field range must be START:STOP:STEPS, got {text!r}")
    try:
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad field range {text!r}") from exc
    if steps < 1:
        raise ConfigError("field range needs at least one step")
    return (start, stop, steps)


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, value):
    if key not in _FIELD_TYPES:
        raise ConfigError(f"unknown configuration key {key!r}")
    if key == "material":
        if isinstance(value, MaterialParams):
            return value
        try:
            return MaterialParams(**value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad material: {exc}") from exc
    if key == "b_range":
        return parse_range(value)
    if value is None:
        if key == "beta_meV":
            return None
        raise ConfigError(f"{key} may not be null")
    kind = _FIELD_TYPES[key]
    try:
        if kind == "int":
            if isinstance(value, float) and not value.is_integer():
                raise ValueError
            return int(value)
        if kind in ("float", "float | None"):
            return float(value)
        return str(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key}: {value!r}") from exc


def _env_overrides(environ) -> dict:
    out = {}
    for name, value in environ.items():
        if not name.startswith(ENV_PREFIX):
            continue
        key = name[len(ENV_PREFIX):]
        matches = [k for k in _FIELD_TYPES if k.lower() == key.lower()]
        if not matches:
            raise ConfigError(f"unknown environment override {name}")
        k = matches[0]
        if k == "material":
            value = json.loads(value)
        elif k == "beta_meV" and value.lower() in ("", "none", "null"):
            value = None
        out[k] = value
    return out


def load_config(path=None, overrides: dict | None = None, environ=None, base: RunConfig | None = None) -> RunConfig:
    """Resolve a RunConfig from file, environment and explicit overrides."""
    cfg = base or RunConfig()
    layers = []
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        layers.append(data)
    layers.append(_env_overrides(os.environ if environ is None else environ))
    layers.append({k: v for k, v in (overrides or {}).items() if v is not None})
    for layer in layers:
        cfg = replace(cfg, **{k: _coerce(k, v) for k, v in layer.items()})
    return cfg.validate()


def config_from_dict(data: dict) -> RunConfig:
    return load_config(overrides=None, environ={}, base=replace(RunConfig(), **{k: _coerce(k, v) for k, v in data.items()}))
