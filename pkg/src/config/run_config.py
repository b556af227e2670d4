"""RunConfig and its layered loading.

Sources in increasing precedence: model defaults, a TOML or YAML file,
``BALLAREA_*`` environment variables (after ``.env`` is loaded) and
explicit overrides from the command line.
"""

from __future__ import annotations

import logging
import os
import tomllib
from collections.abc import Mapping
from pathlib import Path
from typing import Any, Literal

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from src.errors import ConfigError, DomainError
from src.minimizer.solver import SolveOptions
from src.verifier.checks import canonical_check

logger = logging.getLogger(__name__)

ENV_PREFIX = "BALLAREA_"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

Command = Literal["solve", "verify", "field-sample", "report", "fixtures"]


def split_list(value: object) -> object:
    """Accept ``"a,b"`` strings where a list is expected."""
    if isinstance(value, str):
        return [part.strip() for part in value.split(",") if part.strip()]
    return value


class RunConfig(BaseModel):
    """Everything one CLI invocation needs."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    command: Command = "report"
    seed: str = "disk"
    seed_params: dict[str, float] = Field(default_factory=dict)
    refine: int | None = Field(default=None, ge=0)
    mesh: Path | None = None
    label: str | None = None
    checks: tuple[str, ...] = ("main_theorem",)
    point: tuple[float, ...] | None = None
    radius: float = Field(default=0.3, gt=0, lt=1)
    radii: tuple[float, ...] = ()
    k: int = Field(default=3, ge=1)
    samples: int = Field(default=10_000, ge=1)
    rng_seed: int = Field(default=42, ge=0)
    max_iters: int = Field(default=20_000, ge=1)
    grad_tol: float = Field(default=1e-8, gt=0)
    tol_disc: float | None = Field(default=None, gt=0)
    out_dir: Path = Path("out")
    workers: int | None = Field(default=None, ge=1)
    log_level: str = "INFO"

    @field_validator("checks", "radii", "point", mode="before")
    @classmethod
    def _split(cls, value: object) -> object:
        return split_list(value)

    @field_validator("checks")
    @classmethod
    def _known_checks(cls, value: tuple[str, ...]) -> tuple[str, ...]:
        try:
            return tuple(canonical_check(name) for name in value)
        except DomainError as e:
            raise ValueError(str(e)) from e

    @field_validator("radii")
    @classmethod
    def _positive_radii(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        if any(r <= 0 for r in value):
            msg = f"radii must be positive, got {list(value)}"
            raise ValueError(msg)
        return value

    @field_validator("log_level")
    @classmethod
    def _level(cls, value: str) -> str:
        level = value.upper()
        if level not in LOG_LEVELS:
            msg = f"log level must be one of {LOG_LEVELS}, got {value!r}"
            raise ValueError(msg)
        return level

    def seed_arguments(self) -> dict[str, float]:
        """Seed parameters with ``refine`` folded in as ``refine_level``."""
        params = dict(self.seed_params)
        if self.refine is not None:
            params["refine_level"] = self.refine
        return params

    def solve_options(self) -> SolveOptions:
        """Solver options derived from the run settings."""
        return SolveOptions(max_iters=self.max_iters, grad_tol=self.grad_tol)


def read_config_file(path: Path) -> dict[str, Any]:
    """Load a flat key/value mapping from ``.toml``, ``.yaml`` or ``.yml``.

    Raises:
        ConfigError: If the file is missing, unparsable or not a mapping.
    """
    if not path.exists():
        msg = f"config file not found: {path}"
        raise ConfigError(msg, field="config")
    suffix = path.suffix.lower()
    try:
        if suffix == ".toml":
            with path.open("rb") as fh:
                data: object = tomllib.load(fh)
        elif suffix in {".yaml", ".yml"}:
            with path.open(encoding="utf-8") as fh:
                data = yaml.safe_load(fh) or {}
        else:
            msg = f"unsupported config format {suffix!r}; use .toml, .yaml or .yml"
            raise ConfigError(msg, field="config")
    except (tomllib.TOMLDecodeError, yaml.YAMLError) as e:
        msg = f"cannot parse {path}: {e}"
        raise ConfigError(msg, field="config") from e
    if not isinstance(data, dict):
        msg = f"{path} must hold a mapping of settings"
        raise ConfigError(msg, field="config")
    return {key.replace("-", "_"): value for key, value in data.items()}


def env_settings(environ: Mapping[str, str]) -> dict[str, str]:
    """Settings from ``BALLAREA_<FIELD>`` variables (and bare ``LOG_LEVEL``)."""
    settings = {
        key[len(ENV_PREFIX) :].lower(): value
        for key, value in environ.items()
        if key.startswith(ENV_PREFIX)
    }
    if "log_level" not in settings and "LOG_LEVEL" in environ:
        settings["log_level"] = environ["LOG_LEVEL"]
    return settings


def load_config(
    path: Path | None = None,
    overrides: Mapping[str, object] | None = None,
    *,
    environ: Mapping[str, str] | None = None,
) -> RunConfig:
    """Merge defaults, file, environment and overrides into a RunConfig.

    ``overrides`` entries that are None are ignored so unset CLI flags do
    not mask lower layers. Without an explicit ``environ`` the process
    environment is used after loading ``.env``.

    Raises:
        ConfigError: Naming the first invalid field.
    """
    if environ is None:
        load_dotenv()
        environ = os.environ
    merged: dict[str, object] = {}
    if path is not None:
        merged.update(read_config_file(path))
    merged.update(env_settings(environ))
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        config = RunConfig.model_validate(merged)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(p) for p in first["loc"]) or "config"
        msg = f"invalid setting {field}: {first['msg']}"
        raise ConfigError(msg, field=field) from e
    logger.debug("run config: %s", config.model_dump(mode="json"))
    return config
