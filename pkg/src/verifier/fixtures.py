"""Committed fixture catalog: seeds, discretization allowances and check plans."""

from __future__ import annotations

import logging
import tomllib
from functools import lru_cache
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.errors import ConfigError, DomainError
from src.geometry.mesh import Attestation, SimplicialSurface, surface_measure
from src.minimizer.seeds import seed_surface
from src.minimizer.solver import SolveOptions, minimize

logger = logging.getLogger(__name__)

FIXTURES_FILE = Path(__file__).with_name("fixtures.toml")
MIN_ALLOWANCE = 1e-12


class Fixture(BaseModel):
    """One catalog entry."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    description: str = ""
    seed: str
    params: dict[str, float] = Field(default_factory=dict)
    solve: bool = False
    tol_disc: float = Field(gt=0)
    attest: str | None = None
    expected_fail: frozenset[str] = frozenset()
    boundary_point: tuple[float, ...] | None = None
    interior_point: tuple[float, ...] | None = None
    monotonicity_radii: tuple[float, ...] = ()
    checks: tuple[str, ...] = ()


class SuitePlan(BaseModel):
    """Suite-wide parameters that are not tied to one fixture."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    first_variation_radius: float = Field(gt=0, lt=1)
    boundary_radii: tuple[float, ...]
    refinement_fixtures: tuple[str, ...]
    boundary_limit_fixtures: tuple[str, ...]
    lemma_a_k: tuple[int, ...]
    lemma_b_k: tuple[int, ...]
    lemma_c_k: tuple[int, ...]
    derivative_k: tuple[int, ...]


class Catalog(BaseModel):
    """The parsed fixtures file."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    suite: SuitePlan
    fixtures: dict[str, Fixture]


def load_catalog(path: Path = FIXTURES_FILE) -> Catalog:
    """Parse and validate a fixtures file.

    Raises:
        ConfigError: If the file is missing, is not TOML or fails validation.
    """
    try:
        with path.open("rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError as e:
        msg = f"fixtures file not found: {path}"
        raise ConfigError(msg) from e
    except tomllib.TOMLDecodeError as e:
        msg = f"invalid TOML in {path}: {e}"
        raise ConfigError(msg) from e
    fixtures = raw.get("fixtures", {})
    raw["fixtures"] = {
        name: {"name": name, **entry} for name, entry in fixtures.items()
    }
    try:
        return Catalog.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(p) for p in first["loc"])
        msg = f"invalid fixtures file {path}: {field}: {first['msg']}"
        raise ConfigError(msg, field=field) from e


@lru_cache(maxsize=1)
def default_catalog() -> Catalog:
    """The catalog shipped next to this module."""
    return load_catalog()


def fixture_catalog() -> list[Fixture]:
    """All committed fixtures, sorted by name."""
    return sorted(default_catalog().fixtures.values(), key=lambda f: f.name)


def get_fixture(name: str) -> Fixture:
    """Look up a fixture by name.

    Raises:
        DomainError: If the catalog has no such fixture.
    """
    known = default_catalog().fixtures
    fixture = known.get(name)
    if fixture is None:
        msg = f"unknown fixture {name!r}; expected one of {sorted(known)}"
        raise DomainError(msg)
    return fixture


def build_fixture(
    fixture: Fixture | str, options: SolveOptions | None = None
) -> SimplicialSurface:
    """Seed, optionally minimize, label and attest a fixture surface."""
    fx = get_fixture(fixture) if isinstance(fixture, str) else fixture
    surface = seed_surface(fx.seed, **fx.params)
    if fx.solve:
        surface, _ = minimize(surface, options)
    if fx.attest is not None:
        surface = surface.with_attestation(Attestation(kind="analytic", note=fx.attest))
    logger.info("built fixture %s (%d cells)", fx.name, surface.cells.shape[0])
    return surface.with_label(fx.name)


def discretization_allowance(s: SimplicialSurface) -> float:
    """Default allowance for uncatalogued meshes: h^2 |Sigma| with h the mean edge."""
    h = s.mean_edge_length()
    return max(h * h * surface_measure(s), MIN_ALLOWANCE)


def tolerance_for(s: SimplicialSurface) -> float:
    """Catalog tol_disc for labelled fixtures, else the default allowance."""
    if s.label is not None:
        fixture = default_catalog().fixtures.get(s.label)
        if fixture is not None:
            return fixture.tol_disc
    return discretization_allowance(s)
