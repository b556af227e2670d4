"""Discrete free-boundary minimal surfaces: solver, seeds and the catenoid oracle."""

from src.minimizer.catenoid import (
    CatenoidProfile,
    critical_catenoid,
    critical_catenoid_closed_form,
)
from src.minimizer.seeds import SEED_KINDS, seed_surface
from src.minimizer.solver import (
    SolveOptions,
    SolveStats,
    StepRule,
    area_gradient,
    minimize,
    orthogonality_angle,
    write_iteration_log,
)

__all__ = [
    "SEED_KINDS",
    "CatenoidProfile",
    "SolveOptions",
    "SolveStats",
    "StepRule",
    "area_gradient",
    "critical_catenoid",
    "critical_catenoid_closed_form",
    "minimize",
    "orthogonality_angle",
    "seed_surface",
    "write_iteration_log",
]
