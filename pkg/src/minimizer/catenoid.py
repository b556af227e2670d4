"""The critical catenoid in the unit 3-ball.

The catenoid ``r(z) = a cosh(z / a)`` meets the unit sphere orthogonally
exactly when ``T tanh T = 1`` for ``T = h / a``, where ``h`` is the height
of the boundary circles. ``critical_catenoid`` finds it independently by
shooting: the axisymmetric minimal-surface profile ``r'' = (1 + r'^2) / r``
is integrated from the neck until it reaches the sphere, and the neck
radius is adjusted until the profile meets the sphere at a right angle.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from src.errors import DomainError

logger = logging.getLogger(__name__)

NECK_BRACKET = (0.3, 0.7)
ODE_RTOL = 1e-12
ODE_ATOL = 1e-14


@dataclass(frozen=True)
class CatenoidProfile:
    """Critical catenoid data.

    Attributes:
        neck_radius: ``a``, the radius of the waist circle.
        parameter: ``T`` with boundary circles at ``z = +-a T``.
        area: Area of the surface inside the ball.
        boundary_length: Total length of the two boundary circles.
    """

    neck_radius: float
    parameter: float
    area: float
    boundary_length: float

    @property
    def boundary_radius(self) -> float:
        """Radius of each boundary circle."""
        return self.neck_radius * math.cosh(self.parameter)

    @property
    def boundary_height(self) -> float:
        """Height of the upper boundary circle."""
        return self.neck_radius * self.parameter


def critical_catenoid_closed_form() -> CatenoidProfile:
    """Critical catenoid from the transcendental condition T tanh T = 1."""
    t = brentq(lambda x: x * math.tanh(x) - 1.0, 0.5, 2.0, xtol=1e-15)
    a = 1.0 / math.sqrt(math.cosh(t) ** 2 + t**2)
    area = 2.0 * math.pi * a * a * (t + 0.5 * math.sinh(2.0 * t))
    return CatenoidProfile(
        neck_radius=a,
        parameter=t,
        area=area,
        boundary_length=4.0 * math.pi * a * math.cosh(t),
    )


def _profile_rhs(_z: float, state: np.ndarray) -> list[float]:
    r, dr, _ = state
    return [dr, (1.0 + dr * dr) / r, 2.0 * math.pi * r * math.sqrt(1.0 + dr * dr)]


def _hits_sphere(_z: float, state: np.ndarray) -> float:
    return state[0] ** 2 + _z**2 - 1.0


_hits_sphere.terminal = True  # type: ignore[attr-defined]
_hits_sphere.direction = 1  # type: ignore[attr-defined]


def _shoot(neck: float) -> tuple[float, float, float, float]:
    """Integrate the upper half of the profile; returns (z, r, r', half_area)."""
    sol = solve_ivp(
        _profile_rhs,
        (0.0, 1.0),
        [neck, 0.0, 0.0],
        events=_hits_sphere,
        rtol=ODE_RTOL,
        atol=ODE_ATOL,
    )
    if sol.t_events[0].size == 0:
        msg = f"profile with neck radius {neck} never reaches the sphere"
        raise DomainError(msg)
    z = float(sol.t_events[0][0])
    r, dr, half_area = (float(v) for v in sol.y_events[0][0])
    return z, r, dr, half_area


def contact_mismatch(neck: float) -> float:
    """Cross product of the profile tangent (r', 1) with the position (r, z) at contact."""
    z, r, dr, _ = _shoot(neck)
    return dr * z - r


def critical_catenoid() -> CatenoidProfile:
    """Critical catenoid by shooting on the neck radius."""
    neck = brentq(contact_mismatch, *NECK_BRACKET, xtol=1e-14)
    z, r, _, half_area = _shoot(neck)
    profile = CatenoidProfile(
        neck_radius=neck,
        parameter=z / neck,
        area=2.0 * half_area,
        boundary_length=4.0 * math.pi * r,
    )
    logger.debug(
        "critical catenoid: neck %.12f, area %.12f", profile.neck_radius, profile.area
    )
    return profile
