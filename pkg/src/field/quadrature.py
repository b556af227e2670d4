"""Quadrature on [0, 1] for the integral terms of W.

Two rules live here. ``quad_integrate`` is adaptive composite Simpson with
interval bisection for single evaluations; it accepts an optional magnitude
bound of the integrand on a sub-interval, which lets it stop refining where
the integrand is provably too small to matter. ``graded_gauss`` builds
composite Gauss-Legendre nodes on panels graded geometrically toward t = 1,
for vectorized evaluation of many points at once.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from functools import lru_cache
from typing import NamedTuple

import numpy as np
import numpy.typing as npt

from src.errors import DomainError, QuadratureError

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
Integrand = Callable[[float], "FloatArray | float"]
MagnitudeBound = Callable[[float, float], float]

DEFAULT_TOL = 1e-10
MAX_SUBDIVISIONS = 10**6
GAUSS_ORDER = 16
GAUSS_CHECK_ORDER = 8
GRADED_PANELS = 40


class QuadResult(NamedTuple):
    """Integral value with its estimated absolute error."""

    value: FloatArray
    error: float


def quad_integrate(
    f: Integrand,
    tol: float = DEFAULT_TOL,
    *,
    scale: float = 1.0,
    bound: MagnitudeBound | None = None,
) -> QuadResult:
    """Integrate a scalar- or vector-valued ``f`` over [0, 1].

    The returned error estimate is at most ``tol * scale``.

    Args:
        f: Integrand, finite on [0, 1].
        tol: Requested absolute tolerance in units of ``scale``.
        scale: Magnitude of the expected integral; field evaluations pass the
            size implied by the guard bound near the pole.
        bound: Optional ``bound(a, b) >= sup |f|`` on [a, b].

    Raises:
        DomainError: If ``tol`` or ``scale`` is not positive.
        QuadratureError: If the tolerance is not reached within
            ``MAX_SUBDIVISIONS`` bisections.
    """
    if tol <= 0.0 or scale <= 0.0:
        msg = f"tolerance and scale must be positive, got tol={tol}, scale={scale}"
        raise DomainError(msg)
    target = tol * scale

    def ev(t: float) -> FloatArray:
        return np.atleast_1d(np.asarray(f(t), dtype=np.float64))

    fa, fm, fb = ev(0.0), ev(0.5), ev(1.0)
    whole = (fa + 4.0 * fm + fb) / 6.0
    stack = [(0.0, 1.0, fa, fm, fb, whole, target)]
    total = np.zeros_like(fa)
    error = 0.0
    splits = 0
    while stack:
        a, b, fa, fm, fb, whole, local = stack.pop()
        m = 0.5 * (a + b)
        flm, frm = ev(0.5 * (a + m)), ev(0.5 * (m + b))
        left = (m - a) * (fa + 4.0 * flm + fm) / 6.0
        right = (b - m) * (fm + 4.0 * frm + fb) / 6.0
        delta = left + right - whole
        est = float(np.max(np.abs(delta))) / 15.0
        if est <= local:
            total += left + right + delta / 15.0
            error += est
            continue
        if bound is not None:
            cap = 2.0 * (b - a) * bound(a, b)
            if cap <= local:
                total += left + right
                error += cap
                continue
        splits += 1
        if splits > MAX_SUBDIVISIONS:
            msg = f"quadrature did not reach {target:.3e} within {MAX_SUBDIVISIONS} subdivisions"
            raise QuadratureError(msg)
        stack.append((m, b, fm, frm, fb, right, 0.5 * local))
        stack.append((a, m, fa, flm, fm, left, 0.5 * local))
    logger.debug("simpson: %d subdivisions, error %.3e", splits, error)
    return QuadResult(total, error)


@lru_cache(maxsize=4)
def _legendre(order: int) -> tuple[FloatArray, FloatArray]:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return nodes, weights


class GradedRule(NamedTuple):
    """Per-sample nodes and weights on [0, 1], shape ``(m, Q)`` each."""

    nodes: FloatArray
    weights: FloatArray
    check_nodes: FloatArray
    check_weights: FloatArray


def graded_gauss(
    distance: FloatArray,
    *,
    panels: int = GRADED_PANELS,
    order: int = GAUSS_ORDER,
    check_order: int = GAUSS_CHECK_ORDER,
) -> GradedRule:
    """Composite Gauss-Legendre rules graded toward t = 1.

    For a sample whose pole distance is ``d`` the breakpoints are
    ``1 - d^(j / panels)`` followed by a last panel ``[1 - d, 1]``, so every
    panel is about as long as its distance to the near-singularity of
    ``|t x - y|``. Distances of one or more collapse to a single panel.
    The lower ``check_order`` rule on the same panels estimates the error.
    """
    d = np.clip(np.asarray(distance, dtype=np.float64), 1e-300, 1.0)
    j = np.arange(panels + 1) / panels
    cuts = 1.0 - d[:, None] ** j[None, :]
    bounds = np.concatenate([cuts, np.ones((d.shape[0], 1))], axis=1)
    lo, hi = bounds[:, :-1], bounds[:, 1:]
    half, mid = 0.5 * (hi - lo), 0.5 * (hi + lo)

    def rule(n_pts: int) -> tuple[FloatArray, FloatArray]:
        xi, wi = _legendre(n_pts)
        nodes = mid[:, :, None] + half[:, :, None] * xi[None, None, :]
        weights = half[:, :, None] * wi[None, None, :]
        return nodes.reshape(d.shape[0], -1), weights.reshape(d.shape[0], -1)

    nodes, weights = rule(order)
    check_nodes, check_weights = rule(check_order)
    return GradedRule(nodes, weights, check_nodes, check_weights)
