"""The vector field W with pole y on the unit sphere.

For a pole ``y`` with ``|y| = 1`` and intrinsic dimension ``k`` the field is

    W(x) = x/2 - (x - y)/|x - y|^k - (k - 2)/2 * int_0^1 (t x - y)/|t x - y|^k dt

on the closed unit ball minus the pole. Its radial component has a closed
form that vanishes on the sphere, and its tangential divergence along any
k-plane is at most k/2 when k >= 2. The divergence deficit ("gap") is
accumulated from squared norms of normal projections only, so it is
non-negative to rounding whenever the integral coefficient is.

Scalar entry points use adaptive Simpson from ``quadrature``; the
``*_batch`` variants evaluate many points on graded Gauss-Legendre panels.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from src.errors import DomainError, SingularityError
from src.field.quadrature import DEFAULT_TOL, graded_gauss, quad_integrate
from src.geometry.mesh import BALL_TOL, SPHERE_TOL, AmbientVector, OrthoFrame, as_vector

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]

GUARD_RADIUS = 1e-8
BATCH_CHUNK = 512


@dataclass(frozen=True)
class FieldSample:
    """One evaluation of W.

    Attributes:
        w: Value of W at the point.
        trace: Tangential divergence along the supplied frame, else None.
        quad_err: Estimated absolute quadrature error (zero when k = 2),
            bounded by ``(k - 2)/2 * tol`` times the scale described in
            ``eval_w``.
        k: Dimension parameter of W.
    """

    w: AmbientVector
    trace: float | None
    quad_err: float
    k: int


def _coefficient(k: int) -> float:
    return 0.5 * (k - 2)


def _prepare(
    x: npt.ArrayLike, y: npt.ArrayLike, k: int
) -> tuple[AmbientVector, AmbientVector, float]:
    if k < 1:
        msg = f"W needs k >= 1, got k={k}"
        raise DomainError(msg)
    xv = as_vector(x)
    yv = as_vector(y, xv.shape[0])
    if abs(float(np.linalg.norm(yv)) - 1.0) > SPHERE_TOL:
        msg = f"pole must lie on the unit sphere, got |y| = {np.linalg.norm(yv):.12f}"
        raise DomainError(msg)
    if float(np.linalg.norm(xv)) > 1.0 + BALL_TOL:
        msg = f"point must lie in the closed unit ball, got |x| = {np.linalg.norm(xv):.12f}"
        raise DomainError(msg)
    d = float(np.linalg.norm(xv - yv))
    if d < GUARD_RADIUS:
        msg = f"|x - y| = {d:.3e} is inside the guard radius {GUARD_RADIUS:.0e}"
        raise SingularityError(msg)
    return xv, yv, d


def _check_frame(frame: OrthoFrame, n: int) -> FloatArray:
    vectors = frame.vectors
    if vectors.shape[1] != n:
        msg = f"frame lives in R^{vectors.shape[1]}, point in R^{n}"
        raise DomainError(msg)
    return vectors


def _perp(vectors: FloatArray, v: FloatArray) -> FloatArray:
    return v - vectors.T @ (vectors @ v)


def _pole_bound(d: float, power: float) -> Callable[[float, float], float]:
    """Sup of ``|t x - y|^(-power)`` on [a, b] via |tx-y|^2 >= t d^2 + (1-t)^2."""

    def bound(a: float, b: float) -> float:
        t = min(max(1.0 - 0.5 * d * d, a), b)
        q = t * d * d + (1.0 - t) ** 2
        return float(q ** (-0.5 * power))

    return bound


def _scale(d: float, exponent: int) -> float:
    return max(1.0, d**exponent)


def _w_integral(
    x: FloatArray, y: FloatArray, k: int, d: float, tol: float
) -> tuple[FloatArray, float]:
    def f(t: float) -> FloatArray:
        w = t * x - y
        return w / np.linalg.norm(w) ** k

    res = quad_integrate(f, tol, scale=_scale(d, 2 - k), bound=_pole_bound(d, k - 1))
    return res.value, res.error


def _gap_parts(
    x: FloatArray, y: FloatArray, k: int, vectors: FloatArray, d: float, tol: float
) -> tuple[float, float]:
    u = x - y
    pu = _perp(vectors, u)
    gap = k * float(pu @ pu) / d ** (k + 2)
    if k == 2:
        return gap, 0.0
    px, py = _perp(vectors, x), _perp(vectors, y)

    def f(t: float) -> float:
        pw = t * px - py
        return t * k * float(pw @ pw) / float(np.linalg.norm(t * x - y)) ** (k + 2)

    res = quad_integrate(
        f, tol, scale=_scale(d, 1 - k), bound=lambda a, b: k * _pole_bound(d, k)(a, b)
    )
    c = _coefficient(k)
    return gap + c * float(res.value[0]), abs(c) * res.error


def eval_w(
    x: npt.ArrayLike,
    y: npt.ArrayLike,
    k: int,
    tol: float = DEFAULT_TOL,
    frame: OrthoFrame | None = None,
) -> FieldSample:
    """Evaluate W(x); with a frame, also its tangential divergence.

    Args:
        x: Point in the closed unit ball.
        y: Pole on the unit sphere.
        k: Dimension parameter.
        tol: Quadrature tolerance relative to the size of each integral,
            max(1, |x - y|^(2-k)) for W and max(1, |x - y|^(1-k)) for the
            divergence. Near the pole ``quad_err`` can therefore exceed
            ``tol`` in absolute terms.
        frame: Optional tangent frame for the divergence.

    Raises:
        DomainError: If k < 1, |y| != 1 or |x| > 1.
        SingularityError: If x is within the guard radius of y.
        QuadratureError: If the integral cannot reach ``tol``.
    """
    xv, yv, d = _prepare(x, y, k)
    u = xv - yv
    w = 0.5 * xv - u / d**k
    err = 0.0
    if k != 2:
        integral, err = _w_integral(xv, yv, k, d, tol)
        c = _coefficient(k)
        w = w - c * integral
        err *= abs(c)
    trace = None
    if frame is not None:
        gap, gap_err = _gap_parts(xv, yv, k, _check_frame(frame, xv.shape[0]), d, tol)
        trace = 0.5 * k - gap
        err = max(err, gap_err)
    return FieldSample(w=w, trace=trace, quad_err=err, k=k)


def radial_component(x: npt.ArrayLike, y: npt.ArrayLike, k: int) -> float:
    """Closed form of <W(x), x> = (1 - |x|^2)(|x - y|^(-k) - 1)/2."""
    xv, _, d = _prepare(x, y, k)
    return 0.5 * (1.0 - float(xv @ xv)) * (d ** (-k) - 1.0)


def lemma_a_gap(
    x: npt.ArrayLike,
    y: npt.ArrayLike,
    k: int,
    frame: OrthoFrame,
    tol: float = DEFAULT_TOL,
) -> float:
    """Divergence deficit k/2 - div_frame W, non-negative for k >= 2."""
    xv, yv, d = _prepare(x, y, k)
    gap, _ = _gap_parts(xv, yv, k, _check_frame(frame, xv.shape[0]), d, tol)
    return gap


def div_trace(
    x: npt.ArrayLike,
    y: npt.ArrayLike,
    k: int,
    frame: OrthoFrame,
    tol: float = DEFAULT_TOL,
) -> float:
    """Sum over the frame of <D_{e_i} W, e_i>."""
    return 0.5 * k - lemma_a_gap(x, y, k, frame, tol)


def directional_derivative(
    x: npt.ArrayLike,
    y: npt.ArrayLike,
    k: int,
    v: npt.ArrayLike,
    tol: float = DEFAULT_TOL,
) -> AmbientVector:
    """Analytic derivative D_v W(x)."""
    xv, yv, d = _prepare(x, y, k)
    vv = as_vector(v, xv.shape[0])
    u = xv - yv
    out = 0.5 * vv - (vv / d**k - k * u * float(u @ vv) / d ** (k + 2))
    if k == 2:
        return out

    def f(t: float) -> FloatArray:
        w = t * xv - yv
        r = float(np.linalg.norm(w))
        return t * (vv / r**k - k * w * float(w @ vv) / r ** (k + 2))

    norm_v = float(np.linalg.norm(vv))
    res = quad_integrate(
        f,
        tol,
        scale=_scale(d, 1 - k) * max(norm_v, 1.0),
        bound=lambda a, b: (1 + k) * norm_v * _pole_bound(d, k)(a, b),
    )
    return out - _coefficient(k) * res.value


def lemma_c_remainder(
    x: npt.ArrayLike, y: npt.ArrayLike, k: int, tol: float = DEFAULT_TOL
) -> float:
    """|W(x) + (x - y)/|x - y|^k| * |x - y|^(k - 1), which tends to 0 as x -> y.

    Evaluated as |x/2 - (k - 2)/2 * integral| so the singular term never
    enters the subtraction.
    """
    xv, yv, d = _prepare(x, y, k)
    rest = 0.5 * xv
    if k != 2:
        integral, _ = _w_integral(xv, yv, k, d, tol)
        rest = rest - _coefficient(k) * integral
    return float(np.linalg.norm(rest)) * d ** (k - 1)


# Batch evaluation


def _prepare_batch(
    x: npt.ArrayLike, y: npt.ArrayLike, k: int
) -> tuple[FloatArray, FloatArray, FloatArray]:
    if k < 1:
        msg = f"W needs k >= 1, got k={k}"
        raise DomainError(msg)
    xs = np.atleast_2d(np.asarray(x, dtype=np.float64))
    ys = np.atleast_2d(np.asarray(y, dtype=np.float64))
    if xs.shape != ys.shape:
        msg = f"point and pole arrays differ in shape: {xs.shape} vs {ys.shape}"
        raise DomainError(msg)
    if np.any(np.abs(np.linalg.norm(ys, axis=1) - 1.0) > SPHERE_TOL):
        msg = "every pole must lie on the unit sphere"
        raise DomainError(msg)
    if np.any(np.linalg.norm(xs, axis=1) > 1.0 + BALL_TOL):
        msg = "every point must lie in the closed unit ball"
        raise DomainError(msg)
    d = np.linalg.norm(xs - ys, axis=1)
    if np.any(d < GUARD_RADIUS):
        msg = f"{int(np.sum(d < GUARD_RADIUS))} points lie inside the guard radius"
        raise SingularityError(msg)
    return xs, ys, d


def _chunks(m: int) -> list[slice]:
    return [slice(i, min(i + BATCH_CHUNK, m)) for i in range(0, m, BATCH_CHUNK)]


def _w_panels(
    x: FloatArray, y: FloatArray, k: int, nodes: FloatArray, weights: FloatArray
) -> FloatArray:
    pts = nodes[:, :, None] * x[:, None, :] - y[:, None, :]
    r = np.linalg.norm(pts, axis=2)
    return np.einsum("mq,mqi->mi", weights / r**k, pts)


def _gap_panels(
    x: FloatArray,
    y: FloatArray,
    px: FloatArray,
    py: FloatArray,
    k: int,
    nodes: FloatArray,
    weights: FloatArray,
) -> FloatArray:
    t = nodes[:, :, None]
    pw = t * px[:, None, :] - py[:, None, :]
    r = np.linalg.norm(t * x[:, None, :] - y[:, None, :], axis=2)
    vals = nodes * k * np.einsum("mqi,mqi->mq", pw, pw) / r ** (k + 2)
    return np.sum(weights * vals, axis=1)


def eval_w_batch(
    x: npt.ArrayLike, y: npt.ArrayLike, k: int
) -> tuple[FloatArray, FloatArray]:
    """W at many points, rows paired with poles.

    Returns:
        ``(w, err)`` with shapes ``(m, n)`` and ``(m,)``.
    """
    xs, ys, d = _prepare_batch(x, y, k)
    u = xs - ys
    w = 0.5 * xs - u / d[:, None] ** k
    err = np.zeros(xs.shape[0])
    if k == 2:
        return w, err
    c = _coefficient(k)
    for sl in _chunks(xs.shape[0]):
        rule = graded_gauss(d[sl])
        hi = _w_panels(xs[sl], ys[sl], k, rule.nodes, rule.weights)
        lo = _w_panels(xs[sl], ys[sl], k, rule.check_nodes, rule.check_weights)
        w[sl] -= c * hi
        err[sl] = abs(c) * np.linalg.norm(hi - lo, axis=1)
    return w, err


def radial_component_batch(x: npt.ArrayLike, y: npt.ArrayLike, k: int) -> FloatArray:
    """Closed-form radial component for many points."""
    xs, _, d = _prepare_batch(x, y, k)
    return 0.5 * (1.0 - np.einsum("mi,mi->m", xs, xs)) * (d ** (-k) - 1.0)


def div_gap_batch(
    x: npt.ArrayLike, y: npt.ArrayLike, k: int, frames: npt.ArrayLike
) -> tuple[FloatArray, FloatArray]:
    """Divergence deficit k/2 - div W for many (point, pole, frame) triples.

    Args:
        frames: Orthonormal frames, shape ``(m, j, n)``.

    Returns:
        ``(gap, err)``, both of shape ``(m,)``.
    """
    xs, ys, d = _prepare_batch(x, y, k)
    fr = np.asarray(frames, dtype=np.float64)
    if fr.ndim != 3 or fr.shape[0] != xs.shape[0] or fr.shape[2] != xs.shape[1]:
        msg = f"frames must have shape (m, j, {xs.shape[1]}), got {fr.shape}"
        raise DomainError(msg)

    def perp(v: FloatArray) -> FloatArray:
        return v - np.einsum("mji,mj->mi", fr, np.einsum("mji,mi->mj", fr, v))

    px, py = perp(xs), perp(ys)
    pu = px - py
    gap = k * np.einsum("mi,mi->m", pu, pu) / d ** (k + 2)
    err = np.zeros(xs.shape[0])
    if k == 2:
        return gap, err
    c = _coefficient(k)
    for sl in _chunks(xs.shape[0]):
        rule = graded_gauss(d[sl])
        args = (xs[sl], ys[sl], px[sl], py[sl], k)
        hi = _gap_panels(*args, rule.nodes, rule.weights)
        lo = _gap_panels(*args, rule.check_nodes, rule.check_weights)
        gap[sl] += c * hi
        err[sl] = abs(c) * np.abs(hi - lo)
    return gap, err
