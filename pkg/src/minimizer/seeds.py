"""Initial and analytic meshes.

Every seed places its boundary vertices on the unit sphere (closed seeds put
every vertex there). Seeds of surfaces known to be minimal in closed form
carry an analytic attestation; the rest are starting points for ``minimize``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable

import numpy as np
from scipy.optimize import brentq

from src.errors import DomainError
from src.geometry.mesh import (
    Attestation,
    FloatArray,
    IntArray,
    SimplicialSurface,
    refine,
    transform,
)
from src.minimizer.catenoid import critical_catenoid

logger = logging.getLogger(__name__)

MAX_REFINE = 8
INT_PARAMS = frozenset({"refine_level", "segments", "layers", "rings", "grid", "n"})


def _embed(points: FloatArray, n: int) -> FloatArray:
    if n < points.shape[1]:
        msg = f"seed needs ambient dimension >= {points.shape[1]}, got n={n}"
        raise DomainError(msg)
    out = np.zeros((points.shape[0], n))
    out[:, : points.shape[1]] = points
    return out


def _check_refine(level: int) -> None:
    if not 0 <= level <= MAX_REFINE:
        msg = f"refinement level must be in [0, {MAX_REFINE}], got {level}"
        raise DomainError(msg)


def _grid_cells(rows: int, cols: int, *, wrap_rows: bool = False) -> IntArray:
    """Triangulate a rows x cols vertex grid, columns periodic, diagonals alternating."""
    cells = []
    last = rows if wrap_rows else rows - 1
    for j in range(last):
        jn = (j + 1) % rows
        for i in range(cols):
            i_n = (i + 1) % cols
            a, b = j * cols + i, j * cols + i_n
            c, d = jn * cols + i, jn * cols + i_n
            if (i + j) % 2 == 0:
                cells.extend([(a, b, d), (a, d, c)])
            else:
                cells.extend([(a, b, c), (b, d, c)])
    return np.array(cells, dtype=np.int64)


def disk(refine_level: int = 5, n: int = 3) -> SimplicialSurface:
    """Equatorial unit disk in the e1-e2 plane.

    An octagon fan refined ``refine_level`` times, boundary midpoints pushed
    onto the sphere; level 5 has 8192 triangles.
    """
    _check_refine(refine_level)
    theta = 2.0 * math.pi * np.arange(8) / 8
    ring = np.column_stack((np.cos(theta), np.sin(theta)))
    vertices = _embed(np.vstack(([0.0, 0.0], ring)), n)
    cells = np.array([(0, 1 + i, 1 + (i + 1) % 8) for i in range(8)], dtype=np.int64)
    s = SimplicialSurface(k=2, vertices=vertices, cells=cells)
    for _ in range(refine_level):
        s = refine(s)
    return s


def tilted_disk(
    refine_level: int = 5, angle: float = math.pi / 6, n: int = 3
) -> SimplicialSurface:
    """Disk rotated by ``angle`` in the e1-e3 plane; still through the origin."""
    rot = np.eye(n)
    c, s_ = math.cos(angle), math.sin(angle)
    rot[0, 0], rot[0, 2], rot[2, 0], rot[2, 2] = c, -s_, s_, c
    return transform(disk(refine_level, n), rot)


def perturbed_disk(
    refine_level: int = 5, lift: float = 0.2, n: int = 3
) -> SimplicialSurface:
    """Disk with the center vertex lifted by ``lift`` along e3."""
    if not 0.0 <= lift < 1.0:
        msg = f"lift must be in [0, 1), got {lift}"
        raise DomainError(msg)
    s = disk(refine_level, n)
    verts = s.vertices.copy()
    verts[0, 2] += lift
    return s.with_vertices(verts)


def spike(refine_level: int = 3, height: float = 0.125) -> SimplicialSurface:
    """Disk whose ring around the center alternates between +-height.

    Not minimal; the density ratio at the center decreases between the ring
    radius and the rim.
    """
    s = disk(refine_level)
    ring = np.unique(s.cells[np.any(s.cells == 0, axis=1)])
    ring = ring[ring != 0]
    order = np.argsort(np.arctan2(s.vertices[ring, 1], s.vertices[ring, 0]))
    verts = s.vertices.copy()
    signs = np.where(np.arange(ring.size) % 2 == 0, 1.0, -1.0)
    verts[ring[order], 2] += height * signs
    return s.with_vertices(verts)


def annulus(radius: float = 0.75, rings: int = 64, layers: int = 16) -> SimplicialSurface:
    """Cylinder of the given radius cut off by the sphere at z = +-sqrt(1 - r^2)."""
    if not 0.0 < radius < 1.0:
        msg = f"annulus radius must be in (0, 1), got {radius}"
        raise DomainError(msg)
    if rings < 3 or layers < 1:
        msg = f"annulus needs rings >= 3 and layers >= 1, got {rings}, {layers}"
        raise DomainError(msg)
    h = math.sqrt(1.0 - radius * radius)
    theta = 2.0 * math.pi * np.arange(rings) / rings
    z = np.linspace(-h, h, layers + 1)
    zz, tt = np.meshgrid(z, theta, indexing="ij")
    verts = np.column_stack(
        (radius * np.cos(tt).ravel(), radius * np.sin(tt).ravel(), zz.ravel())
    )
    return SimplicialSurface(k=2, vertices=verts, cells=_grid_cells(layers + 1, rings))


def catenoid(segments: int = 64, layers: int = 16) -> SimplicialSurface:
    """Critical catenoid sampled on a (t, theta) grid, tagged analytic."""
    profile = critical_catenoid()
    a, big_t = profile.neck_radius, profile.parameter
    theta = 2.0 * math.pi * np.arange(segments) / segments
    t = np.linspace(-big_t, big_t, layers + 1)
    tt, th = np.meshgrid(t, theta, indexing="ij")
    verts = np.column_stack(
        (
            (a * np.cosh(tt) * np.cos(th)).ravel(),
            (a * np.cosh(tt) * np.sin(th)).ravel(),
            (a * tt).ravel(),
        )
    )
    rim = np.zeros(verts.shape[0], dtype=bool)
    rim[:segments] = rim[-segments:] = True
    verts[rim] /= np.linalg.norm(verts[rim], axis=1)[:, None]
    return SimplicialSurface(
        k=2,
        vertices=verts,
        cells=_grid_cells(layers + 1, segments),
        attestation=Attestation(kind="analytic", note="critical catenoid"),
    )


def _origin_catenoid_point(a: float, t: FloatArray, theta: FloatArray) -> FloatArray:
    return np.stack(
        (a * (np.cosh(t) * np.cos(theta) - 1.0), a * np.cosh(t) * np.sin(theta), a * t),
        axis=-1,
    )


def catenoid_exit(a: float, theta: float) -> float:
    """Parameter t > 0 where the shifted catenoid leaves the unit ball at angle theta."""

    def excess(t: float) -> float:
        p = _origin_catenoid_point(a, np.array(t), np.array(theta))
        return float(p @ p) - 1.0

    return float(brentq(excess, 0.0, 10.0, xtol=1e-15))


def catenoid_origin(
    neck: float = 0.3, segments: int = 64, layers: int = 16
) -> SimplicialSurface:
    """Catenoid piece whose waist passes through the origin, cut by the sphere.

    The axis is shifted by ``neck`` so the waist point at theta = 0 is the
    origin. Minimal but not free-boundary: the contact is not orthogonal.
    """
    if not 0.0 < neck < 0.5:
        msg = f"neck radius must be in (0, 0.5), got {neck}"
        raise DomainError(msg)
    if layers % 2:
        msg = f"layers must be even so the waist is sampled, got {layers}"
        raise DomainError(msg)
    theta = 2.0 * math.pi * np.arange(segments) / segments
    exits = np.array([catenoid_exit(neck, th) for th in theta])
    s = np.linspace(-1.0, 1.0, layers + 1)
    tt = s[:, None] * exits[None, :]
    verts = _origin_catenoid_point(neck, tt, np.broadcast_to(theta, tt.shape))
    verts = verts.reshape(-1, 3)
    rim = np.zeros(verts.shape[0], dtype=bool)
    rim[:segments] = rim[-segments:] = True
    verts[rim] /= np.linalg.norm(verts[rim], axis=1)[:, None]
    return SimplicialSurface(
        k=2,
        vertices=verts,
        cells=_grid_cells(layers + 1, segments),
        attestation=Attestation(kind="analytic", note="catenoid through the origin"),
    )


def chord(offset: float = 0.0, segments: int = 8, n: int = 2) -> SimplicialSurface:
    """Straight chord at distance ``offset`` from the origin, along e1."""
    if not 0.0 <= offset < 1.0:
        msg = f"chord offset must be in [0, 1), got {offset}"
        raise DomainError(msg)
    half = math.sqrt(1.0 - offset * offset)
    x = np.linspace(-half, half, segments + 1)
    pts = _embed(np.column_stack((x, np.full_like(x, offset))), n)
    pts[[0, -1]] /= np.linalg.norm(pts[[0, -1]], axis=1)[:, None]
    cells = np.column_stack((np.arange(segments), np.arange(1, segments + 1)))
    return SimplicialSurface(k=1, vertices=pts, cells=cells)


def _circle(radius: float, segments: int, n: int) -> SimplicialSurface:
    theta = 2.0 * math.pi * np.arange(segments) / segments
    height = math.sqrt(max(0.0, 1.0 - radius * radius))
    pts = _embed(
        np.column_stack(
            (radius * np.cos(theta), radius * np.sin(theta), np.full(segments, height))
        ),
        n,
    )
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    cells = np.column_stack((np.arange(segments), (np.arange(segments) + 1) % segments))
    return SimplicialSurface(k=1, vertices=pts, cells=cells)


def great_circle(segments: int = 256, n: int = 3) -> SimplicialSurface:
    """Equator of the unit sphere as a closed polygon, tagged analytic."""
    return _circle(1.0, segments, n).with_attestation(
        Attestation(kind="analytic", note="great circle")
    )


def small_circle(radius: float = 0.5, segments: int = 256, n: int = 3) -> SimplicialSurface:
    """Latitude circle of the given radius; not minimal in the sphere."""
    if not 0.0 < radius < 1.0:
        msg = f"small circle radius must be in (0, 1), got {radius}"
        raise DomainError(msg)
    return _circle(radius, segments, n)


def clifford_torus(grid: int = 64) -> SimplicialSurface:
    """Clifford torus (cos u, sin u, cos v, sin v)/sqrt 2 in the 3-sphere."""
    if grid < 3:
        msg = f"torus grid must be >= 3, got {grid}"
        raise DomainError(msg)
    angle = 2.0 * math.pi * np.arange(grid) / grid
    vv, uu = np.meshgrid(angle, angle, indexing="ij")
    verts = np.column_stack(
        (np.cos(uu).ravel(), np.sin(uu).ravel(), np.cos(vv).ravel(), np.sin(vv).ravel())
    ) / math.sqrt(2.0)
    return SimplicialSurface(
        k=2,
        vertices=verts,
        cells=_grid_cells(grid, grid, wrap_rows=True),
        attestation=Attestation(kind="analytic", note="Clifford torus"),
    )


SEED_KINDS: dict[str, Callable[..., SimplicialSurface]] = {
    "disk": disk,
    "tilted_disk": tilted_disk,
    "perturbed_disk": perturbed_disk,
    "annulus": annulus,
    "chord": chord,
    "catenoid": catenoid,
    "catenoid_origin": catenoid_origin,
    "spike": spike,
    "great_circle": great_circle,
    "small_circle": small_circle,
    "clifford_torus": clifford_torus,
}


def seed_surface(kind: str, **params: float) -> SimplicialSurface:
    """Build the named seed mesh.

    Integer-valued parameters (``refine_level``, ``segments`` and so on) may
    be passed as floats from configuration files.

    Raises:
        DomainError: On an unknown kind, an unknown parameter or a parameter
            out of range.
    """
    builder = SEED_KINDS.get(kind)
    if builder is None:
        msg = f"unknown seed kind {kind!r}; expected one of {sorted(SEED_KINDS)}"
        raise DomainError(msg)
    clean = {key: int(v) if key in INT_PARAMS else v for key, v in params.items()}
    try:
        surface = builder(**clean)
    except TypeError as e:
        msg = f"bad parameters for seed {kind!r}: {e}"
        raise DomainError(msg) from e
    logger.info(
        "seeded %s: k=%d n=%d cells=%d", kind, surface.k, surface.n, surface.cells.shape[0]
    )
    return surface
