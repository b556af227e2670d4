"""Simplicial k-surfaces in the unit ball of R^n.

A surface is stored as a vertex array of shape ``(N, n)`` and a cell array of
shape ``(M, k + 1)``. Boundary faces are the ``(k - 1)``-faces with exactly one
incident cell; their vertices are the boundary vertices. Surfaces are
immutable: every operation that moves vertices returns a new surface.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np
import numpy.typing as npt
from scipy.special import gamma

from src.errors import DomainError, InvariantViolationError

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
IntArray = npt.NDArray[np.int64]
BoolArray = npt.NDArray[np.bool_]

# A point or vector of R^n; the ambient dimension is its length.
AmbientVector = FloatArray

BALL_TOL = 1e-9
SPHERE_TOL = 1e-9
MIN_CELL_VOLUME = 1e-14
FRAME_TOL = 1e-12
SUPPORTED_K = (1, 2)


def as_vector(coords: npt.ArrayLike, n: int | None = None) -> AmbientVector:
    """Convert coordinates to a finite float vector of optional length ``n``.

    Raises:
        DomainError: If the input is not a finite one-dimensional vector of
            the requested length.
    """
    vec = np.asarray(coords, dtype=np.float64)
    if vec.ndim != 1:
        msg = f"expected a 1-d coordinate vector, got shape {vec.shape}"
        raise DomainError(msg)
    if n is not None and vec.shape[0] != n:
        msg = f"expected a vector of dimension {n}, got {vec.shape[0]}"
        raise DomainError(msg)
    if not np.all(np.isfinite(vec)):
        msg = f"vector has non-finite entries: {vec}"
        raise DomainError(msg)
    return vec


def unit_ball_volume(k: int) -> float:
    """Return |B^k| = pi^(k/2) / Gamma(k/2 + 1).

    Raises:
        DomainError: If ``k`` is not a positive integer.
    """
    if k <= 0:
        msg = f"unit ball volume needs k >= 1, got {k}"
        raise DomainError(msg)
    return float(math.pi ** (k / 2) / gamma(k / 2 + 1))


def unit_sphere_area(k: int) -> float:
    """Return |dB^k| = k |B^k| (counting measure 2 for k = 1)."""
    return k * unit_ball_volume(k)


def simplex_volumes(points: FloatArray) -> FloatArray:
    """Volumes of simplices given as an array of shape ``(M, j + 1, n)``.

    Uses the Gram determinant of the edge vectors, so it works in any
    ambient dimension. Zero-dimensional simplices have volume one.
    """
    j = points.shape[1] - 1
    if j == 0:
        return np.ones(points.shape[0])
    edges = points[:, 1:, :] - points[:, :1, :]
    if j == 1:
        return np.sqrt(np.einsum("mi,mi->m", edges[:, 0], edges[:, 0]))
    if j == 2:
        uu = np.einsum("mi,mi->m", edges[:, 0], edges[:, 0])
        vv = np.einsum("mi,mi->m", edges[:, 1], edges[:, 1])
        uv = np.einsum("mi,mi->m", edges[:, 0], edges[:, 1])
        return 0.5 * np.sqrt(np.clip(uu * vv - uv * uv, 0.0, None))
    gram = edges @ edges.transpose(0, 2, 1)
    det = np.clip(np.linalg.det(gram), 0.0, None)
    return np.sqrt(det) / math.factorial(j)


def measure_of(vertices: FloatArray, cells: IntArray) -> float:
    """Total k-measure of cells over a raw vertex array (no validation)."""
    return float(np.sum(simplex_volumes(vertices[cells])))


@dataclass(frozen=True)
class Attestation:
    """Evidence that a surface is minimal, required by corollary checks."""

    kind: Literal["solver", "analytic"]
    grad_norm: float | None = None
    grad_tol: float | None = None
    note: str = ""

    @property
    def converged(self) -> bool:
        """Analytic surfaces always count; solver output must meet its tolerance."""
        if self.kind == "analytic":
            return True
        if self.grad_norm is None or self.grad_tol is None:
            return False
        return self.grad_norm <= self.grad_tol


@dataclass(frozen=True)
class OrthoFrame:
    """k orthonormal ambient vectors spanning a tangent plane."""

    vectors: FloatArray

    def __post_init__(self) -> None:
        """Check pairwise orthonormality to ``FRAME_TOL``."""
        vecs = np.array(self.vectors, dtype=np.float64)
        if vecs.ndim != 2:
            msg = f"frame must be a (k, n) array, got shape {vecs.shape}"
            raise InvariantViolationError(msg)
        defect = np.max(np.abs(vecs @ vecs.T - np.eye(vecs.shape[0])))
        if defect > FRAME_TOL:
            msg = f"frame is not orthonormal (defect {defect:.3e})"
            raise InvariantViolationError(msg)
        vecs.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)

    @property
    def k(self) -> int:
        """Number of frame vectors."""
        return int(self.vectors.shape[0])

    def project(self, v: FloatArray) -> FloatArray:
        """Orthogonal projection of ``v`` onto the span of the frame."""
        return self.vectors.T @ (self.vectors @ v)


def orthonormalize(edges: FloatArray) -> FloatArray:
    """Gram-Schmidt on the rows of ``edges`` for a stack ``(M, k, n)``.

    Two passes of modified Gram-Schmidt keep the result orthonormal to
    rounding. Raises InvariantViolationError on (numerically) dependent rows.
    """
    basis = np.array(edges, dtype=np.float64)
    k = basis.shape[1]
    scale = np.max(np.linalg.norm(edges, axis=2), axis=1)
    for i in range(k):
        vec = basis[:, i, :]
        for _ in range(2):
            for j in range(i):
                coeff = np.einsum("mi,mi->m", vec, basis[:, j, :])
                vec = vec - coeff[:, None] * basis[:, j, :]
        norm = np.linalg.norm(vec, axis=1)
        if np.any(norm <= 1e-12 * scale):
            msg = "cannot build a tangent frame: degenerate cell"
            raise InvariantViolationError(msg)
        basis[:, i, :] = vec / norm[:, None]
    return basis


@dataclass(frozen=True, eq=False)
class SimplicialSurface:
    """A k-dimensional simplicial surface in the closed unit ball of R^n.

    Attributes:
        k: Intrinsic dimension (1 or 2).
        vertices: Vertex coordinates, shape ``(N, n)``.
        cells: Vertex indices of each cell, shape ``(M, k + 1)``.
        boundary_on_sphere: Enforce the free-boundary invariant that every
            boundary vertex lies on the unit sphere.
        label: Optional fixture name, used to look up allowances.
        attestation: Optional minimality evidence.
    """

    k: int
    vertices: FloatArray
    cells: IntArray
    boundary_on_sphere: bool = True
    label: str | None = None
    attestation: Attestation | None = None
    _boundary_faces: IntArray = field(init=False, repr=False)
    _boundary_cells: IntArray = field(init=False, repr=False)
    _boundary_opposite: IntArray = field(init=False, repr=False)
    _boundary_vertex: BoolArray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        """Freeze the arrays, build the boundary complex and validate."""
        if self.k not in SUPPORTED_K:
            msg = f"meshes support k in {SUPPORTED_K}, got k={self.k}"
            raise DomainError(msg)
        verts = np.array(self.vertices, dtype=np.float64)
        cells = np.array(self.cells, dtype=np.int64)
        if verts.ndim != 2 or verts.shape[1] < self.k:
            msg = f"vertices must have shape (N, n) with n >= k, got {verts.shape}"
            raise InvariantViolationError(msg)
        if cells.ndim != 2 or cells.shape[1] != self.k + 1 or cells.shape[0] == 0:
            msg = f"cells must have shape (M, {self.k + 1}), got {cells.shape}"
            raise InvariantViolationError(msg)
        if cells.min() < 0 or cells.max() >= verts.shape[0]:
            msg = "cell index out of range"
            raise InvariantViolationError(msg)
        verts.setflags(write=False)
        cells.setflags(write=False)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "cells", cells)
        self._build_boundary()
        self.validate()

    def _build_boundary(self) -> None:
        k = self.k
        # Face j of a cell drops local vertex j.
        keep = [[i for i in range(k + 1) if i != j] for j in range(k + 1)]
        faces = np.concatenate([self.cells[:, cols] for cols in keep], axis=0)
        faces = np.sort(faces, axis=1)
        m = self.cells.shape[0]
        uniq, first, counts = np.unique(
            faces, axis=0, return_index=True, return_counts=True
        )
        if np.any(counts > 2):
            msg = f"non-manifold surface: {int(np.sum(counts > 2))} faces shared by 3+ cells"
            raise InvariantViolationError(msg)
        on_boundary = counts == 1
        occurrence = first[on_boundary]
        cell_idx = occurrence % m
        dropped = occurrence // m
        boundary_faces = uniq[on_boundary]
        opposite = self.cells[cell_idx, dropped]
        flags = np.zeros(self.vertices.shape[0], dtype=bool)
        flags[boundary_faces.ravel()] = True
        for name, value in (
            ("_boundary_faces", boundary_faces),
            ("_boundary_cells", cell_idx),
            ("_boundary_opposite", opposite),
            ("_boundary_vertex", flags),
        ):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    def validate(self) -> None:
        """Check ball containment, sphere contact and cell non-degeneracy.

        Raises:
            InvariantViolationError: On the first violated invariant.
        """
        if not np.all(np.isfinite(self.vertices)):
            msg = "vertex coordinates must be finite"
            raise InvariantViolationError(msg)
        norms = np.linalg.norm(self.vertices, axis=1)
        worst = int(np.argmax(norms))
        if norms[worst] > 1.0 + BALL_TOL:
            msg = f"vertex {worst} lies outside the unit ball (|x| = {norms[worst]:.12f})"
            raise InvariantViolationError(msg)
        if self.boundary_on_sphere and np.any(self._boundary_vertex):
            gap = np.abs(norms[self._boundary_vertex] - 1.0)
            if np.max(gap) > SPHERE_TOL:
                msg = f"boundary vertex off the unit sphere by {np.max(gap):.3e}"
                raise InvariantViolationError(msg)
        volumes = self.cell_volumes()
        if np.min(volumes) <= MIN_CELL_VOLUME:
            bad = int(np.argmin(volumes))
            msg = f"degenerate cell {bad} (volume {volumes[bad]:.3e})"
            raise InvariantViolationError(msg)

    @property
    def n(self) -> int:
        """Ambient dimension."""
        return int(self.vertices.shape[1])

    @property
    def boundary_vertex(self) -> BoolArray:
        """Boolean flag per vertex, true on the boundary."""
        return self._boundary_vertex

    @property
    def boundary_faces(self) -> IntArray:
        """Boundary faces as sorted vertex tuples, shape ``(F, k)``."""
        return self._boundary_faces

    @property
    def boundary_cells(self) -> IntArray:
        """Index of the single cell incident to each boundary face."""
        return self._boundary_cells

    @property
    def boundary_opposite(self) -> IntArray:
        """Vertex of the incident cell not on each boundary face."""
        return self._boundary_opposite

    @property
    def has_boundary(self) -> bool:
        """Whether the surface has a non-empty boundary."""
        return bool(self._boundary_faces.shape[0])

    def cell_volumes(self) -> FloatArray:
        """k-volume of every cell."""
        return simplex_volumes(self.vertices[self.cells])

    def edges(self) -> IntArray:
        """Unique vertex pairs joined by a cell edge, shape ``(E, 2)``."""
        pairs = [
            self.cells[:, [i, j]]
            for i in range(self.k + 1)
            for j in range(i + 1, self.k + 1)
        ]
        return np.unique(np.sort(np.concatenate(pairs, axis=0), axis=1), axis=0)

    def mean_edge_length(self) -> float:
        """Mean length of the edges of the complex."""
        e = self.edges()
        return float(
            np.mean(np.linalg.norm(self.vertices[e[:, 1]] - self.vertices[e[:, 0]], axis=1))
        )

    def max_vertex_degree(self) -> int:
        """Largest number of edges meeting at a vertex."""
        e = self.edges()
        return int(np.max(np.bincount(e.ravel(), minlength=self.vertices.shape[0])))

    def with_vertices(self, vertices: FloatArray) -> SimplicialSurface:
        """Same connectivity and metadata, new vertex positions (revalidated)."""
        return replace(self, vertices=vertices)

    def with_attestation(self, attestation: Attestation | None) -> SimplicialSurface:
        """Same surface carrying new minimality evidence."""
        return replace(self, attestation=attestation)

    def with_label(self, label: str | None) -> SimplicialSurface:
        """Same surface under a new fixture label."""
        return replace(self, label=label)


def surface_measure(s: SimplicialSurface) -> float:
    """Sum of cell k-volumes."""
    return float(np.sum(s.cell_volumes()))


def boundary_measure(s: SimplicialSurface) -> float:
    """(k-1)-measure of the boundary; counting measure when k = 1."""
    if not s.has_boundary:
        return 0.0
    return float(np.sum(simplex_volumes(s.vertices[s.boundary_faces])))


def cell_frames(s: SimplicialSurface) -> FloatArray:
    """Orthonormal tangent frames of all cells, shape ``(M, k, n)``."""
    pts = s.vertices[s.cells]
    return orthonormalize(pts[:, 1:, :] - pts[:, :1, :])


def tangent_frame(s: SimplicialSurface, cell: int) -> OrthoFrame:
    """Gram-Schmidt frame of the edge vectors of one cell.

    Raises:
        DomainError: If ``cell`` is out of range.
        InvariantViolationError: If the cell is degenerate.
    """
    if not 0 <= cell < s.cells.shape[0]:
        msg = f"cell index {cell} out of range"
        raise DomainError(msg)
    pts = s.vertices[s.cells[cell]]
    edges = (pts[1:] - pts[0])[None, :, :]
    return OrthoFrame(orthonormalize(edges)[0])


def conormals_of(vertices: FloatArray, faces: IntArray, opposite: IntArray) -> FloatArray:
    """Outward unit conormals for boundary faces over a raw vertex array."""
    if faces.shape[0] == 0:
        return np.zeros((0, vertices.shape[1]))
    first = vertices[faces[:, 0]]
    out = first - vertices[opposite]
    if faces.shape[1] == 2:
        along = vertices[faces[:, 1]] - first
        along /= np.linalg.norm(along, axis=1)[:, None]
        out -= np.einsum("fi,fi->f", out, along)[:, None] * along
    return out / np.linalg.norm(out, axis=1)[:, None]


def boundary_conormals(s: SimplicialSurface) -> FloatArray:
    """Outward unit conormals of all boundary faces, shape ``(F, n)``."""
    return conormals_of(s.vertices, s.boundary_faces, s.boundary_opposite)


def outward_conormal(s: SimplicialSurface, boundary_face: int) -> AmbientVector:
    """Unit vector tangent to the incident cell, normal to the face, pointing out.

    Raises:
        DomainError: If the index does not name a boundary face.
    """
    if not 0 <= boundary_face < s.boundary_faces.shape[0]:
        msg = f"face {boundary_face} is not a boundary face"
        raise DomainError(msg)
    return boundary_conormals(s)[boundary_face]


def boundary_barycenters(s: SimplicialSurface) -> FloatArray:
    """Barycenters of the boundary faces, shape ``(F, n)``."""
    return np.mean(s.vertices[s.boundary_faces], axis=1)


def distance_to_boundary(s: SimplicialSurface, y: AmbientVector) -> float:
    """Euclidean distance from ``y`` to the boundary complex (inf if closed)."""
    if not s.has_boundary:
        return math.inf
    pts = s.vertices[s.boundary_faces]
    if s.k == 1:
        return float(np.min(np.linalg.norm(pts[:, 0] - y, axis=1)))
    a, b = pts[:, 0], pts[:, 1]
    d = b - a
    t = np.clip(np.einsum("fi,fi->f", y - a, d) / np.einsum("fi,fi->f", d, d), 0.0, 1.0)
    return float(np.min(np.linalg.norm(a + t[:, None] * d - y, axis=1)))


def refine(s: SimplicialSurface, *, project_boundary: bool = True) -> SimplicialSurface:
    """Midpoint subdivision of every cell (4 triangles or 2 segments each).

    With ``project_boundary`` the new midpoints of boundary faces are pushed
    radially onto the unit sphere; without it the subdivision is exact for
    flat cells and the result no longer claims boundary-on-sphere.
    """
    edges = s.edges()
    nv = s.vertices.shape[0]
    mids = 0.5 * (s.vertices[edges[:, 0]] + s.vertices[edges[:, 1]])
    lookup = {(int(a), int(b)): nv + i for i, (a, b) in enumerate(edges)}

    def mid(a: IntArray, b: IntArray) -> IntArray:
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        return np.array([lookup[(int(p), int(q))] for p, q in zip(lo, hi, strict=True)])

    c = s.cells
    if s.k == 1:
        m01 = mid(c[:, 0], c[:, 1])
        new_cells = np.stack(
            [np.column_stack((c[:, 0], m01)), np.column_stack((m01, c[:, 1]))], axis=1
        ).reshape(-1, 2)
        boundary_edge = np.zeros(edges.shape[0], dtype=bool)
    else:
        m01, m12, m20 = mid(c[:, 0], c[:, 1]), mid(c[:, 1], c[:, 2]), mid(c[:, 2], c[:, 0])
        new_cells = np.stack(
            [
                np.column_stack((c[:, 0], m01, m20)),
                np.column_stack((m01, c[:, 1], m12)),
                np.column_stack((m20, m12, c[:, 2])),
                np.column_stack((m01, m12, m20)),
            ],
            axis=1,
        ).reshape(-1, 3)
        face_keys = {(int(a), int(b)) for a, b in s.boundary_faces}
        boundary_edge = np.array([(int(a), int(b)) in face_keys for a, b in edges])
    if project_boundary and np.any(boundary_edge):
        mids[boundary_edge] /= np.linalg.norm(mids[boundary_edge], axis=1)[:, None]
    vertices = np.concatenate([s.vertices, mids], axis=0)
    logger.debug("refined %d cells into %d", c.shape[0], new_cells.shape[0])
    return SimplicialSurface(
        k=s.k,
        vertices=vertices,
        cells=new_cells,
        boundary_on_sphere=s.boundary_on_sphere and project_boundary,
        label=None,
        attestation=None,
    )


def transform(s: SimplicialSurface, matrix: npt.ArrayLike) -> SimplicialSurface:
    """Apply a linear map (typically a rotation) to every vertex."""
    mat = np.asarray(matrix, dtype=np.float64)
    return s.with_vertices(s.vertices @ mat.T)
