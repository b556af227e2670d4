"""Projected-gradient area minimization with boundary vertices on the sphere.

Each iteration moves every vertex against the area gradient, where the
gradient at a boundary vertex is first projected onto the tangent plane of
the unit sphere. After the move, boundary vertices are pushed radially back
onto the sphere and interior vertices that left the ball are pulled back to
its surface. Step lengths come from Armijo backtracking on the total area.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.errors import InvariantViolationError, PreconditionError, SolverStallError
from src.geometry.mesh import (
    MIN_CELL_VOLUME,
    Attestation,
    BoolArray,
    FloatArray,
    IntArray,
    SimplicialSurface,
    conormals_of,
    simplex_volumes,
)

logger = logging.getLogger(__name__)

SEED_SPHERE_SLACK = 0.2
STEP_GROWTH = 2.0
STEP_CAP_FACTOR = 64.0


class StepRule(BaseModel):
    """Backtracking line-search parameters."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    initial_step: float = Field(default=1.0, gt=0)
    shrink: float = Field(default=0.5, gt=0, lt=1)
    sufficient_decrease: float = Field(default=1e-4, gt=0, lt=1)
    max_halvings: int = Field(default=60, ge=1)


class SolveOptions(BaseModel):
    """Options for ``minimize``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    max_iters: int = Field(default=20000, ge=1)
    grad_tol: float = Field(default=1e-8, gt=0)
    step_rule: StepRule = Field(default_factory=StepRule)
    project_every_step: bool = True


@dataclass(frozen=True)
class IterationRecord:
    """One accepted step of the solver."""

    iteration: int
    area: float
    grad_norm: float
    max_angle: float


@dataclass(frozen=True)
class SolveStats:
    """Summary of a solve.

    Attributes:
        iterations: Number of accepted steps.
        final_area: Total k-measure of the returned surface.
        final_grad_norm: Largest projected per-vertex gradient norm.
        boundary_orthogonality_max_angle: Worst contact angle in radians
            (0 for closed surfaces).
        converged: Whether ``final_grad_norm <= grad_tol``.
        history: Accepted steps, starting with the initial state.
    """

    iterations: int
    final_area: float
    final_grad_norm: float
    boundary_orthogonality_max_angle: float
    converged: bool
    history: tuple[IterationRecord, ...] = field(default=(), repr=False)

    def __post_init__(self) -> None:
        """Reject negative areas."""
        if self.final_area < 0.0:
            msg = f"final area must be non-negative, got {self.final_area}"
            raise InvariantViolationError(msg)


def _cell_gradients(points: FloatArray) -> FloatArray:
    """Gradient of each cell's measure with respect to its vertices, ``(M, k+1, n)``."""
    if points.shape[1] == 2:
        d = points[:, 1] - points[:, 0]
        g = d / np.linalg.norm(d, axis=1)[:, None]
        return np.stack([-g, g], axis=1)
    u = points[:, 1] - points[:, 0]
    v = points[:, 2] - points[:, 0]
    uu = np.einsum("mi,mi->m", u, u)
    vv = np.einsum("mi,mi->m", v, v)
    uv = np.einsum("mi,mi->m", u, v)
    four_area = 2.0 * np.sqrt(np.clip(uu * vv - uv * uv, 0.0, None))
    gb = (vv[:, None] * u - uv[:, None] * v) / four_area[:, None]
    gc = (uu[:, None] * v - uv[:, None] * u) / four_area[:, None]
    return np.stack([-(gb + gc), gb, gc], axis=1)


def _gradient(
    vertices: FloatArray, cells: IntArray, boundary: BoolArray, *, project: bool
) -> FloatArray:
    per_cell = _cell_gradients(vertices[cells])
    grad = np.zeros_like(vertices)
    for j in range(cells.shape[1]):
        np.add.at(grad, cells[:, j], per_cell[:, j])
    if project and np.any(boundary):
        x = vertices[boundary]
        x_hat = x / np.linalg.norm(x, axis=1)[:, None]
        g = grad[boundary]
        grad[boundary] = g - np.einsum("bi,bi->b", g, x_hat)[:, None] * x_hat
    return grad


def area_gradient(s: SimplicialSurface, *, project: bool = True) -> FloatArray:
    """Gradient of total k-measure with respect to each vertex, shape ``(N, n)``.

    With ``project`` the rows of boundary vertices are projected onto the
    tangent plane of the unit sphere at that vertex.

    Raises:
        InvariantViolationError: If a cell is degenerate.
    """
    if np.min(s.cell_volumes()) <= MIN_CELL_VOLUME:
        msg = "area gradient is undefined on degenerate cells"
        raise InvariantViolationError(msg)
    return _gradient(s.vertices, s.cells, s.boundary_vertex, project=project)


def _angles(vertices: FloatArray, faces: IntArray, opposite: IntArray) -> FloatArray:
    if faces.shape[0] == 0:
        return np.zeros(0)
    nu = conormals_of(vertices, faces, opposite)
    bary = np.mean(vertices[faces], axis=1)
    r_hat = bary / np.linalg.norm(bary, axis=1)[:, None]
    along = np.einsum("fi,fi->f", nu, r_hat)
    across = np.linalg.norm(nu - along[:, None] * r_hat, axis=1)
    return np.arctan2(across, along)


def _max_angle(vertices: FloatArray, s: SimplicialSurface) -> float:
    angles = _angles(vertices, s.boundary_faces, s.boundary_opposite)
    return float(np.max(angles)) if angles.size else 0.0


def orthogonality_angle(s: SimplicialSurface) -> float:
    """Largest angle between the outward conormal and x/|x| at face barycenters.

    Raises:
        PreconditionError: If the surface has no boundary.
    """
    if not s.has_boundary:
        msg = "orthogonality angle needs a surface with boundary"
        raise PreconditionError(msg)
    return _max_angle(s.vertices, s)


def _project(vertices: FloatArray, boundary: BoolArray) -> FloatArray:
    out = vertices.copy()
    norms = np.linalg.norm(out, axis=1)
    out[boundary] /= norms[boundary][:, None]
    outside = ~boundary & (norms > 1.0)
    out[outside] /= norms[outside][:, None]
    return out


def _stats(
    vertices: FloatArray,
    s: SimplicialSurface,
    grad_norm: float,
    grad_tol: float,
    history: list[IterationRecord],
) -> SolveStats:
    return SolveStats(
        iterations=history[-1].iteration,
        final_area=float(np.sum(simplex_volumes(vertices[s.cells]))),
        final_grad_norm=grad_norm,
        boundary_orthogonality_max_angle=_max_angle(vertices, s),
        converged=grad_norm <= grad_tol,
        history=tuple(history),
    )


def _grad_norm(grad: FloatArray) -> float:
    return float(np.max(np.linalg.norm(grad, axis=1)))


def minimize(
    s: SimplicialSurface, opts: SolveOptions | None = None
) -> tuple[SimplicialSurface, SolveStats]:
    """Run projected gradient descent on the total k-measure.

    The returned surface carries a solver attestation with the final
    gradient norm; connectivity and label are unchanged. With
    ``project_every_step`` off, the constraint projection is applied once to
    the final iterate instead.

    Raises:
        PreconditionError: If a boundary vertex starts more than 0.2 away
            from the unit sphere.
        SolverStallError: If the line search fails ``max_halvings`` times in
            a row; the partial statistics are attached.
    """
    opts = opts or SolveOptions()
    rule = opts.step_rule
    boundary = s.boundary_vertex
    cells = s.cells
    offset = np.abs(np.linalg.norm(s.vertices[boundary], axis=1) - 1.0)
    if offset.size and np.max(offset) > SEED_SPHERE_SLACK:
        msg = f"boundary vertices must start within {SEED_SPHERE_SLACK} of the sphere"
        raise PreconditionError(msg, offending=float(np.max(offset)))

    verts = _project(s.vertices, boundary)
    area = float(np.sum(simplex_volumes(verts[cells])))
    base_step = rule.initial_step * s.mean_edge_length() ** (2 - s.k) / s.max_vertex_degree()
    step = base_step
    grad = _gradient(verts, cells, boundary, project=True)
    grad_norm = _grad_norm(grad)
    history = [IterationRecord(0, area, grad_norm, _max_angle(verts, s))]

    while grad_norm > opts.grad_tol and history[-1].iteration < opts.max_iters:
        sq = float(np.sum(grad * grad))
        step = min(STEP_GROWTH * step, STEP_CAP_FACTOR * base_step)
        for _ in range(rule.max_halvings):
            trial = verts - step * grad
            if opts.project_every_step:
                trial = _project(trial, boundary)
            volumes = simplex_volumes(trial[cells])
            trial_area = float(np.sum(volumes))
            moved = not np.array_equal(trial, verts)
            if (
                moved
                and np.min(volumes) > MIN_CELL_VOLUME
                and trial_area <= area - rule.sufficient_decrease * step * sq
            ):
                break
            step *= rule.shrink
        else:
            msg = (
                f"line search failed after {rule.max_halvings} halvings "
                f"at iteration {history[-1].iteration + 1} (area {area:.12g})"
            )
            raise SolverStallError(msg, _stats(verts, s, grad_norm, opts.grad_tol, history))
        verts, area = trial, trial_area
        grad = _gradient(verts, cells, boundary, project=True)
        grad_norm = _grad_norm(grad)
        it = history[-1].iteration + 1
        history.append(IterationRecord(it, area, grad_norm, _max_angle(verts, s)))
        logger.debug("iter %d: area %.12f grad %.3e step %.3e", it, area, grad_norm, step)

    if not opts.project_every_step:
        verts = _project(verts, boundary)
        grad_norm = _grad_norm(_gradient(verts, cells, boundary, project=True))
    stats = _stats(verts, s, grad_norm, opts.grad_tol, history)
    result = replace(
        s,
        vertices=verts,
        boundary_on_sphere=True,
        attestation=Attestation(kind="solver", grad_norm=grad_norm, grad_tol=opts.grad_tol),
    )
    logger.info(
        "solve %s after %d iterations: area %.10f, grad %.3e, max angle %.3e rad",
        "converged" if stats.converged else "stopped",
        stats.iterations,
        stats.final_area,
        stats.final_grad_norm,
        stats.boundary_orthogonality_max_angle,
    )
    return result, stats


def write_iteration_log(stats: SolveStats, path: Path) -> None:
    """Write the solver history as CSV with columns iter, area, grad_norm, max_angle."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter", "area", "grad_norm", "max_angle"])
        for rec in stats.history:
            writer.writerow(
                [rec.iteration, repr(rec.area), repr(rec.grad_norm), repr(rec.max_angle)]
            )
