"""Tests for the projected-gradient area minimizer."""

import csv
import math
from pathlib import Path

import numpy as np
import pytest

from src.errors import InvariantViolationError, PreconditionError, SolverStallError
from src.geometry.mesh import SimplicialSurface, simplex_volumes, surface_measure
from src.minimizer.seeds import chord, disk, great_circle, perturbed_disk
from src.minimizer.solver import (
    SolveOptions,
    SolveStats,
    StepRule,
    area_gradient,
    minimize,
    orthogonality_angle,
    write_iteration_log,
)


@pytest.fixture
def bent_diameter() -> SimplicialSurface:
    """Diameter with interior vertices displaced by 0.1 sin(pi x).

    The displacement is odd under x -> -x, so the flow cannot pick up the
    parallel-translation mode that shortens chords.
    """
    s = chord(segments=8)
    verts = s.vertices.copy()
    verts[1:-1, 1] += 0.1 * np.sin(math.pi * verts[1:-1, 0])
    return s.with_vertices(verts)


class TestAreaGradient:
    """Gradient of the total measure."""

    def test_matches_finite_differences(self) -> None:
        """Unprojected gradient against central differences."""
        s = perturbed_disk(1, lift=0.2)
        grad = area_gradient(s, project=False)
        h = 1e-6
        for vertex in (0, 3, 10):
            for axis in range(3):
                plus = s.vertices.copy()
                minus = s.vertices.copy()
                plus[vertex, axis] += h
                minus[vertex, axis] -= h
                fd = (
                    np.sum(simplex_volumes(plus[s.cells]))
                    - np.sum(simplex_volumes(minus[s.cells]))
                ) / (2 * h)
                assert grad[vertex, axis] == pytest.approx(fd, abs=1e-7)

    def test_flat_disk_is_stationary(self) -> None:
        """The projected gradient of an equatorial disk vanishes."""
        grad = area_gradient(disk(3))
        assert np.max(np.linalg.norm(grad, axis=1)) < 1e-12

    def test_boundary_rows_are_tangent_to_sphere(self) -> None:
        """Projection removes the radial part at boundary vertices."""
        s = perturbed_disk(2, lift=0.3)
        grad = area_gradient(s)
        b = s.boundary_vertex
        radial = np.einsum("bi,bi->b", grad[b], s.vertices[b])
        np.testing.assert_allclose(radial, 0.0, atol=1e-14)


class TestMinimize:
    """Projected gradient descent."""

    def test_bent_diameter_straightens(self, bent_diameter: SimplicialSurface) -> None:
        """The flow reaches a diameter of length two."""
        surface, stats = minimize(bent_diameter, SolveOptions(grad_tol=1e-6))
        assert stats.converged
        assert stats.final_area == pytest.approx(2.0, abs=1e-9)
        assert stats.final_area < surface_measure(bent_diameter)
        assert stats.boundary_orthogonality_max_angle < 1e-5
        assert surface.attestation is not None
        assert surface.attestation.kind == "solver"
        assert surface.attestation.converged
        np.testing.assert_allclose(
            np.linalg.norm(surface.vertices[surface.boundary_vertex], axis=1), 1.0
        )

    def test_history_is_monotone(self, bent_diameter: SimplicialSurface) -> None:
        """Accepted steps never increase the area."""
        _, stats = minimize(bent_diameter, SolveOptions(grad_tol=1e-6))
        areas = [rec.area for rec in stats.history]
        assert all(b <= a for a, b in zip(areas, areas[1:], strict=False))
        assert stats.history[0].iteration == 0
        assert stats.iterations == stats.history[-1].iteration

    def test_converged_seed_returns_immediately(self) -> None:
        """A flat disk needs no iterations."""
        s = disk(3).with_label("disk-L3")
        surface, stats = minimize(s)
        assert stats.iterations == 0
        assert stats.converged
        assert surface.label == "disk-L3"
        np.testing.assert_allclose(surface.vertices, s.vertices, atol=1e-15)

    def test_iteration_cap(self, bent_diameter: SimplicialSurface) -> None:
        """max_iters bounds the run and leaves it unconverged."""
        surface, stats = minimize(bent_diameter, SolveOptions(max_iters=2, grad_tol=1e-12))
        assert stats.iterations == 2
        assert not stats.converged
        assert surface.attestation is not None
        assert not surface.attestation.converged

    def test_stall_carries_statistics(self, bent_diameter: SimplicialSurface) -> None:
        """An impossible line search raises with partial statistics."""
        rule = StepRule(initial_step=100.0, sufficient_decrease=0.99, max_halvings=1)
        with pytest.raises(SolverStallError) as excinfo:
            minimize(bent_diameter, SolveOptions(step_rule=rule))
        assert excinfo.value.stats.iterations == 0
        assert not excinfo.value.stats.converged

    def test_boundary_far_from_sphere(self) -> None:
        """Seeds must start near the free-boundary constraint."""
        s = SimplicialSurface(
            k=1,
            vertices=[[-0.5, 0.0], [0.5, 0.0]],
            cells=[[0, 1]],
            boundary_on_sphere=False,
        )
        with pytest.raises(PreconditionError) as excinfo:
            minimize(s)
        assert excinfo.value.offending == pytest.approx(0.5)


class TestDiagnostics:
    """Contact angles, statistics and logs."""

    def test_flat_disk_meets_sphere_orthogonally(self) -> None:
        """Zero contact angle."""
        assert orthogonality_angle(disk(3)) < 1e-12

    def test_tilted_chord_angle(self) -> None:
        """A chord at height 1/2 meets the circle at 30 degrees."""
        assert orthogonality_angle(chord(offset=0.5)) == pytest.approx(math.pi / 6)

    def test_closed_surface_has_no_angle(self) -> None:
        """Closed surfaces have no contact."""
        with pytest.raises(PreconditionError):
            orthogonality_angle(great_circle(32))

    def test_negative_area_rejected(self) -> None:
        """SolveStats guards its invariant."""
        with pytest.raises(InvariantViolationError):
            SolveStats(
                iterations=0,
                final_area=-1.0,
                final_grad_norm=0.0,
                boundary_orthogonality_max_angle=0.0,
                converged=True,
            )

    def test_iteration_log(self, bent_diameter: SimplicialSurface, tmp_path: Path) -> None:
        """One CSV row per recorded step."""
        _, stats = minimize(bent_diameter, SolveOptions(max_iters=5))
        path = tmp_path / "log" / "iterations.csv"
        write_iteration_log(stats, path)
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["iter", "area", "grad_norm", "max_angle"]
        assert len(rows) == len(stats.history) + 1
        assert float(rows[1][1]) == stats.history[0].area
