"""Tests for seed meshes and the critical catenoid."""

import math
from collections.abc import Callable

import numpy as np
import pytest

from src.errors import DomainError
from src.geometry.mesh import boundary_measure, surface_measure
from src.minimizer.catenoid import (
    CatenoidProfile,
    contact_mismatch,
    critical_catenoid,
    critical_catenoid_closed_form,
)
from src.minimizer.seeds import (
    SEED_KINDS,
    annulus,
    catenoid,
    catenoid_origin,
    chord,
    clifford_torus,
    disk,
    great_circle,
    seed_surface,
    small_circle,
    spike,
    tilted_disk,
)


@pytest.fixture(scope="module")
def profile() -> CatenoidProfile:
    """Shooting solution, computed once."""
    return critical_catenoid()


class TestCriticalCatenoid:
    """Shooting against the closed form."""

    def test_agrees_with_closed_form(self, profile: CatenoidProfile) -> None:
        """Both routes find the same surface."""
        closed = critical_catenoid_closed_form()
        assert profile.neck_radius == pytest.approx(closed.neck_radius, abs=1e-8)
        assert profile.parameter == pytest.approx(closed.parameter, abs=1e-8)
        assert profile.area == pytest.approx(closed.area, rel=1e-8)
        assert profile.boundary_length == pytest.approx(closed.boundary_length, rel=1e-8)

    def test_known_constants(self, profile: CatenoidProfile) -> None:
        """T tanh T = 1 at T = 1.19968, boundary circles of radius 0.8336."""
        assert profile.parameter == pytest.approx(1.19968, abs=1e-4)
        assert profile.neck_radius == pytest.approx(0.4605, abs=1e-3)
        assert profile.boundary_radius == pytest.approx(0.8336, abs=1e-3)
        assert profile.boundary_height == pytest.approx(0.5524, abs=1e-3)

    def test_area_is_half_boundary_length(self, profile: CatenoidProfile) -> None:
        """Free-boundary minimal surfaces satisfy 2|S| = |dS|."""
        assert profile.area == pytest.approx(0.5 * profile.boundary_length, rel=1e-8)

    def test_contact_is_orthogonal(self, profile: CatenoidProfile) -> None:
        """The mismatch vanishes at the critical neck."""
        assert contact_mismatch(profile.neck_radius) == pytest.approx(0.0, abs=1e-9)

    def test_mesh_area(self, profile: CatenoidProfile) -> None:
        """A fine grid reproduces the area and sits on the sphere."""
        s = catenoid(segments=128, layers=32)
        assert s.attestation is not None
        assert s.attestation.kind == "analytic"
        assert surface_measure(s) == pytest.approx(profile.area, rel=1e-2)
        np.testing.assert_allclose(
            np.linalg.norm(s.vertices[s.boundary_vertex], axis=1), 1.0
        )


class TestSeeds:
    """Individual seed meshes."""

    def test_disk_sizes(self) -> None:
        """Each refinement quadruples the triangle count."""
        assert disk(0).cells.shape[0] == 8
        assert disk(2).cells.shape[0] == 128

    def test_tilted_disk_passes_through_rotated_pole(self) -> None:
        """The boundary contains (cos 30, 0, sin 30)."""
        s = tilted_disk(2)
        target = np.array([math.sqrt(3.0) / 2.0, 0.0, 0.5])
        assert np.min(np.linalg.norm(s.vertices - target, axis=1)) < 1e-12

    def test_spike_is_not_flat(self) -> None:
        """The ring around the center leaves the plane."""
        s = spike(3)
        assert np.max(np.abs(s.vertices[:, 2])) == pytest.approx(0.125)
        assert s.attestation is None

    def test_annulus_area(self) -> None:
        """Flat quads: 2h times the polygon perimeter."""
        s = annulus(radius=0.75, rings=64, layers=4)
        h = math.sqrt(1.0 - 0.75**2)
        perimeter = 64 * 2.0 * 0.75 * math.sin(math.pi / 64)
        assert surface_measure(s) == pytest.approx(2.0 * h * perimeter, rel=1e-12)

    def test_catenoid_origin_contains_origin(self) -> None:
        """The waist point at theta = 0 is the origin."""
        s = catenoid_origin(neck=0.3, segments=32, layers=8)
        assert np.min(np.linalg.norm(s.vertices, axis=1)) < 1e-12
        assert s.has_boundary

    def test_catenoid_origin_needs_even_layers(self) -> None:
        """Odd layer counts would skip the waist."""
        with pytest.raises(DomainError):
            catenoid_origin(layers=7)

    def test_chord_length(self) -> None:
        """A chord at offset d has length 2 sqrt(1 - d^2)."""
        assert surface_measure(chord(offset=0.6)) == pytest.approx(1.6)

    def test_circles(self) -> None:
        """Polygon lengths approach 2 pi r."""
        assert surface_measure(great_circle()) == pytest.approx(2.0 * math.pi, abs=1e-3)
        assert surface_measure(small_circle(0.5)) == pytest.approx(math.pi, abs=1e-3)
        assert not great_circle(16).has_boundary

    def test_clifford_torus(self) -> None:
        """Area close to 2 pi^2, every vertex on the 3-sphere."""
        s = clifford_torus(64)
        assert s.n == 4
        np.testing.assert_allclose(np.linalg.norm(s.vertices, axis=1), 1.0)
        assert surface_measure(s) == pytest.approx(2.0 * math.pi**2, rel=1e-2)
        assert boundary_measure(s) == 0.0

    @pytest.mark.parametrize(
        ("builder", "kwargs"),
        [
            (disk, {"refine_level": 9}),
            (chord, {"offset": 1.0}),
            (annulus, {"radius": 1.2}),
            (small_circle, {"radius": 0.0}),
            (clifford_torus, {"grid": 2}),
            (catenoid_origin, {"neck": 0.6}),
        ],
    )
    def test_out_of_range(self, builder: Callable[..., object], kwargs: dict[str, float]) -> None:
        """Parameters outside their range are domain errors."""
        with pytest.raises(DomainError):
            builder(**kwargs)


class TestSeedSurface:
    """Dispatch by name."""

    def test_every_kind_is_registered(self) -> None:
        """The registry names every builder."""
        assert {"disk", "chord", "catenoid", "clifford_torus", "spike"} <= set(SEED_KINDS)

    def test_float_parameters_are_cast(self) -> None:
        """Config files may carry integer parameters as floats."""
        s = seed_surface("disk", refine_level=2.0)
        assert s.cells.shape[0] == 128

    def test_unknown_kind(self) -> None:
        """Unknown names are refused."""
        with pytest.raises(DomainError, match="unknown seed kind"):
            seed_surface("helicoid")

    def test_unknown_parameter(self) -> None:
        """Unknown keyword arguments become domain errors."""
        with pytest.raises(DomainError, match="bad parameters"):
            seed_surface("chord", radius=0.5)
