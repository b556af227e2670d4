"""Tests for the numerical checks of the area bound and its corollaries."""

import math

import numpy as np
import pytest

from src.errors import DomainError, PreconditionError
from src.field.field_w import eval_w_batch
from src.geometry.mesh import Attestation, SimplicialSurface
from src.minimizer.seeds import chord, disk, great_circle
from src.verifier import checks
from src.verifier.fixtures import build_fixture

E1 = np.array([1.0, 0.0, 0.0])


@pytest.fixture(scope="module")
def disk_l3() -> SimplicialSurface:
    """Solved disk fixture."""
    return build_fixture("disk-L3")


@pytest.fixture(scope="module")
def diameter() -> SimplicialSurface:
    """Solved diameter fixture."""
    return build_fixture("chord")


class TestNames:
    """Check registry."""

    def test_aliases(self) -> None:
        """Short names resolve to canonical ones."""
        assert checks.canonical_check("main") == "main_theorem"
        assert checks.canonical_check("limit") == "boundary_term_limit"
        assert checks.canonical_check("lemma_a") == "lemma_a"

    def test_unknown(self) -> None:
        """Unknown names are domain errors."""
        with pytest.raises(DomainError):
            checks.canonical_check("lemma_z")

    def test_snap_to_boundary(self, disk_l3: SimplicialSurface) -> None:
        """Boundary points snap to a vertex; interior points are refused."""
        np.testing.assert_allclose(checks.snap_to_boundary(disk_l3, E1 + 1e-9), E1)
        with pytest.raises(PreconditionError):
            checks.snap_to_boundary(disk_l3, [0.0, 0.0, 0.0])


class TestMainTheorem:
    """Area against |B^k| on attested free-boundary surfaces."""

    def test_disk_passes(self, disk_l3: SimplicialSurface) -> None:
        """The disk deficit is within the catalog allowance."""
        r = checks.check_main_theorem(disk_l3)
        assert r.status == "pass"
        assert r.bound_or_target["unit_ball_volume"] == pytest.approx(math.pi)
        assert r.measured["area_gap"] < 0.0
        assert r.tolerance == 1e-2

    def test_diameter_is_exact(self, diameter: SimplicialSurface) -> None:
        """A diameter has length exactly |B^1| = 2."""
        r = checks.check_main_theorem(diameter)
        assert r.passed
        assert r.measured["area"] == pytest.approx(2.0)

    def test_unattested_surface_refused(self) -> None:
        """Minimality must be attested."""
        with pytest.raises(PreconditionError, match="attestation"):
            checks.check_main_theorem(disk(2))

    def test_unconverged_attestation_refused(self) -> None:
        """A solver attestation above tolerance is refused."""
        s = disk(2).with_attestation(Attestation(kind="solver", grad_norm=1e-3, grad_tol=1e-8))
        with pytest.raises(PreconditionError) as excinfo:
            checks.check_main_theorem(s)
        assert excinfo.value.offending == pytest.approx(1e-3)

    def test_closed_surface_refused(self) -> None:
        """Closed surfaces have no free boundary."""
        with pytest.raises(PreconditionError, match="no boundary"):
            checks.check_main_theorem(great_circle(32))

    def test_explicit_tolerance(self, disk_l3: SimplicialSurface) -> None:
        """tol_disc overrides the catalog allowance."""
        r = checks.check_main_theorem(disk_l3, tol_disc=1e-4)
        assert r.status == "fail"


class TestEqualityCase:
    """Tangency of x - y at near-equality."""

    def test_flat_disk_is_consistent(self, disk_l3: SimplicialSurface) -> None:
        """Near-equality and tangency both hold."""
        r = checks.check_equality_tangency(disk_l3, E1)
        assert r.passed
        assert r.measured["near_equality"] == 1.0
        assert r.measured["tangent"] == 1.0

    def test_catenoid_is_consistent(self) -> None:
        """Far from equality and not tangent."""
        s = build_fixture("catenoid")
        y = checks.snap_to_boundary(s, s.vertices[0])
        r = checks.check_equality_tangency(s, y)
        assert r.passed
        assert r.measured["near_equality"] == 0.0
        assert r.measured["tangent"] == 0.0


class TestCorollaries:
    """Surfaces through the origin and closed surfaces in the sphere."""

    def test_corollary1_disk(self, disk_l3: SimplicialSurface) -> None:
        """The disk passes through the origin."""
        assert checks.check_corollary1(disk_l3).passed

    def test_corollary1_needs_origin(self) -> None:
        """A chord off the origin is refused."""
        s = chord(offset=0.5).with_attestation(Attestation(kind="analytic"))
        with pytest.raises(PreconditionError, match="origin"):
            checks.check_corollary1(s)

    def test_corollary2_great_circle(self) -> None:
        """The equator has length 2 pi up to the polygon deficit."""
        r = checks.check_corollary2(build_fixture("great-circle"), 2)
        assert r.passed
        assert r.bound_or_target["unit_sphere_area"] == pytest.approx(2.0 * math.pi)

    def test_corollary2_small_circle_fails(self) -> None:
        """The falsely attested latitude circle is caught."""
        r = checks.check_corollary2(build_fixture("small-circle"), 2)
        assert r.status == "fail"
        assert r.residual == pytest.approx(math.pi, abs=1e-3)

    def test_corollary2_dimension_mismatch(self) -> None:
        """k must exceed the curve dimension by one."""
        with pytest.raises(DomainError):
            checks.check_corollary2(build_fixture("great-circle"), 3)

    def test_corollary2_needs_closed(self, diameter: SimplicialSurface) -> None:
        """Surfaces with boundary are refused."""
        with pytest.raises(PreconditionError):
            checks.check_corollary2(diameter, 2)


class TestIsoperimetric:
    """k|Sigma| = |dSigma| and the isoperimetric ratio."""

    def test_disk(self, disk_l3: SimplicialSurface) -> None:
        """Polygon identity defect is small and the ratio exceeds 4 pi."""
        r = checks.check_isoperimetric(disk_l3)
        assert r.passed
        assert r.measured["identity_defect"] < 2e-3
        assert r.measured["ratio"] >= 4.0 * math.pi

    def test_diameter(self, diameter: SimplicialSurface) -> None:
        """Two endpoints, length two."""
        r = checks.check_isoperimetric(diameter)
        assert r.passed
        assert r.measured["identity_defect"] == pytest.approx(0.0, abs=1e-12)

    def test_catenoid(self) -> None:
        """2|Sigma| = |dSigma| holds for the critical catenoid."""
        r = checks.check_isoperimetric(build_fixture("catenoid"))
        assert r.passed


class TestMonotonicity:
    """Density ratios around an interior point."""

    RADII = (0.1, 0.3, 0.5, 0.7, 0.9)

    def test_flat_disk_density_is_pi(self, disk_l3: SimplicialSurface) -> None:
        """Every ratio equals |B^2|."""
        r = checks.check_monotonicity(disk_l3, np.zeros(3), self.RADII)
        assert r.passed
        assert r.measured["ratio_min"] == pytest.approx(math.pi, rel=1e-3)
        assert r.measured["ratio_max"] == pytest.approx(math.pi, rel=1e-3)

    def test_spike_fails(self) -> None:
        """The negative control shows a decreasing ratio."""
        s = build_fixture("spike-negative")
        r = checks.check_monotonicity(s, np.zeros(3), (0.05, 0.1, 0.15, 0.3, 0.5, 0.8))
        assert r.status == "fail"
        assert r.notes == "density ratio decreases"

    def test_radius_reaching_boundary(self, disk_l3: SimplicialSurface) -> None:
        """Balls must miss the boundary."""
        with pytest.raises(PreconditionError):
            checks.check_monotonicity(disk_l3, np.zeros(3), (0.5, 1.2))

    def test_radii_must_increase(self, disk_l3: SimplicialSurface) -> None:
        """Radii are strictly increasing."""
        with pytest.raises(PreconditionError):
            checks.check_monotonicity(disk_l3, np.zeros(3), (0.3, 0.2))


class TestBoundaryTerms:
    """Divergence balance and the flux limit at a boundary point."""

    def test_flux_limit_on_diameter(self, diameter: SimplicialSurface) -> None:
        """Flux 1 - r/2 extrapolates to the limit 1 within tolerance."""
        r = checks.check_boundary_term_limit(diameter, [1.0, 0.0], (0.4, 0.2, 0.1, 0.05))
        assert r.passed
        assert r.bound_or_target["limit"] == pytest.approx(1.0)
        assert r.measured["flux@0.1"] == pytest.approx(0.95, abs=1e-6)

    def test_two_radii_inconclusive(self, diameter: SimplicialSurface) -> None:
        """No extrapolation from two radii."""
        r = checks.check_boundary_term_limit(diameter, [1.0, 0.0], (0.2, 0.1))
        assert r.status == "inconclusive"
        assert not r.counts_as_failure

    def test_radii_must_decrease(self, diameter: SimplicialSurface) -> None:
        """The limit is approached from above."""
        with pytest.raises(PreconditionError):
            checks.check_boundary_term_limit(diameter, [1.0, 0.0], (0.1, 0.2))

    def test_balance_side_conditions(self, disk_l3: SimplicialSurface) -> None:
        """Non-negative deficit and a vanishing sphere term on the disk."""
        r = checks.check_first_variation(disk_l3, E1, 0.3)
        assert r.measured["min_gap"] >= checks.GAP_FLOOR
        assert abs(r.measured["sphere_term"]) <= 1e-8
        assert r.tolerance == pytest.approx(disk_l3.mean_edge_length())

    def test_balance_radius_range(self, disk_l3: SimplicialSurface) -> None:
        """Radii outside (guard, 1) are refused."""
        with pytest.raises(PreconditionError):
            checks.check_first_variation(disk_l3, E1, 1.5)

    def test_refinement_needs_two_meshes(self, disk_l3: SimplicialSurface) -> None:
        """A single mesh is no refinement study."""
        with pytest.raises(PreconditionError):
            checks.check_first_variation_refinement([disk_l3], E1, 0.3)


class TestFieldSuites:
    """Randomized checks of W, small sample counts."""

    def test_lemma_a(self) -> None:
        """Non-negative deficit for k = 2."""
        r = checks.check_lemma_a(2, 500, 1)
        assert r.passed
        assert r.rng == "PCG64(1)"

    def test_lemma_a_k1_inconclusive(self) -> None:
        """k = 1 only reports the minimum."""
        r = checks.check_lemma_a(1, 200, 1)
        assert r.status == "inconclusive"

    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_lemma_b(self, k: int) -> None:
        """Closed form and sphere tangency; the sphere value is not rescaled."""
        r = checks.check_lemma_b(k, 200, 1)
        assert r.passed
        assert r.measured["max_on_sphere"] <= 1e-10
        assert "scaled" in r.notes

    def test_tangent_on_sphere_near_pole(self) -> None:
        """<W, x> stays below 1e-10 on the sphere close to the pole (k = 2)."""
        angle = 1e-2
        x = np.array([[math.cos(angle), math.sin(angle), 0.0]])
        y = np.array([[1.0, 0.0, 0.0]])
        w, _ = eval_w_batch(x, y, 2)
        assert abs(float(w[0] @ x[0])) <= 1e-10

    @pytest.mark.parametrize("k", [2, 3])
    def test_lemma_c(self, k: int) -> None:
        """Remainders at the deepest index are below their limit."""
        r = checks.check_lemma_c(k)
        assert r.passed
        assert r.measured["radial[20]"] < r.measured["radial[10]"]

    def test_derivative_oracle(self) -> None:
        """Analytic derivative against finite differences."""
        assert checks.check_derivative_oracle(2, 20, 1).passed

    def test_reproducible(self) -> None:
        """Equal seeds give identical reports."""
        assert checks.check_lemma_a(3, 100, 5) == checks.check_lemma_a(3, 100, 5)
