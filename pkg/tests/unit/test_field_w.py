"""Tests for the vector field W and its derivatives."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.errors import DomainError, SingularityError
from src.field.field_w import (
    directional_derivative,
    div_gap_batch,
    div_trace,
    eval_w,
    eval_w_batch,
    lemma_a_gap,
    lemma_c_remainder,
    radial_component,
    radial_component_batch,
)
from src.geometry.mesh import OrthoFrame

E1_2D = np.array([1.0, 0.0])
E1_3D = np.array([1.0, 0.0, 0.0])


def unit(*coords: float) -> np.ndarray:
    """Normalized vector."""
    v = np.array(coords, dtype=float)
    return v / np.linalg.norm(v)


class TestEvalW:
    """Point evaluations against hand-computed values."""

    def test_k2_at_origin(self) -> None:
        """W(0) = y for k = 2."""
        np.testing.assert_allclose(eval_w([0.0, 0.0], E1_2D, 2).w, [1.0, 0.0])

    def test_k2_half_way(self) -> None:
        """W(1/2, 0) = (1/4, 0) + (1/2, 0)/(1/4) = (9/4, 0)."""
        sample = eval_w([0.5, 0.0], E1_2D, 2)
        np.testing.assert_allclose(sample.w, [2.25, 0.0])
        assert sample.quad_err == 0.0

    def test_k3_at_origin(self) -> None:
        """Constant integrand: W(0) = y + y/2."""
        np.testing.assert_allclose(eval_w(np.zeros(3), E1_3D, 3).w, [1.5, 0.0, 0.0])

    def test_error_is_relative_near_the_pole(self) -> None:
        """quad_err is bounded by tol times |x - y|^(2-k), not by tol."""
        y = np.array([1.0, 0.0, 0.0, 0.0, 0.0])
        x = np.array([0.99, 0.0, 0.0, 0.0, 0.0])
        tol = 1e-10
        sample = eval_w(x, y, 4, tol=tol)
        assert sample.quad_err <= tol * 0.01 ** (2 - 4)

    def test_batch_matches_scalar(self) -> None:
        """Graded Gauss agrees with adaptive Simpson."""
        rng = np.random.default_rng(7)
        y = rng.standard_normal((20, 4))
        y /= np.linalg.norm(y, axis=1)[:, None]
        x = 0.45 * rng.uniform(-1.0, 1.0, size=(20, 4))
        w, err = eval_w_batch(x, y, 3)
        for i in range(20):
            np.testing.assert_allclose(w[i], eval_w(x[i], y[i], 3).w, rtol=1e-8, atol=1e-9)
        assert np.all(err < 1e-6)

    def test_pole_off_sphere(self) -> None:
        """Poles must lie on the unit sphere."""
        with pytest.raises(DomainError):
            eval_w([0.0, 0.0], [0.5, 0.0], 2)

    def test_point_outside_ball(self) -> None:
        """Points must lie in the closed ball."""
        with pytest.raises(DomainError):
            eval_w([1.5, 0.0], [0.0, 1.0], 2)

    def test_guard_radius(self) -> None:
        """Evaluations at the pole are refused."""
        with pytest.raises(SingularityError):
            eval_w([1.0 - 1e-9, 0.0], E1_2D, 2)

    def test_dimension_must_be_positive(self) -> None:
        """k = 0 is meaningless."""
        with pytest.raises(DomainError):
            eval_w([0.0, 0.0], E1_2D, 0)


class TestRadialComponent:
    """The closed form of <W(x), x>."""

    def test_vanishes_at_origin(self) -> None:
        """|x - y| = 1 kills the second factor."""
        assert radial_component(np.zeros(3), E1_3D, 3) == 0.0

    def test_k2_value_matches_field(self) -> None:
        """(3/4)(4 - 1)/2 = 9/8 = <W, x> at (1/2, 0)."""
        x = np.array([0.5, 0.0])
        assert radial_component(x, E1_2D, 2) == pytest.approx(9.0 / 8.0)
        assert eval_w(x, E1_2D, 2).w @ x == pytest.approx(9.0 / 8.0)

    @settings(max_examples=40, deadline=None)
    @given(
        st.floats(0.05, 2.0 * math.pi - 0.05),
        st.floats(0.05, math.pi - 0.05),
        st.integers(1, 4),
    )
    def test_tangent_on_the_sphere(self, phi: float, theta: float, k: int) -> None:
        """<W(x), x> = 0 for |x| = 1, x != y."""
        x = np.array(
            [math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)]
        )
        y = np.array([0.0, 0.0, 1.0])
        assert abs(radial_component(x, y, k)) <= 1e-9
        assert abs(eval_w(x, y, k).w @ x) <= 1e-8 * max(1.0, float(np.linalg.norm(x - y)) ** (1 - k))

    def test_batch_closed_form(self) -> None:
        """Vectorized closed form equals the scalar one."""
        x = np.array([[0.5, 0.0, 0.0], [0.0, 0.3, 0.4]])
        y = np.array([E1_3D, E1_3D])
        expected = [radial_component(x[i], y[i], 3) for i in range(2)]
        np.testing.assert_allclose(radial_component_batch(x, y, 3), expected)


class TestDivergence:
    """Tangential divergence and its deficit."""

    def test_tangential_k2_is_exactly_one(self) -> None:
        """x - y in the frame span: no deficit at k = 2."""
        x = np.array([0.3, 0.2, 0.0])
        frame = OrthoFrame(np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]))
        assert div_trace(x, E1_3D, 2, frame) == pytest.approx(1.0, abs=1e-14)
        assert lemma_a_gap(x, E1_3D, 2, frame) == pytest.approx(0.0, abs=1e-14)

    def test_normal_k2(self) -> None:
        """x = 0, frame {e2, e3}: trace 1 - 2 = -1."""
        frame = OrthoFrame(np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]))
        assert div_trace(np.zeros(3), E1_3D, 2, frame) == pytest.approx(-1.0)
        assert lemma_a_gap(np.zeros(3), E1_3D, 2, frame) == pytest.approx(2.0)

    def test_normal_k3(self) -> None:
        """x = 0, frame orthogonal to e1: 3/2 - 3 - 3/4."""
        frame = OrthoFrame(np.eye(4)[1:])
        y = np.array([1.0, 0.0, 0.0, 0.0])
        assert div_trace(np.zeros(4), y, 3, frame) == pytest.approx(-2.25, abs=1e-10)

    def test_k1_deficit_can_be_negative(self) -> None:
        """With x - y tangent the k = 1 deficit is minus a positive integral."""
        x, y = np.array([0.0, 0.5]), E1_2D
        frame = OrthoFrame(unit(-1.0, 0.5)[None, :])
        assert lemma_a_gap(x, y, 1, frame) < 0.0

    def test_eval_w_reports_trace(self) -> None:
        """eval_w with a frame carries the trace."""
        frame = OrthoFrame(np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]))
        sample = eval_w(np.zeros(3), E1_3D, 2, frame=frame)
        assert sample.trace == pytest.approx(-1.0)

    def test_batch_gap_matches_scalar(self) -> None:
        """div_gap_batch agrees with lemma_a_gap."""
        x = np.array([[0.1, 0.2, 0.3], [-0.4, 0.1, 0.0]])
        y = np.array([unit(0.0, 1.0, 1.0), unit(1.0, 0.0, 0.0)])
        frames = np.array([np.eye(3)[:2], np.eye(3)[1:]])
        gap, _ = div_gap_batch(x, y, 3, frames)
        for i in range(2):
            expected = lemma_a_gap(x[i], y[i], 3, OrthoFrame(frames[i]))
            assert gap[i] == pytest.approx(expected, rel=1e-8)

    def test_batch_frame_shape_checked(self) -> None:
        """Frames must match the points."""
        with pytest.raises(DomainError):
            div_gap_batch(np.zeros((2, 3)), np.array([E1_3D, E1_3D]), 2, np.zeros((2, 2, 4)))


class TestDerivatives:
    """Directional derivatives and the near-pole remainder."""

    def test_k2_derivative_along_pole(self) -> None:
        """v/2 - v + 2u<u, v> with u = -y, v = y: (3/2, 0)."""
        d = directional_derivative([0.0, 0.0], E1_2D, 2, [1.0, 0.0])
        np.testing.assert_allclose(d, [1.5, 0.0])

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_matches_central_difference(self, k: int) -> None:
        """Analytic derivative against a finite difference of W."""
        x = np.array([0.2, -0.3, 0.1])
        y = unit(0.3, 0.4, 1.0)
        v = unit(1.0, 2.0, -0.5)
        h = 1e-5
        plus = eval_w(x + h * v, y, k, tol=1e-13).w
        minus = eval_w(x - h * v, y, k, tol=1e-13).w
        fd = (plus - minus) / (2 * h)
        np.testing.assert_allclose(directional_derivative(x, y, k, v), fd, atol=1e-6)

    def test_remainder_at_origin_k3(self) -> None:
        """|W(0) - y| = 1/2."""
        assert lemma_c_remainder(np.zeros(3), E1_3D, 3) == pytest.approx(0.5)

    def test_remainder_k2_closed_form(self) -> None:
        """|x/2| |x - y| with no integral term."""
        x = np.array([0.9, 0.0])
        assert lemma_c_remainder(x, E1_2D, 2) == pytest.approx(0.45 * 0.1)

    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_remainder_tends_to_zero(self, k: int) -> None:
        """Remainders shrink along a radial approach."""
        n = max(k + 1, 3)
        y = np.eye(n)[0]
        values = [lemma_c_remainder((1.0 - 10.0**-j) * y, y, k) for j in (2, 4, 6)]
        assert values[0] > values[1] > values[2]
        assert values[2] < 1e-3
