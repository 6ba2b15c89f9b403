import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hyperball import geometry


def ball_vectors(n, max_norm=0.95):
    return arrays(
        np.float64, (n,), elements=st.floats(-0.55, 0.55, allow_nan=False)
    ).filter(lambda v: np.linalg.norm(v) < max_norm)


class TestBracket:
    def test_zero_argument(self):
        y = np.array([0.3, -0.2, 0.4])
        assert geometry.bracket(np.zeros(3), y) == 1.0

    def test_equal_arguments(self):
        x = np.array([0.6, 0.0, 0.0])
        assert geometry.bracket(x, x) == pytest.approx(1 - 0.36, abs=1e-15)

    def test_orthogonal_half_vectors(self):
        # direct arithmetic: sqrt(1 + 0.25*0.25 - 0) = sqrt(1.0625)
        v = geometry.bracket(np.array([0.5, 0, 0]), np.array([0, 0.5, 0]))
        assert v == pytest.approx(math.sqrt(1.0625), abs=1e-15)

    @given(ball_vectors(3), ball_vectors(3))
    @settings(max_examples=200, deadline=None)
    def test_symmetry_and_bounds(self, x, y):
        b = geometry.bracket(x, y)
        assert b == geometry.bracket(y, x)
        assert b >= 1.0 - np.linalg.norm(x) - 1e-12
        assert b < 2.0

    def test_expansion_forms_agree(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            x = rng.uniform(-0.5, 0.5, 3)
            y = rng.uniform(-0.5, 0.5, 3)
            alt = math.sqrt(
                float(np.dot(x - y, x - y))
                + (1 - float(np.dot(x, x))) * (1 - float(np.dot(y, y)))
            )
            assert geometry.bracket(x, y) == pytest.approx(alt, abs=1e-14)


class TestMobiusApply:
    def test_fixes_center_to_origin(self):
        a = np.array([0.3, 0.1, -0.2])
        assert np.all(geometry.mobius_apply(a, a) == 0.0)

    def test_sends_origin_to_center(self):
        a = np.array([0.3, 0.1, -0.2])
        np.testing.assert_allclose(geometry.mobius_apply(a, np.zeros(3)), a, atol=1e-15)

    @given(ball_vectors(3), ball_vectors(3))
    @settings(max_examples=200, deadline=None)
    def test_involution(self, a, x):
        back = geometry.mobius_apply(a, geometry.mobius_apply(a, x))
        assert np.linalg.norm(back - x) <= 1e-11

    def test_rejects_exterior_center(self):
        with pytest.raises(ValueError):
            geometry.mobius_apply(np.array([1.1, 0.0]), np.zeros(2))

    def test_norm_identity(self):
        # |phi_a(x)| [a,x] = |x - a|
        rng = np.random.default_rng(1)
        for _ in range(200):
            a, x = rng.uniform(-0.5, 0.5, (2, 4))
            lhs = np.linalg.norm(geometry.mobius_apply(a, x)) * geometry.bracket(a, x)
            assert lhs == pytest.approx(np.linalg.norm(x - a), abs=1e-12)


class TestConformalFactor:
    def test_center_at_origin(self):
        x = np.array([0.3, 0.4, 0.0])
        assert geometry.mobius_conformal_factor(np.zeros(3), x) == pytest.approx(
            1 - 0.25, abs=1e-15
        )

    def test_at_center(self):
        a = np.array([0.5, -0.1, 0.2])
        assert geometry.mobius_conformal_factor(a, a) == pytest.approx(1.0, abs=1e-14)

    def test_matches_image_norm(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            a, x = rng.uniform(-0.6, 0.6, (2, 3))
            if max(np.linalg.norm(a), np.linalg.norm(x)) >= 1:
                continue
            factor = geometry.mobius_conformal_factor(a, x)
            img = geometry.mobius_apply(a, x)
            assert factor + float(np.dot(img, img)) == pytest.approx(1.0, abs=1e-12)
            assert factor > 0


class TestJacobianDeterminant:
    def test_identity_at_zero_center(self):
        assert geometry.mobius_jacobian_det(np.zeros(3), np.array([0.2, 0.1, 0.0])) == 1.0

    def test_at_origin_argument(self):
        a = np.array([0.4, 0.0, 0.0])
        want = (1 - 0.16) ** 3
        assert geometry.mobius_jacobian_det(a, np.zeros(3)) == pytest.approx(want, abs=1e-15)

    def test_against_finite_differences(self):
        a = np.array([0.5, 0.0, 0.0])
        x = np.array([0.0, 0.3, 0.0])
        h = 1e-5
        J = np.empty((3, 3))
        for j in range(3):
            e = np.zeros(3)
            e[j] = h
            J[:, j] = (geometry.mobius_apply(a, x + e) - geometry.mobius_apply(a, x - e)) / (
                2 * h
            )
        det_fd = abs(np.linalg.det(J))
        det = geometry.mobius_jacobian_det(a, x)
        assert abs(det_fd - det) / det <= 1e-6


class TestGradAbsMobius:
    def test_zero_center_reduces_to_direction(self):
        x = np.array([0.3, 0.4, 0.0])
        for k in range(3):
            got = geometry.grad_abs_mobius(np.zeros(3), x, k)
            assert got == pytest.approx(x[k] / np.linalg.norm(x), abs=1e-14)

    def test_coordinate_relabeling_symmetry(self):
        a = np.array([0.4, 0.1, 0.0])
        x = np.array([0.2, 0.1, 0.3])
        perm = [1, 0, 2]
        assert geometry.grad_abs_mobius(a, x, 0) == pytest.approx(
            geometry.grad_abs_mobius(a[perm], x[perm], 1), abs=1e-15
        )

    def test_against_finite_differences(self):
        a = np.array([0.4, 0.0, 0.0])
        x = np.array([0.2, 0.1, 0.0])
        h = 1e-5
        for k in range(3):
            e = np.zeros(3)
            e[k] = h
            fd = (geometry.abs_mobius(a, x + e) - geometry.abs_mobius(a, x - e)) / (2 * h)
            assert geometry.grad_abs_mobius(a, x, k) == pytest.approx(fd, abs=1e-6)

    def test_rejects_diagonal(self):
        a = np.array([0.1, 0.2])
        with pytest.raises(ValueError):
            geometry.grad_abs_mobius(a, a, 0)


class TestHyperbolicDistance:
    def test_zero_iff_equal(self):
        a = np.array([0.2, -0.3, 0.1])
        assert geometry.hyperbolic_distance(a, a) == 0.0

    def test_radial_closed_form(self):
        r = 0.7
        got = geometry.hyperbolic_distance(np.zeros(3), np.array([r, 0, 0]))
        assert got == pytest.approx(math.log((1 + r) / (1 - r)), abs=1e-14)

    def test_symmetry_and_triangle(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            a, b, c = rng.uniform(-0.5, 0.5, (3, 3))
            dab = geometry.hyperbolic_distance(a, b)
            assert dab == pytest.approx(geometry.hyperbolic_distance(b, a), abs=1e-12)
            assert dab <= geometry.hyperbolic_distance(a, c) + geometry.hyperbolic_distance(
                c, b
            ) + 1e-12


class TestImageDistances:
    def test_origin_argument(self):
        a = np.array([0.6, 0.0])
        d, br = geometry.image_distance_identities(a, np.zeros(2))
        assert d == 0.0
        assert br == pytest.approx(1 - 0.36, abs=1e-15)

    def test_zero_center(self):
        x = np.array([0.3, 0.4])
        d, br = geometry.image_distance_identities(np.zeros(2), x)
        assert d == pytest.approx(0.5, abs=1e-15)
        assert br == 1.0

    def test_against_direct_evaluation(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            a, x = rng.uniform(-0.55, 0.55, (2, 3))
            d, br = geometry.image_distance_identities(a, x)
            img = geometry.mobius_apply(a, x)
            assert d == pytest.approx(np.linalg.norm(a - img), abs=1e-12)
            assert br == pytest.approx(geometry.bracket(a, img), abs=1e-12)


class TestMobiusSelfMap:
    def test_canonical_map(self):
        a = geometry.BallPoint(np.array([0.2, 0.3, 0.0]))
        m = geometry.MobiusSelfMap(a)
        np.testing.assert_allclose(m(np.zeros(3)), a.coords, atol=1e-15)

    def test_orthogonal_frame_applies(self):
        a = geometry.BallPoint(np.zeros(2))
        rot = np.array([[0.0, -1.0], [1.0, 0.0]])
        m = geometry.MobiusSelfMap(a, rot)
        # phi_0 = -identity, then the rotation
        np.testing.assert_allclose(m(np.array([0.5, 0.0])), [0.0, -0.5], atol=1e-15)

    def test_rejects_non_orthogonal_frame(self):
        a = geometry.BallPoint(np.zeros(2))
        with pytest.raises(ValueError):
            geometry.MobiusSelfMap(a, np.array([[1.0, 0.5], [0.0, 1.0]]))


class TestBallPoint:
    def test_norm_cached(self):
        p = geometry.BallPoint(np.array([3.0, 4.0]) / 10)
        assert p.norm == pytest.approx(0.5, rel=1e-15)

    def test_interior_constructor_rejects_boundary(self):
        with pytest.raises(ValueError):
            geometry.BallPoint.interior(np.array([1.0, 0.0]))

    def test_boundary_constructor(self):
        p = geometry.BallPoint.boundary(np.array([0.6, 0.8]))
        assert p.norm == pytest.approx(1.0, abs=1e-14)
        with pytest.raises(ValueError):
            geometry.BallPoint.boundary(np.array([0.5, 0.5]))
