import math

import numpy as np
import pytest

from hyperball import quadrature
from hyperball._sampling import sphere_points
from hyperball.backend import mobius_apply_pairs


def sphere_monomial_integral(n, alpha):
    """int xi^alpha d sigma via the Gaussian-moment identity:
    prod (alpha_i - 1)!! / prod_{j < |alpha|/2} (n + 2j) for even alpha."""
    if any(a % 2 for a in alpha):
        return 0.0
    num = math.prod(math.prod(range(a - 1, 0, -2)) for a in alpha)
    den = math.prod(n + 2 * j for j in range(sum(alpha) // 2))
    return num / den


class TestSphereRule:
    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_normalization_and_nodes(self, n):
        rule = quadrature.sphere_rule(n, 8)
        assert abs(rule.weights.sum() - 1.0) <= 1e-12
        assert np.max(np.abs(np.linalg.norm(rule.nodes, axis=1) - 1.0)) <= 1e-13
        assert np.all(rule.weights > 0)

    @pytest.mark.parametrize("n", [3, 4])
    def test_first_moments_vanish(self, n):
        rule = quadrature.sphere_rule(n, 6)
        for k in range(n):
            assert abs(rule.weights @ rule.nodes[:, k]) <= 1e-14

    def test_coordinate_second_moment(self):
        for n in (3, 4):
            rule = quadrature.sphere_rule(n, 10)
            got = rule.weights @ rule.nodes[:, 0] ** 2
            assert got == pytest.approx(1.0 / n, abs=1e-13)

    @pytest.mark.parametrize("n,order", [(3, 12), (4, 8), (5, 6)])
    def test_monomial_exactness(self, n, order):
        rule = quadrature.sphere_rule(n, order)
        worst = 0.0
        degree = min(order, 6)

        def monomials(dims, budget):
            if dims == 0:
                yield ()
                return
            for d in range(budget + 1):
                for rest in monomials(dims - 1, budget - d):
                    yield (d, *rest)

        for alpha in monomials(n, degree):
            got = float(rule.weights @ np.prod(rule.nodes ** np.array(alpha), axis=1))
            worst = max(worst, abs(got - sphere_monomial_integral(n, alpha)))
        assert worst <= 1e-12

    def test_polar_escalation_refines_first_angle_only(self):
        base = quadrature.sphere_rule(4, 6)
        esc = quadrature.sphere_rule(4, 6, polar_order=20)
        assert len(esc) == len(base) // 6 * 20
        assert abs(esc.weights @ esc.nodes[:, 0] ** 2 - 0.25) <= 1e-13

    def test_rotation_preserves_measure(self):
        rule = quadrature.sphere_rule(3, 16)
        pole = np.array([0.3, -0.4, 0.5])
        rot = quadrature.rotate_rule(rule, pole)
        f = lambda T: np.exp(T[:, 0] + 0.5 * T[:, 2])
        assert rot.weights @ f(rot.nodes) == pytest.approx(
            rule.weights @ f(rule.nodes), abs=1e-9
        )
        # the first rotated node direction family looks along the pole
        H = quadrature.pole_rotation(pole)
        np.testing.assert_allclose(H @ np.array([1.0, 0, 0]), pole / np.linalg.norm(pole),
                                   atol=1e-15)

    def test_convergence_on_peaked_zonal_integrand(self):
        # doubling the order must gain >= 1e2 until the 1e-12 floor
        n = 3
        eta = np.array([0.0, 0.6, 0.8])
        f = lambda T: np.exp(4.0 * T @ eta)
        exact = None
        errors = []
        big = quadrature.sphere_rule(n, 96)
        exact = big.weights @ f(big.nodes)
        for order in (6, 12, 24):
            rule = quadrature.sphere_rule(n, order)
            errors.append(abs(rule.weights @ f(rule.nodes) - exact))
        for coarse, fine in zip(errors, errors[1:]):
            assert fine <= coarse / 1e2 or fine <= 1e-12


class TestBallRule:
    def test_mass_and_deficit(self):
        rule = quadrature.ball_rule(3, 16, 8, 1e-3)
        got = quadrature.integrate_nu(lambda P: np.ones(P.shape[0]), rule)
        assert got == pytest.approx(1.0 - rule.mass_deficit, abs=1e-13)
        assert rule.mass_deficit <= 3 * 1e-3

    def test_margin_validation(self):
        with pytest.raises(ValueError):
            quadrature.ball_rule(3, 8, 8, 0.0)
        with pytest.raises(ValueError):
            quadrature.ball_rule(3, 8, 8, 0.7)

    def test_second_moment(self):
        for n in (3, 4):
            rule = quadrature.ball_rule(n, 24, 8, 1e-12)
            got = quadrature.integrate_nu(lambda P: np.einsum("ij,ij->i", P, P), rule)
            assert got == pytest.approx(n / (n + 2.0), abs=1e-10)

    def test_nodes_interior(self):
        rule = quadrature.ball_rule(3, 16, 6, 1e-12)
        assert np.max(np.linalg.norm(rule.nodes, axis=1)) <= 1.0 - 1e-12

    def test_tau_moment(self):
        # (1-|x|^2)^(n+1) integrates against tau to 2/(n+2)
        for n in (3, 4):
            rule = quadrature.ball_rule(n, 32, 8, 1e-12)
            got = quadrature.integrate_tau(
                lambda P: (1.0 - np.einsum("ij,ij->i", P, P)) ** (n + 1), rule
            )
            assert got == pytest.approx(2.0 / (n + 2.0), abs=1e-9)

    def test_tau_divergence_rate_in_margin(self):
        # int (1-|x|^2)^(n-1) d tau = int (1-|x|^2)^(-1) d nu grows like
        # -(n/2) log(margin); successive decades must step by (n/2) ln 10
        n = 3
        f = lambda P: (1.0 - np.einsum("ij,ij->i", P, P)) ** (n - 1)
        vals = []
        for margin in (1e-1, 1e-2, 1e-3):
            rule = quadrature.ball_rule(n, 256, 6, margin)
            vals.append(quadrature.integrate_tau(f, rule))
        steps = np.diff(vals)
        want = n / 2.0 * math.log(10.0)
        assert steps == pytest.approx([want, want], rel=0.05)


class TestPushforward:
    def test_zero_center_is_reflection(self):
        rule = quadrature.ball_rule(3, 8, 6, 1e-6)
        pushed = quadrature.mobius_pushforward_nodes(rule, np.zeros(3))
        np.testing.assert_allclose(pushed.nodes, -rule.nodes, atol=1e-15)
        np.testing.assert_allclose(pushed.weights_tau, rule.weights_tau, rtol=1e-15)

    def test_images_interior(self):
        rule = quadrature.ball_rule(3, 8, 6, 1e-6)
        pushed = quadrature.mobius_pushforward_nodes(rule, np.array([0.4, 0.1, 0.0]))
        assert np.max(np.linalg.norm(pushed.nodes, axis=1)) < 1.0

    def test_tau_mass_invariance(self):
        n = 3
        rule = quadrature.ball_rule(n, 32, 12, 1e-12)
        a = np.array([0.3, 0.0, 0.0])
        f = lambda P: (1.0 - np.einsum("ij,ij->i", P, P)) ** (n + 1)
        direct = quadrature.integrate_tau(f, rule)
        composed = quadrature.integrate_tau(
            lambda P: f(mobius_apply_pairs(np.broadcast_to(a, P.shape), P)), rule
        )
        pushed = quadrature.integrate_tau(f, quadrature.mobius_pushforward_nodes(rule, a))
        assert composed == pytest.approx(direct, abs=1e-6)
        assert pushed == pytest.approx(composed, abs=1e-12)

    def test_rejects_boundary_center(self):
        rule = quadrature.ball_rule(3, 4, 4, 1e-6)
        with pytest.raises(ValueError):
            quadrature.mobius_pushforward_nodes(rule, np.array([1.0, 0.0, 0.0]))


class TestIntegrators:
    def test_sphere_vector_valued(self):
        rule = quadrature.sphere_rule(3, 8)
        got = quadrature.integrate_sphere(lambda T: np.tile([2.0, -1.0, 0.5], (T.shape[0], 1)), rule)
        np.testing.assert_allclose(got, [2.0, -1.0, 0.5], atol=1e-14)

    def test_linearity(self):
        rule = quadrature.sphere_rule(3, 8)
        rng = np.random.default_rng(5)
        c = rng.standard_normal((len(rule),))
        f = lambda T: T[:, 0] ** 2
        g = lambda T: np.abs(T[:, 1])
        lhs = quadrature.integrate_sphere(lambda T: 2.0 * f(T) + 3.0 * g(T), rule)
        rhs = 2.0 * quadrature.integrate_sphere(f, rule) + 3.0 * quadrature.integrate_sphere(
            g, rule
        )
        assert lhs == pytest.approx(rhs, rel=1e-14)
        del c

    def test_deterministic_reduction(self):
        rule = quadrature.ball_rule(3, 16, 8, 1e-6)
        f = lambda P: np.sin(P[:, 0]) + P[:, 1] ** 2
        first = quadrature.integrate_tau(f, rule)
        assert quadrature.integrate_tau(f, rule) == first


class TestSerialization:
    def test_sphere_roundtrip(self, tmp_path):
        rule = quadrature.sphere_rule(3, 6)
        path = tmp_path / "rule.csv"
        quadrature.save_sphere_rule(rule, path)
        back = quadrature.load_sphere_rule(path)
        assert back.n == 3 and back.order == 6
        np.testing.assert_array_equal(back.nodes, rule.nodes)
        np.testing.assert_array_equal(back.weights, rule.weights)

    def test_ball_roundtrip(self, tmp_path):
        rule = quadrature.ball_rule(3, 6, 4, 1e-3)
        path = tmp_path / "ball.csv"
        quadrature.save_ball_rule(rule, path)
        back = quadrature.load_ball_rule(path)
        assert not back.is_tensor
        np.testing.assert_array_equal(back.nodes, rule.nodes)
        np.testing.assert_array_equal(back.weights_tau, rule.weights_tau)
        f = lambda P: (1.0 - np.einsum("ij,ij->i", P, P)) ** 4
        assert quadrature.integrate_tau(f, back) == quadrature.integrate_tau(f, rule)

    def test_disk_cache(self, tmp_path, monkeypatch):
        monkeypatch.setenv(quadrature.CACHE_ENV_VAR, str(tmp_path))
        quadrature._sphere_rule_cached.cache_clear()
        rule = quadrature.get_sphere_rule(3, 7)
        files = list(tmp_path.iterdir())
        assert len(files) == 1 and "n3" in files[0].name
        again = quadrature.get_sphere_rule(3, 7)
        np.testing.assert_array_equal(again.nodes, rule.nodes)


class TestRotationInvariance:
    def test_random_rotation(self):
        rng = np.random.default_rng(6)
        for n in (3, 4):
            rule = quadrature.sphere_rule(n, 24)
            R = np.linalg.qr(rng.standard_normal((n, n)))[0]
            eta = sphere_points(rng, 1, n)[0]
            f = lambda T: np.exp(T @ eta)
            assert rule.weights @ f(rule.nodes @ R.T) == pytest.approx(
                rule.weights @ f(rule.nodes), abs=1e-9
            )
