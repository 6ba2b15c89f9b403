import math

import mpmath
import numpy as np
import pytest
from scipy import integrate

from hyperball import specialfn


class TestPochhammer:
    def test_zeroth(self):
        assert specialfn.pochhammer(7.3, 0) == 1.0

    def test_factorial(self):
        assert specialfn.pochhammer(1.0, 6) == math.factorial(6)

    def test_truncation_at_nonpositive_integer(self):
        assert specialfn.pochhammer(-2.0, 3) == 0.0


class TestGauss2F1:
    def test_at_zero(self):
        assert specialfn.gauss_2f1(2.3, -0.7, 1.1, 0.0) == 1.0

    def test_atanh_identity(self):
        # F(1, 1/2; 3/2; s^2) = atanh(s)/s; oracle: 200-term direct series
        s = 0.5
        k = np.arange(200)
        oracle = float(np.sum(s ** (2 * k) / (2 * k + 1)))
        got = specialfn.gauss_2f1(1.0, 0.5, 1.5, s * s)
        assert got == pytest.approx(oracle, abs=1e-15)
        assert got == pytest.approx(math.atanh(s) / s, abs=1e-14)

    def test_polynomial_termination(self):
        # b = -2: exact quadratic in s
        a, c, s = 1.5, 2.0, 0.8
        want = 1.0 + a * (-2.0) / c * s + a * (a + 1) * (-2.0) * (-1.0) / (
            c * (c + 1) * 2.0
        ) * s * s
        assert specialfn.gauss_2f1(a, -2.0, c, s) == pytest.approx(want, rel=1e-15)

    def test_gauss_summation_at_one(self):
        a, b, c = 0.3, 0.4, 2.0
        want = float(
            mpmath.gamma(c) * mpmath.gamma(c - a - b) / (mpmath.gamma(c - a) * mpmath.gamma(c - b))
        )
        assert specialfn.gauss_2f1(a, b, c, 1.0) == pytest.approx(want, rel=1e-13)

    def test_divergence_flagged(self):
        with pytest.raises(specialfn.ConvergenceError):
            specialfn.gauss_2f1(1.0, 1.0, 1.0, 1.0)

    def test_rejects_bad_c(self):
        with pytest.raises(ValueError):
            specialfn.gauss_2f1(1.0, 1.0, -2.0, 0.5)

    def test_mpmath_cross_check(self):
        for (a, b, c, s) in [(2.0, 0.5, 3.5, 0.9), (0.25, 1.75, 1.5, 0.99)]:
            want = float(mpmath.hyp2f1(a, b, c, s))
            assert specialfn.gauss_2f1(a, b, c, s) == pytest.approx(want, rel=1e-12)


class TestRenKahlerIdentity:
    @pytest.mark.parametrize("t", [3, 4, 5])
    @pytest.mark.parametrize("k", [1, 2, 3])
    @pytest.mark.parametrize("r", [0.0, 0.5, 0.9])
    def test_quadrature_matches_hypergeometric(self, t, k, r):
        lhs, _ = integrate.quad(
            lambda s: (1 - s * s) ** ((t - 3) / 2.0) / (1 - 2 * r * s + r * r) ** k,
            -1.0,
            1.0,
            epsabs=1e-12,
            epsrel=1e-12,
            limit=400,
        )
        assert abs(lhs - specialfn.ren_kahler_rhs(t, k, r)) <= 1e-8


class TestGreenProfile:
    def test_closed_form_n3(self):
        for r in (0.1, 0.4, 0.9):
            want = (1.0 / r + r - 2.0) / 3.0
            assert specialfn.green_profile(3, r) == pytest.approx(want, rel=1e-13)

    def test_empty_interval(self):
        assert specialfn.green_g(3, 1.0, 1.0) == 0.0

    def test_rejects_zero_radius(self):
        with pytest.raises(ValueError):
            specialfn.green_g(4, 0.0, 0.5)

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 8])
    def test_against_adaptive_quadrature(self, n):
        for r in (0.2, 0.5, 0.85):
            want, _ = integrate.quad(
                lambda s: (1 - s * s) ** (n - 2) / s ** (n - 1), r, 1.0,
                epsabs=1e-13, epsrel=1e-13,
            )
            want /= n
            assert specialfn.green_profile(n, r) == pytest.approx(want, abs=1e-12)
            assert specialfn.green_g(n, r, 1.0) == pytest.approx(want, abs=1e-12)

    def test_two_argument_form(self):
        want, _ = integrate.quad(lambda s: (1 - s * s) ** 2 / s**3, 0.3, 0.7)
        assert specialfn.green_g(4, 0.3, 0.7) == pytest.approx(want / 4.0, abs=1e-12)

    def test_additivity(self):
        rng = np.random.default_rng(8)
        for n in (3, 4, 5):
            for _ in range(50):
                r, t, tp = np.sort(rng.uniform(0.05, 1.0, 3))
                lhs = specialfn.green_g(n, r, t) + specialfn.green_g(n, t, tp)
                assert lhs == pytest.approx(specialfn.green_g(n, r, tp), abs=1e-12)

    def test_boundary_series_matches_closed_form(self):
        # green_profile switches to the boundary series at r >= 1/2; the
        # closed form is still accurate at moderate radii, so both
        # evaluation paths must agree there
        for n in (3, 4, 7):
            for r in (0.5, 0.6, 0.75):
                series = specialfn.green_profile(n, r)
                closed = specialfn.green_g(n, r, 1.0)
                assert series == pytest.approx(closed, rel=1e-12)


class TestQRatio:
    def test_endpoints(self):
        assert specialfn.q_ratio(3, 0.0) == pytest.approx(1 / 3, rel=1e-15)
        assert specialfn.q_ratio(3, 1.0) == pytest.approx(1 / 12, rel=1e-15)

    def test_interior_value_in_bounds(self):
        q = specialfn.q_ratio(4, 0.5)
        assert 1 / 24 <= q <= 1 / 8

    @pytest.mark.parametrize("n", [3, 4, 5, 8])
    def test_bounds_on_grid(self, n):
        t = np.linspace(0.0, 1.0, 1000)
        q = specialfn.q_ratio(n, t)
        assert np.all(q >= 1 / (2 * n * (n - 1)) - 1e-12)
        assert np.all(q <= 1 / (n * (n - 2)) + 1e-12)

    def test_rejects_low_dimension(self):
        with pytest.raises(ValueError):
            specialfn.q_ratio(2, 0.5)


class TestFnSeries:
    def test_zero_argument(self):
        assert specialfn.f_n_series(5, 1.0, 4, 2.5, 0.0) == pytest.approx(1 / 2.5, rel=1e-15)

    def test_b_equals_n_truncates(self):
        assert specialfn.f_n_series(4, 2.0, 4, 3.0, 0.9) == pytest.approx(1 / 3.0, rel=1e-15)

    def test_against_high_precision_sum(self):
        # n=5, a=1, b=4, c=1 at s=1 vs a 1e5-term mpmath partial sum
        with mpmath.workdps(40):
            total = mpmath.mpf(0)
            coef = mpmath.mpf(1)
            for k in range(100_000):
                total += coef / (k + 1)
                coef *= (1 + k) * (mpmath.mpf(-1) / 2 + k) / ((mpmath.mpf(5) / 2 + k) * (k + 1))
        got = specialfn.f_n_series(5, 1.0, 4, 1.0, 1.0)
        assert got == pytest.approx(float(total), abs=1e-9)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            specialfn.f_n_series(3, -1.0, 4, 1.0, 0.5)
        with pytest.raises(ValueError):
            specialfn.f_n_series(3, 1.0, 4, -1.0, 0.5)


class TestMu2Sup:
    def test_truncating_case_is_inverse_c(self):
        assert specialfn.mu2_sup(4, 2.0, 4, 3.0) == pytest.approx(1 / 3.0, rel=1e-12)

    def test_mu22_n3_against_closed_form(self):
        # sum_k 1/((2k+1)(k+1)) = 2 ln 2, attained at s = 1
        assert specialfn.mu2_sup(3, 1.0, 4, 1.0) == pytest.approx(2 * math.log(2), abs=1e-4)

    def test_mu23_n3_exact(self):
        assert specialfn.mu2_sup(3, 0.5, 3, 0.5) == pytest.approx(2.0, rel=1e-12)

    def test_dominates_samples(self):
        mu = specialfn.mu2_sup(5, 1.0, 4, 1.0)
        for s in np.linspace(0, 1, 23):
            assert abs(specialfn.f_n_series(5, 1.0, 4, 1.0, float(s))) <= mu + 1e-12


class TestI0Series:
    def test_zero_argument(self):
        assert specialfn.I0_series(4, 1.0, 4, 0.3, 0.0) == pytest.approx(1 / 1.3, rel=1e-15)

    def test_equals_fn_with_shifted_c(self):
        got = specialfn.I0_series(5, 1.2, 4, 0.5, 0.8)
        assert got == pytest.approx(specialfn.f_n_series(5, 1.2, 4, 1.5, 0.8), rel=1e-15)

    def test_against_quadrature_of_integrand(self):
        n, a, b, m, s = 4, 1.0, 4, 0.0, 0.7
        want, _ = integrate.quad(
            lambda t: t**m * specialfn.gauss_2f1(a, (b - n) / 2.0, n / 2.0, t * s),
            0.0,
            1.0,
            epsabs=1e-13,
            epsrel=1e-13,
        )
        assert specialfn.I0_series(n, a, b, m, s) == pytest.approx(want, abs=1e-10)

    def test_n3_bound_on_interval(self):
        s0 = 0.9
        for s in np.linspace(0.0, s0, 40):
            assert abs(specialfn.I0_series(3, 1.0, 4, 0.0, float(s))) <= 1.0 / (1.0 - s0)


class TestSurfaceAreaRatio:
    def test_n3(self):
        assert specialfn.surface_area_ratio(3) == pytest.approx(0.5, rel=1e-14)

    def test_n4(self):
        assert specialfn.surface_area_ratio(4) == pytest.approx(2 / math.pi, rel=1e-14)

    def test_monotone_in_dimension(self):
        # gamma-ratio oracle via mpmath
        vals = [specialfn.surface_area_ratio(n) for n in range(3, 11)]
        assert all(b > a for a, b in zip(vals, vals[1:]))
        for n, v in zip(range(3, 11), vals):
            want = float(mpmath.gamma(n / 2) / (mpmath.sqrt(mpmath.pi) * mpmath.gamma((n - 1) / 2)))
            assert v == pytest.approx(want, rel=1e-13)
