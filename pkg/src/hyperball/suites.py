"""Named verification suites: each check pins an identity or bound to a
numeric tolerance and reports the measured error.

The CLI `verify` command runs these with user-supplied configuration;
the acceptance test module runs them at the tolerances and sample
counts fixed below (which are the shipped defaults).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import roots_jacobi

from . import analysis, geometry, kernels, potentials, quadrature, specialfn
from ._sampling import ball_points, sphere_points
from .backend import mobius_apply_pairs


@dataclass(frozen=True)
class Check:
    name: str
    error: float
    tol: float

    @property
    def passed(self):
        return self.error <= self.tol

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: error {self.error:.3e} vs tol {self.tol:.1e}"


def _interior_pairs(rng, count, n, rmax=0.9, min_sep=0.0):
    a = ball_points(rng, count, n, rmax)
    x = ball_points(rng, count, n, rmax)
    if min_sep > 0.0:
        close = np.linalg.norm(a - x, axis=1) < min_sep
        x[close] = -x[close]
        keep = np.linalg.norm(a - x, axis=1) >= min_sep
        a, x = a[keep], x[keep]
    return a, x


# -- geometry ----------------------------------------------------------------


def suite_geometry(dims=(3, 4, 5), samples=1000, seed=11):
    checks = []
    for n in dims:
        rng = np.random.default_rng(seed + n)
        A, X = _interior_pairs(rng, samples, n)
        a2 = np.einsum("ij,ij->i", A, A)
        x2 = np.einsum("ij,ij->i", X, X)
        br = geometry.bracket_batch(A, X)

        # bracket expansion (two closed forms of the same quantity)
        alt = np.sqrt(np.einsum("ij,ij->i", X - A, X - A) + (1 - x2) * (1 - a2))
        checks.append(Check(f"n={n} bracket expansion", float(np.max(np.abs(br - alt))), 1e-11))

        lower = (1.0 - np.sqrt(x2)) - br
        checks.append(Check(f"n={n} bracket lower bound", float(np.max(lower)), 1e-11))
        checks.append(Check(f"n={n} bracket upper bound", float(np.max(br)) - 2.0, 0.0))

        img = mobius_apply_pairs(A, X)
        back = mobius_apply_pairs(A, img)
        checks.append(
            Check(f"n={n} involution", float(np.max(np.linalg.norm(back - X, axis=1))), 1e-11)
        )

        fixed = mobius_apply_pairs(A, A)
        checks.append(Check(f"n={n} phi_a(a) = 0", float(np.max(np.abs(fixed))), 1e-11))
        origin = mobius_apply_pairs(A, np.zeros_like(A))
        checks.append(
            Check(f"n={n} phi_a(0) = a", float(np.max(np.abs(origin - A))), 1e-11)
        )

        # norm identity |phi_a(x)| [a,x] = |x-a|
        err = np.abs(np.linalg.norm(img, axis=1) * br - np.linalg.norm(X - A, axis=1))
        checks.append(Check(f"n={n} image norm identity", float(np.max(err)), 1e-11))

        # conformal factor identity
        factor = (1 - x2) * (1 - a2) / br**2
        err = np.abs(factor - (1.0 - np.einsum("ij,ij->i", img, img)))
        checks.append(Check(f"n={n} conformal factor", float(np.max(err)), 1e-11))
        checks.append(
            Check(f"n={n} conformal positivity", float(-np.min(factor)), 0.0)
        )

        # image distance identities
        d1 = np.linalg.norm(A - img, axis=1) - (1 - a2) * np.sqrt(x2) / br
        d2 = geometry.bracket_batch(A, img) - (1 - a2) / br
        checks.append(Check(f"n={n} image distances", float(np.max(np.abs([d1, d2]))), 1e-11))

        # analytic vs finite-difference Jacobian determinant
        h = 1e-5
        det_fd = _fd_jacobian_det(A, X, h)
        det = (1 - a2) ** n / br ** (2 * n)
        rel = np.abs(det_fd - det) / det
        checks.append(Check(f"n={n} Jacobian det vs FD", float(np.max(rel)), 1e-6))
    return checks


def _fd_jacobian_det(A, X, h):
    N, n = X.shape
    J = np.empty((N, n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        J[:, :, j] = (mobius_apply_pairs(A, X + e) - mobius_apply_pairs(A, X - e)) / (2 * h)
    return np.abs(np.linalg.det(J))


# -- special functions -------------------------------------------------------


def suite_special(seed=5):
    checks = []

    worst = 0.0
    for t in (3, 4, 5):
        for k in (1, 2, 3):
            for r in (0.0, 0.5, 0.9):
                lhs, _ = integrate.quad(
                    lambda s: (1 - s * s) ** ((t - 3) / 2.0) / (1 - 2 * r * s + r * r) ** k,
                    -1.0,
                    1.0,
                    epsabs=1e-12,
                    epsrel=1e-12,
                    limit=400,
                )
                worst = max(worst, abs(lhs - specialfn.ren_kahler_rhs(t, k, r)))
    checks.append(Check("weighted-integral identity vs 2F1", worst, 1e-8))

    # Green profile additivity g(r,t) + g(t,t') = g(r,t')
    rng = np.random.default_rng(seed)
    worst = 0.0
    for n in (3, 4, 5):
        r, t, tp = np.sort(rng.uniform(0.05, 1.0, size=(50, 3)), axis=1).T
        lhs = specialfn.green_g(n, r, 1.0) * 0.0  # shape carrier
        for i in range(50):
            lhs = specialfn.green_g(n, r[i], t[i]) + specialfn.green_g(n, t[i], tp[i])
            worst = max(worst, abs(lhs - specialfn.green_g(n, r[i], tp[i])))
    checks.append(Check("Green profile additivity", worst, 1e-12))

    # q-ratio bounds on a dense grid
    worst = 0.0
    for n in (3, 4, 5, 8):
        t = np.linspace(0.0, 1.0, 1000)
        q = specialfn.q_ratio(n, t)
        low = 1.0 / (2 * n * (n - 1)) - 1e-12
        high = 1.0 / (n * (n - 2)) + 1e-12
        worst = max(worst, float(np.max(low - q)), float(np.max(q - high)))
    checks.append(Check("q-ratio bounds", worst, 0.0))

    # polynomial truncation: (b-n)/2 non-positive integer
    val = specialfn.f_n_series(5, 1.0, 5, 1.0, 0.7)  # (0)_k truncates at k=1
    checks.append(Check("series truncation (b = n)", abs(val - 1.0), 1e-15))

    # I_1 bound for n = 3 on [0, s0]
    s0 = 0.9
    grid = np.linspace(0.0, s0, 50)
    vals = np.array([specialfn.I0_series(3, 1.0, 4, 0.0, s) for s in grid])
    checks.append(
        Check("I_1 bound at n=3", float(np.max(np.abs(vals)) - 1.0 / (1.0 - s0)), 0.0)
    )
    return checks


# -- quadrature --------------------------------------------------------------


def _sphere_monomial_exact(n, alpha):
    """Closed form of int xi^alpha d sigma via half-integer gammas."""
    if any(a % 2 for a in alpha):
        return 0.0
    total = sum(alpha)
    num = math.prod(math.prod(range(2 * (a // 2) - 1, 0, -2)) for a in alpha)
    den = math.prod(n + 2 * j for j in range(total // 2))
    return num / den


def suite_quadrature(dims=(3, 4, 5), seed=3):
    checks = []
    for n in dims:
        order = {3: 12, 4: 10, 5: 8}[n] if n in (3, 4, 5) else 8
        rule = quadrature.get_sphere_rule(n, order)
        checks.append(Check(f"n={n} weights sum to 1", abs(float(rule.weights.sum()) - 1.0), 1e-12))
        checks.append(
            Check(
                f"n={n} nodes on sphere",
                float(np.max(np.abs(np.linalg.norm(rule.nodes, axis=1) - 1.0))),
                1e-13,
            )
        )
        checks.append(Check(f"n={n} positive weights", float(-np.min(rule.weights)), 0.0))

        worst = 0.0
        for alpha in _monomials_up_to(n, min(order, 6)):
            got = float(rule.weights @ np.prod(rule.nodes**np.array(alpha), axis=1))
            worst = max(worst, abs(got - _sphere_monomial_exact(n, alpha)))
        checks.append(Check(f"n={n} monomial exactness", worst, 1e-12))

        # zonal-integral reduction to a weighted 1-D integral
        rng = np.random.default_rng(seed + n)
        eta = sphere_points(rng, 1, n)[0]
        fh = quadrature.get_sphere_rule(n, 24)
        worst = 0.0
        pref = specialfn.surface_area_ratio(n)  # Gamma(n/2)/(Gamma((n-1)/2) Gamma(1/2))
        u, w = roots_jacobi(40, (n - 3) / 2.0, (n - 3) / 2.0)
        for f in (lambda t: np.ones_like(t), lambda t: t, lambda t: t**2, lambda t: t**4):
            lhs = float(fh.weights @ f(fh.nodes @ eta))
            rhs = pref * float(w @ f(u))
            worst = max(worst, abs(lhs - rhs))
        checks.append(Check(f"n={n} zonal reduction", worst, 1e-9))

        # rotation invariance for a smooth non-polynomial integrand
        R = np.linalg.qr(rng.standard_normal((n, n)))[0]
        f = lambda T: np.exp(T @ eta)
        lhs = float(fh.weights @ f(fh.nodes @ R.T))
        rhs = float(fh.weights @ f(fh.nodes))
        checks.append(Check(f"n={n} rotation invariance", abs(lhs - rhs), 1e-9))

        brule = quadrature.ball_rule(n, 24, order, 1e-12)
        got = quadrature.integrate_nu(lambda P: np.einsum("ij,ij->i", P, P), brule)
        checks.append(Check(f"n={n} nu second moment", abs(got - n / (n + 2.0)), 1e-10))
        got = quadrature.integrate_tau(
            lambda P: (1.0 - np.einsum("ij,ij->i", P, P)) ** (n + 1), brule
        )
        checks.append(Check(f"n={n} tau moment", abs(got - 2.0 / (n + 2.0)), 1e-8))

        # tau invariance under the node pushforward
        a = np.zeros(n)
        a[0] = 0.3
        pushed = quadrature.mobius_pushforward_nodes(brule, a)
        f = lambda P: (1.0 - np.einsum("ij,ij->i", P, P)) ** (n + 1)
        direct = quadrature.integrate_tau(f, brule)
        composed = quadrature.integrate_tau(
            lambda P: f(mobius_apply_pairs(np.broadcast_to(a, P.shape), P)), brule
        )
        via_nodes = quadrature.integrate_tau(f, pushed)
        checks.append(Check(f"n={n} tau Mobius invariance", abs(composed - direct), 1e-6))
        checks.append(Check(f"n={n} pushforward consistency", abs(via_nodes - composed), 1e-10))
        checks.append(
            Check(
                f"n={n} pushforward interior",
                float(np.max(np.linalg.norm(pushed.nodes, axis=1))) - (1.0 - 1e-15),
                0.0,
            )
        )
    return checks


def _monomials_up_to(n, degree):
    if n == 0:
        yield ()
        return
    for d in range(degree + 1):
        for rest in _monomials_up_to(n - 1, degree - d):
            yield (d, *rest)


# -- kernels -----------------------------------------------------------------


def suite_kernels(dims=(3, 4, 5), points_per_shell=20, shells=None, seed=17):
    checks = []
    shells = shells or (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
    base_order = {3: 48, 4: 24, 5: 12}
    for n in dims:
        rng = np.random.default_rng(seed + n)
        one = potentials.BoundaryField(
            n=n, eval=lambda T: np.ones((T.shape[0], 1)), lipschitz_L=0.0, name="1"
        )
        worst = 0.0
        rule = quadrature.get_sphere_rule(n, base_order.get(n, 12))
        for r in shells:
            for x in r * sphere_points(rng, points_per_shell, n):
                val = potentials.poisson_extension(one, x, rule=rule)[0]
                worst = max(worst, abs(val - 1.0))
        checks.append(Check(f"n={n} kernel normalization", worst, 1e-8))

        A, Y = _interior_pairs(rng, 200, n, rmax=0.9, min_sep=0.05)
        g1 = np.array([kernels.green_h(a, y) for a, y in zip(A, Y)])
        g2 = np.array([kernels.green_h(y, a) for a, y in zip(A, Y)])
        checks.append(Check(f"n={n} Green symmetry", float(np.max(np.abs(g1 - g2))), 1e-12))
    return checks


def suite_harmonicity(n=3, points=50, seed=23, order=64):
    """|L P_h[phi]| at interior samples (hyperbolic harmonicity of the
    extension); FD-dominated tolerance."""
    rng = np.random.default_rng(seed)
    phi = potentials.manufactured_linear(n).phi
    X = ball_points(rng, points, n, rmax=0.7)
    u = lambda P: potentials.poisson_extension_batch(phi, P, order=order)
    worst = 0.0
    for x in X:
        val = kernels.hyperbolic_laplacian(u, x)
        worst = max(worst, float(np.max(np.abs(val))))
    return [Check(f"n={n} harmonicity of extension", worst, 1e-3)]


# -- representation ----------------------------------------------------------


def suite_representation(dims=(3, 4), grid_points=100, seed=29,
                         sphere_order=24, radial_order=32):
    checks = []
    for n in dims:
        rng = np.random.default_rng(seed + n)
        X = ball_points(rng, grid_points, n, rmax=0.7)
        for pair in (potentials.manufactured_linear(n), potentials.manufactured_quadratic(n)):
            got = potentials.represent_batch(
                pair.phi, pair.psi, X, sphere_order=sphere_order, radial_order=radial_order
            )
            err = float(np.max(np.abs(got - pair.u(X))))
            checks.append(Check(f"n={n} representation ({pair.name})", err, 1e-4))
    return checks


def suite_green_mass(dims=(3, 4), radial_order=64, sphere_order=32):
    checks = []
    for n in dims:
        rule = quadrature.ball_rule(n, radial_order, sphere_order, 1e-12)
        worst = 0.0
        for r in (0.0, 0.3, 0.5, 0.8):
            y = np.zeros(n)
            y[0] = r
            got = potentials.green_mass(y, rule)
            want = (1.0 - r * r) ** (n - 1) / (2.0 * n * (n - 1))
            worst = max(worst, abs(got - want) / want)
        checks.append(Check(f"n={n} Green mass identity", worst, 1e-6))
    return checks


def suite_mean_value(n=3, r=0.5, sphere_order=24, radial_order=48):
    checks = []
    quad_pair = potentials.manufactured_quadratic(n)
    res = potentials.mean_value_residual(
        quad_pair.u, quad_pair.delta_h_u, r, n,
        radial_order=radial_order, sphere_order=sphere_order,
    )
    checks.append(Check(f"n={n} mean value (quadratic)", float(np.max(np.abs(res))), 1e-6))

    phi = potentials.manufactured_linear(n).phi
    u = lambda P: potentials.poisson_extension_batch(phi, P, order=sphere_order)
    zero = lambda P: np.zeros((P.shape[0], n))
    res = potentials.mean_value_residual(
        u, zero, r, n, radial_order=radial_order, sphere_order=sphere_order
    )
    checks.append(Check(f"n={n} mean value (harmonic)", float(np.max(np.abs(res))), 1e-6))
    return checks


def suite_du_origin(n=3, sphere_order=32, radial_order=48):
    pair = potentials.manufactured_linear(n)
    analytic = analysis.du_at_origin(
        pair.phi, pair.psi, n, sphere_order=sphere_order, radial_order=radial_order
    )
    fd = analysis.fd_jacobian(
        lambda P: potentials.represent_batch(
            pair.phi, pair.psi, P, sphere_order=sphere_order, radial_order=radial_order
        ),
        np.zeros((1, n)),
    )[0]
    err = float(np.max(np.abs(analytic - fd)))
    return [Check(f"n={n} Du(0) analytic vs FD", err, 1e-4)]


# -- Lipschitz bounds --------------------------------------------------------


def suite_lipschitz(n=3, pairs=20_000, seed=2024, scan_order=32,
                    green_radial=16, green_sphere=12):
    checks = []
    pair = potentials.manufactured_linear(n)
    consts = analysis.compute_constants(n, pair.L, pair.M)

    report = analysis.grad_bound_check_poisson(pair.phi, n, order=48)
    checks.append(
        Check(
            "extension gradient bound (alpha_0 L)",
            report["worst_violation"],
            1e-3 * consts.alpha0 * pair.L,
        )
    )

    spec = analysis.ScanSpec(n=n, pairs=pairs, seed=seed)
    green_f = lambda P: potentials.green_potential_batch(
        pair.psi, P, radial_order=green_radial, sphere_order=green_sphere
    )
    green_report = analysis.lipschitz_scan(green_f, spec)
    checks.append(
        Check("Green potential scan vs beta_0", green_report.max_ratio - consts.beta0, 0.0)
    )

    u_f = lambda P: potentials.poisson_extension_batch(
        pair.phi, P, order=scan_order, escalate=False
    ) - potentials.green_potential_batch(
        pair.psi, P, radial_order=green_radial, sphere_order=green_sphere
    )
    u_report = analysis.lipschitz_scan(u_f, spec)
    checks.append(Check("solution scan vs C_1", u_report.max_ratio - consts.C1, 0.0))
    return checks


# -- counterexample ----------------------------------------------------------


def suite_counterexample(M=2.0, points=20, seed=41):
    checks = []
    rng = np.random.default_rng(seed)
    Z = ball_points(rng, points, 2, rmax=0.6)
    u = lambda P: analysis.counterexample_w0(P, M, terms=300)
    worst = 0.0
    for z in Z:
        got = kernels.hyperbolic_laplacian(u, z)
        want = M * (1.0 - float(z @ z)) ** 2
        worst = max(worst, float(np.max(np.abs(got - want))))
    checks.append(Check("disk counterexample source term", worst, 5e-3))

    closed = analysis.counterexample_gradient(0.99, 0.0)
    checks.append(
        Check("gradient closed form at r=0.99", abs(closed - (-math.log(0.01) / 0.99)), 1e-10)
    )

    worst = 0.0
    for r in (0.9, 0.99, 0.999):
        margin = analysis.counterexample_gradient(r, M) - math.log(1.0 / (1.0 - r))
        worst = max(worst, -margin)
    checks.append(Check("gradient divergence thresholds", worst, 0.0))

    grid = np.linspace(0.5, 0.9999, 200)
    vals = np.array([analysis.counterexample_gradient(r, M) for r in grid])
    checks.append(Check("gradient monotone increase", float(np.max(-np.diff(vals))), 0.0))

    theta = np.linspace(0.0, 2.0 * np.pi, 2001)
    tr = analysis.w0_boundary(theta)
    chord = np.abs(np.exp(1j * theta[1:]) - np.exp(1j * theta[:-1]))
    ratios = np.abs(np.diff(tr)) / chord
    checks.append(Check("boundary trace Lipschitz", float(np.max(ratios)), 2.0))
    return checks


SUITES = {
    "geometry": suite_geometry,
    "special": suite_special,
    "quadrature": suite_quadrature,
    "kernels": suite_kernels,
    "harmonicity": suite_harmonicity,
    "representation": suite_representation,
    "green-mass": suite_green_mass,
    "mean-value": suite_mean_value,
    "du-origin": suite_du_origin,
    "lipschitz": suite_lipschitz,
    "counterexample": suite_counterexample,
}
