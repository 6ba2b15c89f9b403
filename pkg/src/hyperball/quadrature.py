"""Deterministic product quadrature on the unit sphere and the unit ball.

Sphere rules realize the spherical coordinate product measure: each
polar angle theta_i carries the Jacobian factor sin^(n-1-i) theta_i,
which under u = cos theta_i becomes a Gauss-Jacobi weight
(1-u^2)^((n-2-i)/2); the azimuthal angle is a uniform trapezoid with
2*order points (exact for its trigonometric degree).  `order` is the
point count per polar angle, so polynomial exactness reaches well past
degree `order`.  Weights are normalized to total mass 1 (sigma is a
probability measure) and are all positive.

Ball rules tensor a Gauss-Legendre rule for n rho^(n-1) d rho on
[0, radius] against a sphere rule; nu is normalized so the full ball
has mass 1, and the tau weights divide by (1-|x|^2)^n.  Integration is
a fixed-order weighted reduction (NumPy pairwise summation), so results
are reproducible across runs and thread counts.
"""

import io
import os
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .geometry import BOUNDARY_MARGIN

CACHE_ENV_VAR = "HYPERBALL_CACHE_DIR"


@dataclass(eq=False)
class SphereRule:
    """Node/weight set for the normalized surface measure on S^(n-1)."""

    n: int
    order: int
    polar_order: int
    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return self.nodes.shape[0]


def sphere_rule(n, order, polar_order=None):
    """Product rule on S^(n-1).

    `polar_order` escalates only the first polar angle; operators that
    integrate kernels peaked at a known pole combine this with
    `rotate_rule` so the refined angle looks at the peak.
    """
    if n < 2:
        raise ValueError("sphere rules need n >= 2")
    if order < 2:
        raise ValueError("order must be >= 2")
    polar_order = order if polar_order is None else max(polar_order, order)

    angle_nodes = []
    angle_weights = []
    for i in range(1, n - 1):
        m = polar_order if i == 1 else order
        alpha = (n - 2 - i) / 2.0
        u, w = roots_jacobi(m, alpha, alpha)
        angle_nodes.append(u)
        angle_weights.append(w)
    m_az = 2 * order
    phi = 2.0 * np.pi * np.arange(m_az) / m_az
    angle_nodes.append(phi)
    angle_weights.append(np.full(m_az, 1.0 / m_az))

    grids = np.meshgrid(*angle_nodes, indexing="ij")
    wgrids = np.meshgrid(*angle_weights, indexing="ij")
    weights = np.ones_like(wgrids[0])
    for w in wgrids:
        weights = weights * w
    weights = weights.ravel()

    S = weights.shape[0]
    nodes = np.empty((S, n))
    sin_prod = np.ones(S)
    for i in range(n - 2):
        u = grids[i].ravel()
        nodes[:, i] = sin_prod * u
        sin_prod = sin_prod * np.sqrt(np.maximum(1.0 - u * u, 0.0))
    phi = grids[n - 2].ravel()
    nodes[:, n - 2] = sin_prod * np.cos(phi)
    nodes[:, n - 1] = sin_prod * np.sin(phi)

    weights /= weights.sum()
    return SphereRule(n=n, order=order, polar_order=polar_order, nodes=nodes, weights=weights)


@lru_cache(maxsize=64)
def _sphere_rule_cached(n, order, polar_order):
    return sphere_rule(n, order, polar_order)


def get_sphere_rule(n, order, polar_order=None):
    """Cached sphere rule (also consults the on-disk cache if enabled)."""
    polar_order = order if polar_order is None else max(polar_order, order)
    cache_dir = os.environ.get(CACHE_ENV_VAR)
    if cache_dir:
        path = os.path.join(cache_dir, f"sphere_n{n}_o{order}_p{polar_order}.csv")
        if os.path.exists(path):
            return load_sphere_rule(path)
        rule = _sphere_rule_cached(n, order, polar_order)
        os.makedirs(cache_dir, exist_ok=True)
        save_sphere_rule(rule, path)
        return rule
    return _sphere_rule_cached(n, order, polar_order)


def pole_rotation(pole):
    """Orthogonal (Householder) matrix H with H e_1 = pole/|pole|."""
    pole = np.asarray(pole, dtype=float)
    n = pole.shape[0]
    norm = np.linalg.norm(pole)
    if norm == 0.0:
        return np.eye(n)
    phat = pole / norm
    v = np.zeros(n)
    v[0] = 1.0
    v -= phat
    v2 = np.dot(v, v)
    if v2 < 1e-28:
        return np.eye(n)
    return np.eye(n) - 2.0 * np.outer(v, v) / v2


def rotate_rule(rule, pole):
    """Sphere rule with nodes rotated so the polar axis points at `pole`."""
    H = pole_rotation(pole)
    return SphereRule(
        n=rule.n,
        order=rule.order,
        polar_order=rule.polar_order,
        nodes=rule.nodes @ H.T,
        weights=rule.weights,
    )


@dataclass(eq=False)
class BallRule:
    """Node/weight set for the normalized volume measure nu and for tau.

    Tensor-structured rules keep their radial/sphere factors (`rho`,
    `radial_weights`, `sphere`), which the potential operators exploit;
    rules produced by `mobius_pushforward_nodes` or loaded from disk
    carry explicit node/weight arrays instead.
    """

    n: int
    radial_order: int
    boundary_margin: float
    radius: float
    rho: np.ndarray | None = None
    radial_weights: np.ndarray | None = None
    sphere: SphereRule | None = None
    _nodes: np.ndarray | None = None
    _weights_nu: np.ndarray | None = None
    _weights_tau: np.ndarray | None = None

    @property
    def is_tensor(self):
        return self.rho is not None

    @cached_property
    def mass_deficit(self):
        """nu-mass of the skipped boundary shell, 1 - radius^n <= n * margin."""
        return 1.0 - self.radius**self.n

    @cached_property
    def nodes(self):
        if self._nodes is not None:
            return self._nodes
        return (self.rho[:, None, None] * self.sphere.nodes[None, :, :]).reshape(-1, self.n)

    @cached_property
    def weights_nu(self):
        if self._weights_nu is not None:
            return self._weights_nu
        radial = self.n * self.rho ** (self.n - 1) * self.radial_weights
        return np.outer(radial, self.sphere.weights).ravel()

    @cached_property
    def weights_tau(self):
        if self._weights_tau is not None:
            return self._weights_tau
        radial = (
            self.n
            * self.rho ** (self.n - 1)
            * (1.0 - self.rho**2) ** (-self.n)
            * self.radial_weights
        )
        return np.outer(radial, self.sphere.weights).ravel()

    def __len__(self):
        if self.is_tensor:
            return self.rho.shape[0] * len(self.sphere)
        return self._nodes.shape[0]


def ball_rule(n, radial_order, sphere_order, boundary_margin=1e-3, *, radius=None, polar_order=None):
    """Tensor rule for the ball of the given outer `radius`.

    Default radius is 1 - boundary_margin; passing `radius` explicitly
    (e.g. the mean-value radius r) overrides the margin entirely.
    Gauss-Legendre nodes are strictly interior, so every node satisfies
    |x| <= 1 - BOUNDARY_MARGIN regardless.
    """
    if radial_order < 2 or sphere_order < 2:
        raise ValueError("orders must be >= 2")
    if not 0.0 < boundary_margin < 0.5:
        raise ValueError("boundary_margin must lie in (0, 0.5)")
    if radius is None:
        radius = 1.0 - boundary_margin
    u, w = np.polynomial.legendre.leggauss(radial_order)
    rho = 0.5 * radius * (u + 1.0)
    rw = 0.5 * radius * w
    sph = get_sphere_rule(n, sphere_order, polar_order)
    return BallRule(
        n=n,
        radial_order=radial_order,
        boundary_margin=boundary_margin,
        radius=radius,
        rho=rho,
        radial_weights=rw,
        sphere=sph,
    )


def mobius_pushforward_nodes(rule, x):
    """Push the rule's nodes through phi_x, keeping the tau weights.

    tau is invariant under Mobius self-maps, so the returned rule
    integrates f d-tau exactly as well as the original integrates
    (f o phi_x) d-tau; the nu weights are recomputed at the image
    nodes.  Used to center the Green singularity at the origin.
    """
    from . import backend

    x = np.asarray(x, dtype=float)
    if np.linalg.norm(x) > 1.0 - BOUNDARY_MARGIN:
        raise ValueError("pushforward center must be interior")
    nodes = backend.mobius_apply_many(x[None, :], rule.nodes)[0]
    wt = rule.weights_tau
    one_minus = 1.0 - np.einsum("ij,ij->i", nodes, nodes)
    return BallRule(
        n=rule.n,
        radial_order=rule.radial_order,
        boundary_margin=rule.boundary_margin,
        radius=rule.radius,
        _nodes=nodes,
        _weights_nu=wt * one_minus**rule.n,
        _weights_tau=wt.copy(),
    )


def integrate_sphere(f, rule):
    """Weighted sum of f over the sphere rule; f maps (S, n) -> (S,) or (S, m)."""
    vals = np.asarray(f(rule.nodes), dtype=float)
    return rule.weights @ vals


def integrate_nu(f, rule):
    """Integral of f against the normalized volume measure."""
    vals = np.asarray(f(rule.nodes), dtype=float)
    return rule.weights_nu @ vals


def integrate_tau(f, rule):
    """Integral of f against the invariant measure tau.

    The caller is responsible for the decay class: tau blows up like
    (1-|x|^2)^(-n) at the boundary, so results are only margin-stable
    for integrands decaying at least that fast.
    """
    vals = np.asarray(f(rule.nodes), dtype=float)
    return rule.weights_tau @ vals


# -- CSV serialization -------------------------------------------------------


def _write_rows(fh, header, columns):
    fh.write(",".join(header) + "\n")
    for row in zip(*columns):
        fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def save_sphere_rule(rule, path):
    with open(path, "w") as fh:
        fh.write(f"# sphere rule n={rule.n} order={rule.order} polar_order={rule.polar_order}\n")
        cols = [rule.nodes[:, k] for k in range(rule.n)] + [rule.weights]
        _write_rows(fh, [f"x{k+1}" for k in range(rule.n)] + ["weight"], cols)


def load_sphere_rule(path):
    with open(path) as fh:
        meta = fh.readline().strip().lstrip("# ").split()
        kv = dict(item.split("=") for item in meta[2:] if "=" in item)
        data = np.loadtxt(io.StringIO(fh.read()), delimiter=",", skiprows=1, ndmin=2)
    n = int(kv["n"])
    return SphereRule(
        n=n,
        order=int(kv["order"]),
        polar_order=int(kv["polar_order"]),
        nodes=data[:, :n],
        weights=data[:, n],
    )


def save_ball_rule(rule, path):
    with open(path, "w") as fh:
        fh.write(
            f"# ball rule n={rule.n} radial_order={rule.radial_order} "
            f"margin={rule.boundary_margin:.17g} radius={rule.radius:.17g}\n"
        )
        cols = [rule.nodes[:, k] for k in range(rule.n)] + [rule.weights_nu, rule.weights_tau]
        _write_rows(fh, [f"x{k+1}" for k in range(rule.n)] + ["weight_nu", "weight_tau"], cols)


def load_ball_rule(path):
    """Load a ball rule; the tensor factorization is not reconstructed."""
    with open(path) as fh:
        meta = fh.readline().strip().lstrip("# ").split()
        kv = dict(item.split("=") for item in meta[2:] if "=" in item)
        data = np.loadtxt(io.StringIO(fh.read()), delimiter=",", skiprows=1, ndmin=2)
    n = int(kv["n"])
    return BallRule(
        n=n,
        radial_order=int(kv["radial_order"]),
        boundary_margin=float(kv["margin"]),
        radius=float(kv["radius"]),
        _nodes=data[:, :n],
        _weights_nu=data[:, n],
        _weights_tau=data[:, n + 1],
    )
