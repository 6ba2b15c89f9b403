"""The two integral operators of the Dirichlet problem for the
hyperbolic Laplacian and the identities that verify them.

``poisson_extension`` integrates the Poisson-Szego kernel against
boundary data; ``green_potential`` integrates the invariant Green
function against an interior source.  Solutions are represented as

    u = poisson_extension(phi) - green_potential(psi).

The Green integral is *always* evaluated in Mobius-substituted form

    int G_h(x, y) psi(y) dtau(y) = int g(|w|) psi(phi_x(w)) dtau(w),

which moves the singularity to the origin where the radial weight
n rho^(n-1) g(rho) is bounded (it extends continuously with value
rho * q(rho) * (1-rho^2)^(n-1), q bounded).  The radial profile is
assembled through q, so no large cancelling factors ever meet.

Kernel peaking: the Poisson kernel concentrates at scale (1-|x|), so
the extension escalates its polar resolution like
ESCALATION_COEFF/(1-|x|) and warns once the cap is hit; accuracy decays
gracefully past it.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import backend
from ._sampling import ball_points, sphere_points
from .geometry import BOUNDARY_MARGIN, _coords
from .quadrature import (
    BallRule,
    ball_rule,
    get_sphere_rule,
    rotate_rule,
)
from .specialfn import green_g, q_ratio

DEFAULT_SPHERE_ORDER = 48
DEFAULT_RADIAL_ORDER = 64
#: margin used by the substituted Green rules; the substituted integrand
#: is regular up to the boundary, so only a token margin is needed
GREEN_RULE_MARGIN = 1e-12
#: polar points per unit of 1/(1-|x|); 8 leaves ~2e-6 (n=3) to ~1e-4
#: (n=5) normalization error at |x| = 0.9, 16 reaches ~4e-11 everywhere
ESCALATION_COEFF = 16.0
MAX_POLAR_ORDER = 512


class AccuracyWarning(UserWarning):
    """Requested evaluation point outruns the escalation cap."""


def _escalated_polar(base, r, coeff=ESCALATION_COEFF, cap=MAX_POLAR_ORDER):
    target = max(base, math.ceil(coeff / max(1.0 - r, 1e-12)))
    if target > cap:
        warnings.warn(
            f"kernel resolution {target} exceeds the cap {cap}; "
            f"accuracy degrades within {cap / coeff:.3g} of the boundary",
            AccuracyWarning,
            stacklevel=3,
        )
        return cap
    return target


@dataclass(frozen=True)
class Majorant:
    """Modulus-of-continuity bound: increasing, zero at zero, omega(t)/t
    non-increasing.  Only the linear one enters the quantitative bounds."""

    fn: Callable[[np.ndarray], np.ndarray]
    name: str = "majorant"

    def __call__(self, t):
        return self.fn(np.asarray(t, dtype=float))


def linear_majorant(L):
    return Majorant(fn=lambda t: L * t, name=f"{L}*t")


@dataclass
class BoundaryField:
    """Boundary data phi: S^(n-1) -> R^n with its declared regularity.

    `eval` is vectorized: it maps an (S, n) array of sphere points to
    an (S, n) array of values.
    """

    n: int
    eval: Callable[[np.ndarray], np.ndarray]
    lipschitz_L: float | None = None
    majorant: Majorant | None = None
    name: str = "phi"

    def __call__(self, pts):
        return np.asarray(self.eval(np.atleast_2d(np.asarray(pts, dtype=float))), dtype=float)

    def validate(self, seed=0, samples=10_000, slack=1e-9):
        """Check the declared Lipschitz/majorant bound on random pairs.

        Returns the worst ratio of |phi(xi)-phi(eta)| to the declared
        bound; raises if it exceeds 1 + slack.
        """
        if self.lipschitz_L is None and self.majorant is None:
            raise ValueError("no declared regularity to validate")
        rng = np.random.default_rng(seed)
        xi = sphere_points(rng, samples, self.n)
        eta = sphere_points(rng, samples, self.n)
        gap = np.linalg.norm(xi - eta, axis=1)
        keep = gap > 0
        jump = np.linalg.norm(self(xi[keep]) - self(eta[keep]), axis=1)
        if self.lipschitz_L is not None:
            bound = self.lipschitz_L * gap[keep]
        else:
            bound = self.majorant(gap[keep])
        ratio = float(np.max(jump / np.where(bound > 0, bound, np.inf)))
        if ratio > 1.0 + slack:
            raise ValueError(f"{self.name} violates its declared bound (ratio {ratio})")
        return ratio


@dataclass
class SourceField:
    """Right-hand side psi: B^n -> R^n with a declared decay class.

    Either `decay_M` (|psi(x)| <= M (1-|x|^2)) or `mu1` (the weighted
    L^1 budget of the representation theorem) must be declared before
    the Green potential accepts the field.
    """

    n: int
    eval: Callable[[np.ndarray], np.ndarray]
    decay_M: float | None = None
    mu1: float | None = None
    name: str = "psi"

    def __call__(self, pts):
        return np.asarray(self.eval(np.atleast_2d(np.asarray(pts, dtype=float))), dtype=float)

    def validate(self, seed=0, samples=10_000, slack=1e-9):
        """Check |psi| <= (1 + slack) M (1-|x|^2) on random interior points."""
        if self.decay_M is None:
            raise ValueError("no declared decay constant to validate")
        rng = np.random.default_rng(seed)
        pts = ball_points(rng, samples, self.n, rmax=1.0 - 1e-9)
        mag = np.linalg.norm(self(pts), axis=1)
        bound = self.decay_M * (1.0 - np.einsum("ij,ij->i", pts, pts))
        ratio = float(np.max(mag / np.where(bound > 0, bound, np.inf)))
        if ratio > 1.0 + slack:
            raise ValueError(f"{self.name} violates its decay bound (ratio {ratio})")
        return ratio

    def validate_mu1(self, rule, slack=1e-6):
        """Quadrature check of the weighted-L1 hypothesis against `mu1`."""
        if self.mu1 is None:
            raise ValueError("no declared mu1 budget")
        est = weighted_l1_norm(self, rule)
        if est > self.mu1 * (1.0 + slack):
            raise ValueError(f"{self.name} exceeds its mu1 budget ({est} > {self.mu1})")
        return est


# -- Poisson extension -------------------------------------------------------


def poisson_extension(phi, x, rule=None, *, escalate=True, coeff=ESCALATION_COEFF,
                      max_order=MAX_POLAR_ORDER):
    """P_h[phi](x): Poisson-Szego integral of the boundary data.

    The polar axis of the sphere rule is rotated onto x/|x| and only
    that angle is refined, so escalation stays cheap in any dimension.
    """
    x = _coords(x)
    r = float(np.linalg.norm(x))
    if r > 1.0 - BOUNDARY_MARGIN:
        raise ValueError("extension point must be interior")
    n = x.shape[0]
    base = rule.order if rule is not None else DEFAULT_SPHERE_ORDER
    polar = _escalated_polar(base, r, coeff, max_order) if escalate else base
    if rule is None or polar > rule.polar_order:
        rule = get_sphere_rule(n, base, polar)
        if r > 0:
            rule = rotate_rule(rule, x)
    kernel_row = backend.poisson_row_many(x[None, :], rule.nodes, n)[0]
    vals = phi(rule.nodes)
    return (kernel_row * rule.weights) @ vals


def poisson_extension_batch(phi, X, *, order=None, escalate=True,
                            coeff=ESCALATION_COEFF, max_order=MAX_POLAR_ORDER,
                            chunk=None):
    """P_h[phi] over a batch of points sharing one quadrature rule.

    The shared rule is escalated isotropically from the largest |x| in
    the batch (per-point pole alignment would defeat the batching), so
    this path suits scans over moderate radii; use the scalar operator
    for points pushed hard against the boundary.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    B, n = X.shape
    radii = np.linalg.norm(X, axis=1)
    if np.max(radii) > 1.0 - BOUNDARY_MARGIN:
        raise ValueError("extension points must be interior")
    base = order if order is not None else DEFAULT_SPHERE_ORDER
    eff = _escalated_polar(base, float(np.max(radii)), coeff, max_order) if escalate else base
    rule = get_sphere_rule(n, eff)
    vals = phi(rule.nodes)
    weighted = rule.weights[:, None] * vals
    out = np.empty((B, vals.shape[1]))
    if chunk is None:
        chunk = max(1, int(4_000_000 // len(rule)))
    for lo in range(0, B, chunk):
        hi = min(lo + chunk, B)
        P = backend.poisson_row_many(X[lo:hi], rule.nodes, n)
        out[lo:hi] = P @ weighted
    return out


# -- Green potential ---------------------------------------------------------


def _require_decay(psi):
    if psi.decay_M is None and psi.mu1 is None:
        raise ValueError(
            f"{psi.name} declares no decay class; the Green potential "
            "requires decay_M or mu1"
        )


def _green_rule(n, radial_order, sphere_order, polar_order=None):
    return ball_rule(
        n,
        radial_order,
        sphere_order,
        GREEN_RULE_MARGIN,
        polar_order=polar_order,
    )


def _green_tau_radial(rule):
    """Radial weights of the substituted Green integral against tau:
    n rho q(rho) / (1-rho^2) * (Gauss-Legendre weight)."""
    rho = rule.rho
    q = q_ratio(rule.n, rho)
    return rule.n * rho * q / (1.0 - rho**2) * rule.radial_weights


def green_potential_batch(psi, X, *, radial_order=None, sphere_order=None,
                          rule=None, chunk=None):
    """G_h[psi] over a batch of interior points (Mobius-substituted form)."""
    _require_decay(psi)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    B, n = X.shape
    if np.max(np.linalg.norm(X, axis=1)) > 1.0 - BOUNDARY_MARGIN:
        raise ValueError("potential points must be interior")
    if rule is None:
        rule = _green_rule(
            n,
            radial_order or DEFAULT_RADIAL_ORDER,
            sphere_order or DEFAULT_SPHERE_ORDER,
        )
    elif not rule.is_tensor:
        raise ValueError("green_potential needs a tensor-structured ball rule")
    profile = _green_tau_radial(rule)
    xi = rule.sphere.nodes
    sw = rule.sphere.weights
    S = xi.shape[0]
    out = np.zeros((B, n))
    if chunk is None:
        chunk = max(1, int(2_000_000 // S))
    for lo in range(0, B, chunk):
        hi = min(lo + chunk, B)
        acc = np.zeros((hi - lo, n))
        for i, rho_i in enumerate(rule.rho):
            images = backend.mobius_apply_many(X[lo:hi], rho_i * xi)
            vals = psi(images.reshape(-1, n)).reshape(hi - lo, S, -1)
            acc += profile[i] * np.einsum("s,bsm->bm", sw, vals)
        out[lo:hi] = acc
    return out


def green_potential(psi, x, *, radial_order=None, sphere_order=None, rule=None):
    """G_h[psi](x) at a single interior point."""
    x = _coords(x)
    return green_potential_batch(
        psi, x[None, :], radial_order=radial_order, sphere_order=sphere_order, rule=rule
    )[0]


# -- representation and its verification identities -------------------------


def represent(phi, psi, x, *, sphere_order=None, radial_order=None):
    """u(x) = P_h[phi](x) - G_h[psi](x) (the representation formula)."""
    x = _coords(x)
    if x.shape[0] < 3:
        raise ValueError("the representation requires n >= 3")
    ext = poisson_extension(phi, x, rule=None if sphere_order is None
                            else get_sphere_rule(x.shape[0], sphere_order))
    green = green_potential(psi, x, radial_order=radial_order, sphere_order=sphere_order)
    return ext - green


def represent_batch(phi, psi, X, *, sphere_order=None, radial_order=None):
    """Batched representation over an (B, n) grid of interior points."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] < 3:
        raise ValueError("the representation requires n >= 3")
    ext = poisson_extension_batch(phi, X, order=sphere_order)
    green = green_potential_batch(psi, X, radial_order=radial_order, sphere_order=sphere_order)
    return ext - green


def green_mass(y, rule):
    """int_B G_h(x, y) d nu(x), evaluated in substituted form.

    Substituting x = phi_y(w) turns the integral into
    int g(|w|) (1-|y|^2)^n / [y, w]^(2n) d nu(w), whose integrand is
    regular everywhere; the sphere factor is pole-aligned with y and
    escalated, since the Jacobian factor peaks at w -> y/|y|.
    Closed-form target: (1 - |y|^2)^(n-1) / (2n(n-1)).
    """
    y = _coords(y)
    r = float(np.linalg.norm(y))
    if r > 1.0 - BOUNDARY_MARGIN:
        raise ValueError("green_mass point must be interior")
    n = y.shape[0]
    if not rule.is_tensor:
        raise ValueError("green_mass needs a tensor-structured ball rule")
    base = rule.sphere.order
    sph = get_sphere_rule(n, base, _escalated_polar(base, r, coeff=16.0))
    if r > 0:
        sph = rotate_rule(sph, y)
    rho, rw = rule.rho, rule.radial_weights
    # n rho^(n-1) g(rho) = n rho q(rho) (1-rho^2)^(n-1), bounded at both ends
    profile = n * rho * q_ratio(n, rho) * (1.0 - rho**2) ** (n - 1) * rw
    omy = 1.0 - r * r
    total = 0.0
    for i, rho_i in enumerate(rho):
        br2 = backend.bracket_sq_many(y[None, :], rho_i * sph.nodes)[0]
        total += profile[i] * float(sph.weights @ (omy**n / br2**n))
    return total


def mean_value_residual(u, delta_h_u, r, n, *, radial_order=48, sphere_order=24):
    """Residual of the hyperbolic mean-value identity

        u(0) = int_S u(r xi) d sigma(xi)
             - int_{B(0,r)} g(|x|, r) (L u)(x) d tau(x).

    Both u and delta_h_u map (N, n) arrays to (N, m) values; the
    residual is small exactly when delta_h_u really is the hyperbolic
    Laplacian of u.
    """
    if not 0.0 < r < 1.0:
        raise ValueError("mean-value radius must lie in (0, 1)")
    sph = get_sphere_rule(n, sphere_order)
    sphere_term = sph.weights @ np.asarray(u(r * sph.nodes), dtype=float)

    inner = ball_rule(n, radial_order, sphere_order, 1e-3, radius=r)
    rho, rw = inner.rho, inner.radial_weights
    profile = n * rho ** (n - 1) * (1.0 - rho**2) ** (-n) * green_g(n, rho, r) * rw
    ball_term = 0.0
    for i, rho_i in enumerate(rho):
        vals = np.asarray(delta_h_u(rho_i * sph.nodes), dtype=float)
        ball_term = ball_term + profile[i] * (sph.weights @ vals)

    u0 = np.asarray(u(np.zeros((1, n))), dtype=float)[0]
    return u0 - (sphere_term - ball_term)


def invariance_check_poisson(phi, a, x, *, order=DEFAULT_SPHERE_ORDER):
    """|P_h[phi o phi_a](x) - P_h[phi](phi_a(x))| (zero in exact arithmetic)."""
    a = _coords(a)
    x = _coords(x)
    composed = BoundaryField(
        n=phi.n,
        eval=lambda T: phi(backend.mobius_apply_many(a[None, :], T)[0]),
        name=f"{phi.name} o mobius",
    )
    lhs = poisson_extension(composed, x, rule=get_sphere_rule(phi.n, order))
    image = backend.mobius_apply_pairs(a[None, :], x[None, :])[0]
    rhs = poisson_extension(phi, image, rule=get_sphere_rule(phi.n, order))
    return float(np.linalg.norm(lhs - rhs))


def weighted_l1_norm(psi, rule):
    """Quadrature estimate of int (1-|x|^2)^(n-1) |psi| d tau (the mu_1
    hypothesis of the representation theorem)."""
    rho, rw = rule.rho, rule.radial_weights
    n = rule.n
    radial = n * rho ** (n - 1) * (1.0 - rho**2) ** (-1) * rw
    sw = rule.sphere.weights
    total = 0.0
    for i, rho_i in enumerate(rho):
        mag = np.linalg.norm(psi(rho_i * rule.sphere.nodes), axis=1)
        total += radial[i] * float(sw @ mag)
    return total


def green_weighted_l1(psi, rule):
    """Diagnostic estimate of int g(|x|) |psi| d tau (finite under the
    mu_1 hypothesis; the bound constant itself is non-constructive)."""
    profile = _green_tau_radial(rule)
    sw = rule.sphere.weights
    total = 0.0
    for i, rho_i in enumerate(rule.rho):
        mag = np.linalg.norm(psi(rho_i * rule.sphere.nodes), axis=1)
        total += profile[i] * float(sw @ mag)
    return total


# -- manufactured solutions --------------------------------------------------


@dataclass(frozen=True)
class ManufacturedSolution:
    """A closed-form u with symbolically computed hyperbolic Laplacian,
    packaged as the (phi, psi) data pair that must reproduce it."""

    name: str
    n: int
    u: Callable[[np.ndarray], np.ndarray]
    delta_h_u: Callable[[np.ndarray], np.ndarray]
    phi: BoundaryField
    psi: SourceField
    L: float
    M: float


def _embed_e1(values, n):
    out = np.zeros((values.shape[0], n))
    out[:, 0] = values
    return out


def manufactured_linear(n):
    """u(x) = x_1 e_1.

    Lap x_1 = 0 and sum_i x_i d(x_1)/dx_i = x_1, so
    L u = 2(n-2)(1-|x|^2) x_1 e_1.
    """
    def u(X):
        return _embed_e1(X[:, 0], n)

    def lap(X):
        x2 = np.einsum("ij,ij->i", X, X)
        return _embed_e1(2.0 * (n - 2) * (1.0 - x2) * X[:, 0], n)

    phi = BoundaryField(n=n, eval=u, lipschitz_L=1.0, name="xi_1 e_1")
    psi = SourceField(n=n, eval=lap, decay_M=2.0 * (n - 2), name="laplacian of x_1 e_1")
    return ManufacturedSolution(
        name="linear", n=n, u=u, delta_h_u=lap, phi=phi, psi=psi, L=1.0, M=2.0 * (n - 2)
    )


def manufactured_quadratic(n):
    """u(x) = |x|^2 e_1.

    Lap |x|^2 = 2n and sum_i x_i d(|x|^2)/dx_i = 2|x|^2, so
    L u = (2n (1-|x|^2)^2 + 4(n-2)(1-|x|^2)|x|^2) e_1.
    """
    def u(X):
        return _embed_e1(np.einsum("ij,ij->i", X, X), n)

    def lap(X):
        x2 = np.einsum("ij,ij->i", X, X)
        omx = 1.0 - x2
        return _embed_e1(2.0 * n * omx**2 + 4.0 * (n - 2) * omx * x2, n)

    phi = BoundaryField(n=n, eval=lambda T: _embed_e1(np.ones(T.shape[0]), n),
                        lipschitz_L=0.0, name="e_1")
    M = float(max(2 * n, 4 * (n - 2)))
    psi = SourceField(n=n, eval=lap, decay_M=M, name="laplacian of |x|^2 e_1")
    return ManufacturedSolution(
        name="quadratic", n=n, u=u, delta_h_u=lap, phi=phi, psi=psi, L=0.0, M=M
    )
