"""Explicit Lipschitz-constant ledger, bi-Lipschitz verification scans,
Jacobian sampling, and the planar counterexample.

The constants are closed-form expressions in (n, L, M) except for the
two series suprema, which are numerical surrogates (grid maxima plus a
tail bound) for constants the underlying estimates only prove to
exist; everything derived from them inherits that provenance.  The
chain is

    alpha_2 = max(alpha_3, alpha_4),  alpha_0 = sqrt(n) alpha_2,
    mu_5 = max((n/2) mu_22, 65.875),
    beta_1 = (M/2) mu_23 + (M/n) mu_5,  beta_0 = sqrt(n) beta_1,
    C_1 = L alpha_0 + beta_0,  C_2 = varrho - 2 (L alpha_0 + beta_0),

with varrho the smallest singular value of Du(0).  C_2 may well come
out negative, in which case the co-Lipschitz conclusion is vacuous;
that is reported, never hidden.
"""

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import backend
from ._sampling import ball_points, sphere_points
from .geometry import BOUNDARY_MARGIN
from .potentials import (
    DEFAULT_RADIAL_ORDER,
    GREEN_RULE_MARGIN,
    linear_majorant,
    poisson_extension_batch,
)
from .quadrature import ball_rule, get_sphere_rule
from .specialfn import mu2_sup, surface_area_ratio


class SingularIntegrandWarning(UserWarning):
    """The Du(0) volume integral needs psi(0) = 0 to converge."""


def matrix_norm_and_l(A):
    """Operator norm and its inf-counterpart: the extreme singular values."""
    s = np.linalg.svd(np.asarray(A, dtype=float), compute_uv=False)
    return float(s[0]), float(s[-1])


@dataclass(frozen=True)
class HyperConstants:
    """The constant ledger for given (n, L, M); see the module docstring
    for the defining relations."""

    n: int
    L: float
    M: float
    alpha1: float
    alpha2: float
    alpha0: float
    mu22: float
    mu23: float
    mu5: float
    beta1: float
    beta0: float
    C1: float
    varrho: float | None = None
    C2: float | None = None

    def with_varrho(self, varrho):
        """Fill in varrho = l(Du(0)) and the co-Lipschitz constant C2."""
        return HyperConstants(
            **{
                **asdict(self),
                "varrho": float(varrho),
                "C2": float(varrho) - 2.0 * (self.L * self.alpha0 + self.beta0),
            }
        )

    def as_dict(self):
        return asdict(self)


def compute_constants(n, L, M):
    """Fill the ledger for dimension n >= 3 and data constants L, M.

    varrho (and hence C2) stay unset until a Du(0) sample is supplied
    through `with_varrho`.
    """
    if n < 3:
        raise ValueError("the constant ledger requires n >= 3")
    alpha1 = surface_area_ratio(n)
    alpha3 = ((n - 1) / n + 2 ** (2 * n)) * 2**n * alpha1
    alpha4 = (
        (n - 1)
        * ((2**n + 8**n) / n + (2**n + 8**n + 2 ** (n - 1)) / (n - 1) + 8 ** (n - 1) / (n - 2))
        * alpha1
    )
    alpha2 = max(alpha3, alpha4)
    alpha0 = math.sqrt(n) * alpha2
    mu22 = mu2_sup(n, 1.0, 4, 1.0)
    mu23 = mu2_sup(n, 0.5, 3, 0.5)
    mu5 = max(n / 2.0 * mu22, 65.875)
    beta1 = M / 2.0 * mu23 + M / n * mu5
    beta0 = math.sqrt(n) * beta1
    return HyperConstants(
        n=n,
        L=float(L),
        M=float(M),
        alpha1=alpha1,
        alpha2=alpha2,
        alpha0=alpha0,
        mu22=mu22,
        mu23=mu23,
        mu5=mu5,
        beta1=beta1,
        beta0=beta0,
        C1=float(L) * alpha0 + beta0,
    )


def du_at_origin(phi, psi, n, *, sphere_order=32, radial_order=None):
    """Jacobian of u = P_h[phi] - G_h[psi] at the origin:

        Du(0) = 2(n-1) int phi(eta) eta^T d sigma(eta)
              - (1/n) int psi(y) y^T / (|y|^n (1-|y|^2)) d nu(y).

    The volume integrand scales like |y|^(1-n) psi, so it is only
    integrable when psi vanishes at the origin; a warning is issued
    otherwise and the quadrature value returned as-is.
    """
    sph = get_sphere_rule(n, sphere_order)
    vals = phi(sph.nodes)
    d_phi = 2.0 * (n - 1) * np.einsum("s,si,sj->ij", sph.weights, vals, sph.nodes)

    psi0 = np.linalg.norm(psi(np.zeros((1, n)))[0])
    if psi0 > 1e-12:
        warnings.warn(
            f"psi(0) = {psi0:.3g} != 0: the Du(0) volume integral is singular",
            SingularIntegrandWarning,
            stacklevel=2,
        )
    rule = ball_rule(n, radial_order or DEFAULT_RADIAL_ORDER, sphere_order, GREEN_RULE_MARGIN)
    # radial factor: n rho^(n-1) * rho^(1-n) / (1-rho^2) * w, then the 1/n
    # prefactor cancels the n
    radial = rule.radial_weights / (1.0 - rule.rho**2)
    d_psi = np.zeros((n, n))
    for i, rho_i in enumerate(rule.rho):
        pv = psi(rho_i * sph.nodes)
        d_psi += radial[i] * np.einsum("s,si,sj->ij", sph.weights, pv, sph.nodes)
    return d_phi - d_psi


@dataclass(frozen=True)
class ScanSpec:
    """Sampling plan for a Lipschitz scan: shell radii crossed with gap
    scales (None means independent second endpoints), fixed seed."""

    n: int
    pairs: int = 20_000
    shells: tuple = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
    gaps: tuple = (None, 1e-2, 1e-3)
    seed: int = 2024


@dataclass
class ScanReport:
    max_ratio: float
    min_ratio: float
    pairs: int
    shell_stats: list = field(default_factory=list)

    def as_dict(self):
        return {
            "max_ratio": self.max_ratio,
            "min_ratio": self.min_ratio,
            "pairs": self.pairs,
            "shells": self.shell_stats,
        }


def lipschitz_scan(f, spec):
    """Extreme difference quotients |f(x)-f(y)|/|x-y| over the sampled pairs.

    f is a batched map (N, n) -> (N, m).  The supremum over all pairs is
    of course uncomputable; the stratification targets both the global
    ratio (independent endpoints) and the local one (near-diagonal
    pairs at each shell).
    """
    rng = np.random.default_rng(spec.seed)
    strata = [(r, g) for r in spec.shells for g in spec.gaps]
    per = max(spec.pairs // len(strata), 1)
    xs, ys, labels = [], [], []
    for r, gap in strata:
        x = r * sphere_points(rng, per, spec.n)
        if gap is None:
            y = ball_points(rng, per, spec.n, rmax=0.95)
        else:
            y = x + gap * sphere_points(rng, per, spec.n)
        xs.append(x)
        ys.append(y)
        labels.append((r, gap, per))
    X = np.vstack(xs)
    Y = np.vstack(ys)
    sep = np.linalg.norm(X - Y, axis=1)
    keep = sep > 0
    ratios = np.linalg.norm(f(X)[keep] - f(Y)[keep], axis=1) / sep[keep]

    report = ScanReport(
        max_ratio=float(np.max(ratios)),
        min_ratio=float(np.min(ratios)),
        pairs=int(keep.sum()),
    )
    offset = 0
    for (r, gap, count) in labels:
        block = ratios[offset : offset + count]
        report.shell_stats.append(
            {
                "shell": r,
                "gap": gap if gap is not None else "global",
                "max_ratio": float(np.max(block)),
                "min_ratio": float(np.min(block)),
            }
        )
        offset += count
    return report


def fd_jacobian(f, X, h=1e-5):
    """Central-difference Jacobians of a batched map at each row of X;
    returns (N, m, n)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    N, n = X.shape
    pts = []
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        pts.append(X + e)
        pts.append(X - e)
    vals = np.asarray(f(np.vstack(pts)), dtype=float)
    m = vals.shape[1]
    out = np.empty((N, m, n))
    for j in range(n):
        plus = vals[2 * j * N : (2 * j + 1) * N]
        minus = vals[(2 * j + 1) * N : (2 * j + 2) * N]
        out[:, :, j] = (plus - minus) / (2.0 * h)
    return out


def grad_bound_check_poisson(phi, n, *, omega=None, shells=(0.1, 0.3, 0.5, 0.7, 0.9),
                             points_per_shell=10, seed=7, order=None):
    """Check ||D P_h[phi](x)|| <= alpha_0 omega(1-|x|)/(1-|x|) by sampling.

    With the default linear majorant the bound is the x-independent
    alpha_0 L.  Returns a report with the worst margin (positive means
    a violation; the bound is expected to hold with large slack).
    """
    if omega is None:
        if phi.lipschitz_L is None:
            raise ValueError("need a majorant or a Lipschitz constant")
        omega = linear_majorant(phi.lipschitz_L)
    alpha0 = compute_constants(n, 1.0, 0.0).alpha0
    rng = np.random.default_rng(seed)
    rows = []
    worst = -np.inf
    for r in shells:
        X = r * sphere_points(rng, points_per_shell, n)
        J = fd_jacobian(lambda P: poisson_extension_batch(phi, P, order=order), X)
        norms = np.linalg.svd(J, compute_uv=False)[:, 0]
        bound = alpha0 * float(omega(1.0 - r)) / (1.0 - r)
        margin = float(np.max(norms) - bound)
        worst = max(worst, margin)
        rows.append(
            {
                "shell": r,
                "max_jacobian_norm": float(np.max(norms)),
                "bound": bound,
                "violation": margin,
            }
        )
    return {"alpha0": alpha0, "worst_violation": worst, "shells": rows}


# -- the planar counterexample ----------------------------------------------


def counterexample_w0(z, M, terms=200):
    """The disk function w0(r e^(i theta)) = sum_k r^k cos(k theta)/k^2
    - (M/4)(1 - r^2): solves L w0 = M (1-|z|^2)^2 with Lipschitz
    boundary values, yet fails to be Lipschitz in the disk.

    Accepts a complex scalar, a length-2 vector, or an (N, 2) array.
    Truncation error is below r^(K+1)/((K+1)^2 (1-r)).
    """
    if terms < 1:
        raise ValueError("need at least one series term")
    z = np.asarray(z)
    if z.dtype.kind == "c":
        pts = np.stack([z.real, z.imag], axis=-1)
    else:
        pts = z.astype(float)
    single = pts.ndim == 1
    P = np.atleast_2d(pts)
    if np.any(np.linalg.norm(P, axis=1) >= 1.0):
        raise ValueError("w0 is defined on the open disk")
    r = np.linalg.norm(P, axis=1)
    theta = np.arctan2(P[:, 1], P[:, 0])
    k = np.arange(1, terms + 1)
    series = np.sum(r[:, None] ** k * np.cos(theta[:, None] * k) / k**2, axis=1)
    out = series - (M / 4.0) * (1.0 - r**2)
    return float(out[0]) if single else out


def counterexample_gradient(r, M):
    """||D w0|| along the positive real axis: -log(1-r)/r + M r / 2.

    Both Wirtinger derivatives have modulus |-log(1-r)/(2r) + (M/4) r|
    at real z, and the operator norm is their sum.  Unbounded as
    r -> 1, which is exactly why no Lipschitz bound can hold at n = 2.
    """
    if not 0.0 < r < 1.0:
        raise ValueError("radius must lie in (0, 1)")
    return -math.log1p(-r) / r + M * r / 2.0


def w0_boundary(theta, terms=500):
    """Boundary trace sum_k cos(k theta)/k^2 (Lipschitz on the circle)."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    k = np.arange(1, terms + 1)
    return np.sum(np.cos(theta[:, None] * k) / k**2, axis=1)
