"""Poisson-Szego kernel, invariant Green function, their gradients, and
a finite-difference realization of the hyperbolic Laplacian

    L u(x) = (1-|x|^2)^2 Lap u(x) + 2(n-2)(1-|x|^2) sum_i x_i du/dx_i.

For n = 2 this reduces to the weighted Euclidean Laplacian and the
kernels coincide with the classical ones; those paths exist as
diagnostics only and the main potential-theory APIs require n >= 3
(dimension 2 is exactly where the bi-Lipschitz machinery fails, see
`analysis.counterexample_w0`).
"""

from dataclasses import dataclass

import numpy as np

from . import backend
from .geometry import BOUNDARY_MARGIN, _coords
from .specialfn import green_profile

#: below this Mobius-image radius the Green function is treated as singular
GREEN_DIAGONAL_CUTOFF = 1e-8


def poisson_szego(x, t, n=None):
    """P_h(x, t) = ((1-|x|^2)/|t-x|^2)^(n-1) for |x| < 1, |t| = 1.

    Vectorized over rows of t; P_h(0, t) = 1 and the kernel integrates
    to 1 over the sphere.
    """
    x = _coords(x)
    t = np.asarray(t, dtype=float)
    if np.linalg.norm(x) > 1.0 - BOUNDARY_MARGIN:
        raise ValueError("Poisson kernel requires interior x")
    if n is None:
        n = x.shape[0]
    single = t.ndim == 1
    T = np.atleast_2d(t)
    row = backend.poisson_row_many(x[None, :], T, n)[0]
    return float(row[0]) if single else row


def poisson_szego_grad(x, t, n=None):
    """Gradient of P_h in x:

    -2(n-1) (x_k |t-x|^2 + (1-|x|^2)(x_k - t_k)) / |t-x|^4
          * ((1-|x|^2)/|t-x|^2)^(n-2).

    Vectorized over rows of t; returns (n,) for a single t, else (S, n).
    """
    x = _coords(x)
    t = np.asarray(t, dtype=float)
    if np.linalg.norm(x) > 1.0 - BOUNDARY_MARGIN:
        raise ValueError("Poisson kernel requires interior x")
    if n is None:
        n = x.shape[0]
    single = t.ndim == 1
    T = np.atleast_2d(t)
    diff = x[None, :] - T
    d2 = np.einsum("ij,ij->i", diff, diff)
    omx = 1.0 - float(np.dot(x, x))
    base = (omx / d2) ** (n - 2)
    vec = x[None, :] * d2[:, None] + omx * diff
    out = -2.0 * (n - 1) * vec * (base / d2**2)[:, None]
    return out[0] if single else out


def green_h(x, y):
    """Invariant Green function G_h(x, y) = g(|phi_x(y)|), x != y.

    Computed through |phi_x(y)| = |x-y|/[x,y], which makes the symmetry
    G_h(x, y) = G_h(y, x) hold to the last bit.  Blows up like
    |x-y|^(2-n)/(n(n-2)) on the diagonal; image radii below
    GREEN_DIAGONAL_CUTOFF are rejected rather than approximated.
    """
    x = _coords(x)
    y = np.asarray(y, dtype=float)
    n = x.shape[0]
    single = y.ndim == 1
    Y = np.atleast_2d(y)
    m = backend.abs_mobius_pairs(np.broadcast_to(x, Y.shape), Y)
    if np.any(m < GREEN_DIAGONAL_CUTOFF):
        raise ValueError("Green function evaluated on (or too close to) the diagonal")
    vals = green_profile(n, m)
    return float(vals[0]) if single else vals


def green_h_grad(x, y):
    """Gradient of G_h(., y) at x (x != y, both interior):

    - (x-y)(1-|x|^2)^(n-1) (1-|y|^2)^(n-1) / (n |x-y|^n [x,y]^n)
    - x (1-|x|^2)^(n-2) (1-|y|^2)^(n-1) / (n |x-y|^(n-2) [x,y]^n).

    Vectorized over rows of y.
    """
    x = _coords(x)
    y = np.asarray(y, dtype=float)
    n = x.shape[0]
    single = y.ndim == 1
    Y = np.atleast_2d(y)
    diff = x[None, :] - Y
    d2 = np.einsum("ij,ij->i", diff, diff)
    if np.any(d2 == 0.0):
        raise ValueError("Green gradient is singular on the diagonal")
    X = np.broadcast_to(x, Y.shape)
    br2 = backend.bracket_sq_pairs(X, Y)
    omx = 1.0 - float(np.dot(x, x))
    omy = 1.0 - np.einsum("ij,ij->i", Y, Y)
    brn = br2 ** (n / 2.0)
    first = diff * (omx ** (n - 1) * omy ** (n - 1) / (n * d2 ** (n / 2.0) * brn))[:, None]
    second = x[None, :] * (omx ** (n - 2) * omy ** (n - 1) / (n * d2 ** ((n - 2) / 2.0) * brn))[:, None]
    out = -first - second
    return out[0] if single else out


@dataclass(frozen=True)
class HyperbolicLaplacianStencil:
    """Central second-order stencil for the hyperbolic Laplacian.

    With `richardson` the h and h/2 evaluations are combined to cancel
    the O(h^2) truncation term.
    """

    h: float = 1e-4
    richardson: bool = True

    def __post_init__(self):
        if not 1e-6 <= self.h <= 1e-2:
            raise ValueError("stencil step must lie in [1e-6, 1e-2]")


def _delta_h_fixed_step(u, x, h):
    n = x.shape[0]
    pts = [x]
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        pts.append(x + e)
        pts.append(x - e)
    vals = np.asarray(u(np.asarray(pts)), dtype=float)
    if vals.ndim == 1:
        vals = vals[:, None]
    center = vals[0]
    plus = vals[1::2]
    minus = vals[2::2]
    lap = (plus + minus - 2.0 * center).sum(axis=0) / (h * h)
    directional = (x @ (plus - minus)) / (2.0 * h)
    omx = 1.0 - float(np.dot(x, x))
    return omx * omx * lap + 2.0 * (n - 2) * omx * directional


def hyperbolic_laplacian(u, x, stencil=HyperbolicLaplacianStencil()):
    """Finite-difference hyperbolic Laplacian of a vector field u at x.

    u maps a (N, n) array of points to (N,) or (N, m) values; the
    stencil points are evaluated in a single batched call and reduced
    in fixed order.  Requires the whole stencil to stay in the ball.
    """
    x = _coords(x)
    reach = stencil.h
    if np.linalg.norm(x) + reach > 1.0 - BOUNDARY_MARGIN:
        raise ValueError("stencil exceeds the unit ball")
    coarse = _delta_h_fixed_step(u, x, stencil.h)
    if not stencil.richardson:
        return coarse
    fine = _delta_h_fixed_step(u, x, stencil.h / 2.0)
    return (4.0 * fine - coarse) / 3.0
