"""Mobius self-maps of the unit ball and the bracket quantity.

The canonical involution exchanging ``a`` and the origin is

    phi_a(x) = (|x-a|^2 a - (1-|a|^2)(x-a)) / [a,x]^2,

where the bracket is computed from its quadratic expansion

    [a,x]^2 = |x-a|^2 + (1-|x|^2)(1-|a|^2) = 1 + |a|^2|x|^2 - 2<a,x>,

which is total on the closed ball (the alternative form ||x|y - x'|
is undefined at x = 0, so it is never used as a code path).  All the
algebraic identities tying these quantities together are exercised by
the geometry test suite.

Functions accept plain coordinate arrays or `BallPoint` instances and
are vectorized over a trailing batch of points where documented.
"""

import math
from dataclasses import dataclass, field

import numpy as np

#: points with |x| <= 1 - BOUNDARY_MARGIN count as interior
BOUNDARY_MARGIN = 1e-12

#: |A A^T - I| tolerance for orthogonal frames attached to a Mobius map
ORTHOGONAL_TOL = 1e-12


def _coords(x):
    if isinstance(x, BallPoint):
        return x.coords
    return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class BallPoint:
    """A point of the (closed) unit ball with its norm cached."""

    coords: np.ndarray
    norm: float = field(init=False)

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        object.__setattr__(self, "coords", c)
        object.__setattr__(self, "norm", float(np.linalg.norm(c)))

    @property
    def n(self):
        return self.coords.shape[0]

    @classmethod
    def interior(cls, coords, margin=BOUNDARY_MARGIN):
        """Construct a point required to lie strictly inside the ball."""
        p = cls(coords)
        if p.norm > 1.0 - margin:
            raise ValueError(f"point with |x| = {p.norm} is not interior")
        return p

    @classmethod
    def boundary(cls, coords, tol=1e-14):
        """Construct a sphere point (|x| = 1 within tol)."""
        p = cls(coords)
        if abs(p.norm - 1.0) > tol:
            raise ValueError(f"point with |x| = {p.norm} is not on the sphere")
        return p


def _check_interior(a, what="a"):
    a = _coords(a)
    if np.linalg.norm(a) > 1.0 - BOUNDARY_MARGIN:
        raise ValueError(f"|{what}| >= 1: Mobius center/argument must be interior")
    return a


def bracket(x, y):
    """Bracket [x, y] = sqrt(1 + |x|^2 |y|^2 - 2 <x, y>).

    Symmetric, total on the closed ball, and bounded by
    1 - min(|x|, |y|) <= [x, y] < 2.
    """
    x, y = _coords(x), _coords(y)
    x2 = float(np.dot(x, x))
    y2 = float(np.dot(y, y))
    return math.sqrt(1.0 + x2 * y2 - 2.0 * float(np.dot(x, y)))


def mobius_apply(a, x):
    """Evaluate phi_a(x).  Maps the closed ball onto itself.

    phi_a(a) = 0 exactly (short-circuit; the formula is 0/0 there),
    phi_a(0) = a, and phi_a is an involution.
    """
    a = _check_interior(a)
    x = _coords(x)
    xa = x - a
    d2 = float(np.dot(xa, xa))
    if d2 == 0.0:
        return np.zeros_like(a)
    a2 = float(np.dot(a, a))
    br2 = 1.0 + a2 * float(np.dot(x, x)) - 2.0 * float(np.dot(a, x))
    return (d2 * a - (1.0 - a2) * xa) / br2


def abs_mobius(a, x):
    """|phi_a(x)| = |x - a| / [a, x] (stable; never forms phi_a itself)."""
    a, x = _coords(a), _coords(x)
    return float(np.linalg.norm(x - a)) / bracket(a, x)


def mobius_conformal_factor(a, x):
    """1 - |phi_a(x)|^2 = (1 - |x|^2)(1 - |a|^2) / [a, x]^2."""
    a = _check_interior(a)
    x = _coords(x)
    x2 = float(np.dot(x, x))
    a2 = float(np.dot(a, a))
    return (1.0 - x2) * (1.0 - a2) / bracket(a, x) ** 2


def mobius_jacobian_det(a, x):
    """Jacobian determinant of phi_a: (1 - |a|^2)^n / [a, x]^(2n)."""
    a = _check_interior(a)
    x = _check_interior(x, "x")
    n = a.shape[0]
    return (1.0 - float(np.dot(a, a))) ** n / bracket(a, x) ** (2 * n)


def grad_abs_mobius(a, x, k):
    """d/dx_k of |phi_a(x)| at x != a.

    ([a,x]^2 (x_k - a_k) - |a-x|^2 (x_k - a_k) + |a-x|^2 (1-|a|^2) x_k)
    divided by |a-x| [a,x]^3.
    """
    a = _check_interior(a)
    x = _check_interior(x, "x")
    xa = x - a
    d2 = float(np.dot(xa, xa))
    if d2 == 0.0:
        raise ValueError("|phi_a| is not differentiable at x = a")
    d = math.sqrt(d2)
    br = bracket(a, x)
    a2 = float(np.dot(a, a))
    num = br * br * xa[k] - d2 * xa[k] + d2 * (1.0 - a2) * x[k]
    return num / (d * br**3)


def hyperbolic_distance(a, b):
    """d_h(a, b) = log((1 + |phi_a(b)|) / (1 - |phi_a(b)|))."""
    a = _check_interior(a)
    b = _check_interior(b, "b")
    m = abs_mobius(a, b)
    return math.log((1.0 + m) / (1.0 - m))


def image_distance_identities(a, x):
    """Closed forms (|a - phi_a(x)|, [a, phi_a(x)]).

    Equal to (1-|a|^2)|x| / [a,x] and (1-|a|^2) / [a,x] respectively.
    """
    a = _check_interior(a)
    x = _coords(x)
    br = bracket(a, x)
    oma = 1.0 - float(np.dot(a, a))
    return oma * float(np.linalg.norm(x)) / br, oma / br


@dataclass(frozen=True)
class MobiusSelfMap:
    """A Mobius self-map of the ball, A . phi_a with A orthogonal.

    Every Mobius transformation of the ball factors this way; only the
    canonical A = I map is needed by the potential-theory operators,
    but the frame is validated and applied when supplied.
    """

    center: BallPoint
    frame: np.ndarray | None = None

    def __post_init__(self):
        if self.center.norm > 1.0 - BOUNDARY_MARGIN:
            raise ValueError("Mobius center must be interior")
        if self.frame is not None:
            A = np.asarray(self.frame, dtype=float)
            n = self.center.n
            if A.shape != (n, n):
                raise ValueError("frame must be n x n")
            if np.max(np.abs(A @ A.T - np.eye(n))) > ORTHOGONAL_TOL:
                raise ValueError("frame is not orthogonal")
            object.__setattr__(self, "frame", A)

    def __call__(self, x):
        y = mobius_apply(self.center.coords, x)
        if self.frame is not None:
            y = self.frame @ y
        return y


# -- batched variants (thin wrappers over the evaluation backend) -----------

from . import backend  # noqa: E402  (import down here to keep the API block readable)


def bracket_batch(A, X):
    """[a_i, x_i] for matched rows of (N, n) arrays."""
    return np.sqrt(backend.bracket_sq_pairs(A, X))


def mobius_apply_batch(A, X):
    """phi_{a_i}(x_i) for matched rows of (N, n) arrays."""
    return backend.mobius_apply_pairs(A, X)


def abs_mobius_batch(A, X):
    """|phi_{a_i}(x_i)| for matched rows of (N, n) arrays."""
    return backend.abs_mobius_pairs(A, X)
