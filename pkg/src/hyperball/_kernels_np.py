"""Pure-NumPy evaluation kernels (reference implementation).

These are the hot inner loops of the quadrature pipeline: Mobius maps,
bracket values and Poisson kernel rows evaluated over whole node arrays.
A compiled twin lives in ``_kernels_cy.pyx``; `hyperball.backend` picks
one of the two at import time.  Both modules expose the same function
set with identical semantics, and the parity test suite holds them to
each other.

Shape conventions: ``A``/``X`` are (N, n) C-order float64 arrays of
points, "pairs" functions match rows one-to-one, "many" functions form
the full (B, S) cross product.
"""

import numpy as np


def bracket_sq_pairs(A, X):
    """[a_i, x_i]^2 = 1 + |a_i|^2 |x_i|^2 - 2 <a_i, x_i>, rowwise."""
    a2 = np.einsum("ij,ij->i", A, A)
    x2 = np.einsum("ij,ij->i", X, X)
    dot = np.einsum("ij,ij->i", A, X)
    return 1.0 + a2 * x2 - 2.0 * dot


def bracket_sq_many(A, X):
    """[a_b, x_s]^2 for every pair; returns (B, S)."""
    a2 = np.einsum("ij,ij->i", A, A)
    x2 = np.einsum("ij,ij->i", X, X)
    return 1.0 + np.outer(a2, x2) - 2.0 * (A @ X.T)


def mobius_apply_pairs(A, X):
    """phi_{a_i}(x_i), rowwise: (|x-a|^2 a - (1-|a|^2)(x-a)) / [a,x]^2.

    Returns the exact zero vector on rows with x == a (the formula is
    0/0 there; the removable limit is 0).
    """
    a2 = np.einsum("ij,ij->i", A, A)
    xa = X - A
    d2 = np.einsum("ij,ij->i", xa, xa)
    br2 = bracket_sq_pairs(A, X)
    out = (d2[:, None] * A - (1.0 - a2)[:, None] * xa) / br2[:, None]
    hit = d2 == 0.0
    if np.any(hit):
        out[hit] = 0.0
    return out


def mobius_apply_many(A, X):
    """phi_{a_b}(x_s) for every pair; returns (B, S, n)."""
    a2 = np.einsum("ij,ij->i", A, A)
    xa = X[None, :, :] - A[:, None, :]
    d2 = np.einsum("bsj,bsj->bs", xa, xa)
    br2 = bracket_sq_many(A, X)
    num = d2[:, :, None] * A[:, None, :] - (1.0 - a2)[:, None, None] * xa
    out = num / br2[:, :, None]
    hit = d2 == 0.0
    if np.any(hit):
        out[hit] = 0.0
    return out


def abs_mobius_pairs(A, X):
    """|phi_{a_i}(x_i)| = |x_i - a_i| / [a_i, x_i], rowwise."""
    xa = X - A
    d2 = np.einsum("ij,ij->i", xa, xa)
    return np.sqrt(d2 / bracket_sq_pairs(A, X))


def abs_mobius_many(A, X):
    """|phi_{a_b}(x_s)| for every pair; returns (B, S)."""
    xa = X[None, :, :] - A[:, None, :]
    d2 = np.einsum("bsj,bsj->bs", xa, xa)
    return np.sqrt(d2 / bracket_sq_many(A, X))


def poisson_row_many(X, T, n_dim):
    """Poisson-Szego kernel ((1-|x|^2)/|t-x|^2)^(n-1) over all (x_b, t_s).

    T must hold unit vectors; |t-x|^2 is expanded as 1 + |x|^2 - 2<x,t>.
    """
    x2 = np.einsum("ij,ij->i", X, X)
    d2 = (1.0 + x2)[:, None] - 2.0 * (X @ T.T)
    return ((1.0 - x2)[:, None] / d2) ** (n_dim - 1)
