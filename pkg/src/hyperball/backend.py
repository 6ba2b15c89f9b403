"""Selects the compiled evaluation core, falling back to pure NumPy.

The compiled module is optional: if ``hyperball._kernels_cy`` was not
built (no Cython / no C compiler at install time) the NumPy twin is
used instead.  Set ``HYPERBALL_FORCE_NUMPY=1`` to force the fallback;
the parity tests and the benchmark use this to compare the two paths.
"""

import os

import numpy as np

from . import _kernels_np

if os.environ.get("HYPERBALL_FORCE_NUMPY"):
    _impl = _kernels_np
    USING_COMPILED = False
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[attr-defined]

        USING_COMPILED = True
    except ImportError:
        _impl = _kernels_np
        USING_COMPILED = False


def _c(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def bracket_sq_pairs(A, X):
    return _impl.bracket_sq_pairs(_c(A), _c(X))


def bracket_sq_many(A, X):
    return _impl.bracket_sq_many(_c(A), _c(X))


def mobius_apply_pairs(A, X):
    return _impl.mobius_apply_pairs(_c(A), _c(X))


def mobius_apply_many(A, X):
    return _impl.mobius_apply_many(_c(A), _c(X))


def abs_mobius_pairs(A, X):
    return _impl.abs_mobius_pairs(_c(A), _c(X))


def abs_mobius_many(A, X):
    return _impl.abs_mobius_many(_c(A), _c(X))


def poisson_row_many(X, T, n_dim):
    return _impl.poisson_row_many(_c(X), _c(T), int(n_dim))
