"""Hyperbolic potential theory on the unit ball B^n (n >= 3).

Subpackage map:

* `geometry` -- Mobius self-maps, the bracket, hyperbolic distance
* `specialfn` -- hypergeometric series, Green radial profile, bounds
* `quadrature` -- sphere/ball product rules, invariant-measure weights
* `kernels` -- Poisson-Szego kernel, Green function, FD Laplacian
* `potentials` -- the two integral operators and their identities
* `analysis` -- constant ledger, Lipschitz scans, the n=2 counterexample
* `cli` -- `hyperball` command-line front end
* `backend` -- compiled/NumPy evaluation-core selection
"""

from .backend import USING_COMPILED

__version__ = "0.1.0"

__all__ = ["USING_COMPILED", "__version__"]
