"""Scalar special functions: Gauss hypergeometric series, the radial
Green profile and its bounded ratio, and the series bounds used by the
Lipschitz-constant ledger.

Gamma ratios are computed through ``math.lgamma`` throughout (the C
library Lanczos implementation is good to ~1e-15 relative), so surface
areas and hypergeometric prefactors never overflow.
"""

import math
from functools import lru_cache

import numpy as np

#: relative tail threshold for series termination
SERIES_RTOL = 1e-16
#: consecutive sub-threshold terms required before stopping
SERIES_CONFIRM = 3
#: hard cap on series length; exceeding it signals a bad parameter regime
SERIES_MAX_TERMS = 10**6


class ConvergenceError(RuntimeError):
    """A series failed to converge within the term budget."""


def pochhammer(a, k):
    """Rising factorial (a)_k = a (a+1) ... (a+k-1), with (a)_0 = 1."""
    out = 1.0
    for i in range(k):
        out *= a + i
    return out


def _is_nonpositive_int(v, tol=1e-12):
    return v <= tol and abs(v - round(v)) <= tol


def _gamma_sign_log(x):
    """(sign, log|Gamma(x)|) valid for non-integer negative arguments."""
    if x > 0:
        return 1.0, math.lgamma(x)
    # reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    s = math.sin(math.pi * x)
    return math.copysign(1.0, s), math.log(math.pi / abs(s)) - math.lgamma(1.0 - x)


def gauss_2f1(a, b, c, s):
    """Gauss hypergeometric series F(a, b; c; s) for s in [0, 1].

    Terminates exactly when a or b is a non-positive integer (the
    polynomial case).  At s = 1 with c - a - b > 0 the Gauss summation
    formula is used; otherwise partial sums run until the term drops
    below SERIES_RTOL relative for SERIES_CONFIRM consecutive terms.

    Raises ConvergenceError past SERIES_MAX_TERMS, which signals an
    invalid parameter regime rather than a tolerance problem.
    """
    if _is_nonpositive_int(c) and abs(c - round(c)) <= 1e-12:
        raise ValueError("c must not be zero or a negative integer")
    if not 0.0 <= s <= 1.0:
        raise ValueError("argument must lie in [0, 1]")

    poly_k = None
    for v in (a, b):
        if _is_nonpositive_int(v):
            k = int(round(-v))
            poly_k = k if poly_k is None else min(poly_k, k)

    if s == 1.0 and poly_k is None:
        if c - a - b <= 0:
            raise ConvergenceError("F(a,b;c;1) requires c - a - b > 0")
        sg_ca, lg_ca = _gamma_sign_log(c - a)
        sg_cb, lg_cb = _gamma_sign_log(c - b)
        sg_c, lg_c = _gamma_sign_log(c)
        sg_cab, lg_cab = _gamma_sign_log(c - a - b)
        sign = sg_c * sg_cab / (sg_ca * sg_cb)
        return sign * math.exp(lg_c + lg_cab - lg_ca - lg_cb)

    acc = 1.0
    term = 1.0
    below = 0
    k = 0
    while True:
        if poly_k is not None and k >= poly_k:
            return acc
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * s
        acc += term
        k += 1
        if abs(term) <= SERIES_RTOL * abs(acc):
            below += 1
            if below >= SERIES_CONFIRM:
                return acc
        else:
            below = 0
        if k >= SERIES_MAX_TERMS:
            raise ConvergenceError(
                f"2F1({a},{b};{c};{s}) did not converge in {SERIES_MAX_TERMS} terms"
            )


def green_g(n, r, t=1.0):
    """Radial Green profile g(r, t) = (1/n) int_r^t (1-s^2)^(n-2) s^(1-n) ds.

    Closed form by binomial expansion of (1-s^2)^(n-2); the exponent
    2j - n + 1 = -1 (even n) contributes log(t/r).  Vectorized in r.
    Diverges like r^(2-n) as r -> 0, so r must be positive.
    """
    if n < 2:
        raise ValueError("dimension must be >= 2")
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise ValueError("g(r, t) requires r > 0 (r^(2-n) divergence at 0)")
    if np.any(r > t) or t > 1.0:
        raise ValueError("g(r, t) requires 0 < r <= t <= 1")
    acc = np.zeros_like(r)
    for j in range(n - 1):
        coef = (-1.0) ** j * math.comb(n - 2, j)
        e = 2 * j - n + 1
        if e == -1:
            acc += coef * np.log(t / r)
        else:
            acc += coef * (t ** (e + 1) - r ** (e + 1)) / (e + 1)
    out = acc / n
    return float(out) if out.ndim == 0 else out


# Coefficients of g(r) = g(r, 1) expanded around the outer boundary:
#   g(r) = (w^(n-1) / 2n) sum_k (n/2)_k / k! * w^k / (n-1+k),  w = 1 - r^2.
# The closed form above cancels catastrophically as r -> 1 (the value is
# O(w^(n-1)) built from O(1) terms), while this series has positive terms
# only.  Used for r >= 1/2, where w <= 3/4 keeps it geometric.
_BOUNDARY_SERIES_TERMS = 256


@lru_cache(maxsize=None)
def _boundary_series_coeffs(n):
    ks = np.arange(_BOUNDARY_SERIES_TERMS)
    logs = np.cumsum(np.concatenate(([0.0], np.log((n / 2 + ks[:-1]) / (ks[:-1] + 1)))))
    return np.exp(logs) / (n - 1 + ks)


def green_profile(n, r):
    """g(r) = g(r, 1), stable on the whole of (0, 1].  Vectorized.

    Dispatches between the binomial closed form (r < 1/2) and the
    boundary series (r >= 1/2); both agree to ~1e-15 relative at the
    split point.
    """
    r = np.asarray(r, dtype=float)
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    out = np.empty_like(r)
    lo = r < 0.5
    if np.any(lo):
        out[lo] = green_g(n, r[lo], 1.0)
    hi = ~lo
    if np.any(hi):
        w = 1.0 - r[hi] ** 2
        coeffs = _boundary_series_coeffs(n)
        out[hi] = np.polynomial.polynomial.polyval(w, coeffs) * w ** (n - 1) / (2 * n)
    return float(out[0]) if scalar else out


def q_ratio(n, t):
    """q(t) = t^(n-2) (1-t^2)^(1-n) g(t), with q(0) and q(1) defined by
    their limits 1/(n(n-2)) and 1/(2n(n-1)).  Vectorized.

    For t >= 1/2 the (1-t^2)^(1-n) factor is folded into the boundary
    series analytically, so the bounds 1/(2n(n-1)) <= q <= 1/(n(n-2))
    hold to full precision all the way to t = 1.
    """
    if n < 3:
        raise ValueError("q(t) requires n >= 3")
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    if np.any((t < 0.0) | (t > 1.0)):
        raise ValueError("q is defined on [0, 1]")
    out = np.empty_like(t)

    at_zero = t == 0.0
    out[at_zero] = 1.0 / (n * (n - 2.0))
    lo = ~at_zero & (t < 0.5)
    if np.any(lo):
        tl = t[lo]
        out[lo] = tl ** (n - 2) * (1.0 - tl**2) ** (1 - n) * green_g(n, tl, 1.0)
    hi = t >= 0.5
    if np.any(hi):
        th = t[hi]
        w = 1.0 - th**2
        coeffs = _boundary_series_coeffs(n)
        out[hi] = th ** (n - 2) * np.polynomial.polynomial.polyval(w, coeffs) / (2 * n)
    return float(out[0]) if scalar else out


def _fn_coeff_recurrence(n, a, b, k, coef):
    return coef * (a + k) * ((b - n) / 2.0 + k) / ((n / 2.0 + k) * (k + 1.0))


def f_n_series(n, a, b, c, s):
    """f_n(s) = sum_k (a)_k ((b-n)/2)_k / ((n/2)_k k!) * s^k / (k+c).

    Finite polynomial whenever (b-n)/2 is a non-positive integer (the
    Pochhammer factor truncates); otherwise summed to SERIES_RTOL with
    an integral tail estimate appended near s = 1, where slowly
    converging parameter sets only reach ~|last term| * K absolute
    accuracy.
    """
    _validate_fn_params(n, a, b, c)
    if not 0.0 <= s <= 1.0:
        raise ValueError("argument must lie in [0, 1]")
    acc = 1.0 / c
    coef = 1.0
    power = 1.0
    below = 0
    term = 0.0
    for k in range(200_000):
        coef = _fn_coeff_recurrence(n, a, b, k, coef)
        if coef == 0.0:
            return acc
        power *= s
        term = coef * power / (k + 1.0 + c)
        acc += term
        if abs(term) <= SERIES_RTOL * abs(acc):
            below += 1
            if below >= SERIES_CONFIRM:
                return acc
        else:
            below = 0
        if abs(coef) > 1e200:
            raise ConvergenceError(
                f"f_n diverges for (n={n}, a={a}, b={b}, c={c}, s={s})"
            )
    return acc


def _validate_fn_params(n, a, b, c):
    if n != int(n) or b != int(b) or n <= 0 or b <= 0:
        raise ValueError("b and n must be positive integers")
    if a <= 0 or c <= 0:
        raise ValueError("series requires a > 0 and c > 0")


def _fn_coefficient_table(n, a, b, c, max_terms=200_000, floor=1e-15):
    """Coefficients A_k = (a)_k ((b-n)/2)_k / ((n/2)_k k! (k+c)) until they
    truncate, drop below `floor`, or hit `max_terms`."""
    coeffs = [1.0 / c]
    coef = 1.0
    for k in range(max_terms):
        coef = _fn_coeff_recurrence(n, a, b, k, coef)
        if coef == 0.0:
            return np.array(coeffs), True
        coeffs.append(coef / (k + 1.0 + c))
        if abs(coeffs[-1]) < floor:
            return np.array(coeffs), True
        if abs(coef) > 1e200:
            raise ConvergenceError(
                f"f_n coefficients diverge for (n={n}, a={a}, b={b}, c={c})"
            )
    return np.array(coeffs), False


@lru_cache(maxsize=None)
def mu2_sup(n, a, b, c):
    """Numerical stand-in for the sup bound mu_2(n, a, b, c) on |f_n|.

    Maximum of |f_n| over the s-grid {0, 1e-3, ..., 1} plus a tail
    bound for the truncated series.  The underlying bound is a pure
    existence statement; this surrogate is what the derived Lipschitz
    constants are built from, and it is documented as such.
    """
    _validate_fn_params(n, a, b, c)
    coeffs, exact = _fn_coefficient_table(n, a, b, c)
    grid = np.linspace(0.0, 1.0, 1001)
    values = np.polynomial.polynomial.polyval(grid, coeffs)
    sup = float(np.max(np.abs(values)))
    if exact:
        return sup
    # estimate the power-law decay rate from the last stretch of coefficients
    K = len(coeffs) - 1
    lag = max(K // 8, 1)
    ratio = abs(coeffs[-1]) / max(abs(coeffs[-1 - lag]), 1e-300)
    p = -math.log(ratio) / math.log(K / (K - lag))
    if p > 1.05:
        tail = abs(coeffs[-1]) * K / (p - 1.0)
    else:
        tail = abs(coeffs[-1]) * K * 20.0
    return sup + tail


def I0_series(n, a, b, m, s):
    """I_0(s) = int_0^1 t^m F(a, (b-n)/2; n/2; t s) dt as a series.

    Termwise integration gives exactly f_n with c = m + 1.
    """
    if m <= -1:
        raise ValueError("requires m > -1")
    return f_n_series(n, a, b, m + 1.0, s)


def surface_area_ratio(n):
    """alpha_1 = omega_(n-2)/omega_(n-1) = Gamma(n/2) / (sqrt(pi) Gamma((n-1)/2))."""
    if n < 3:
        raise ValueError("requires n >= 3")
    return math.exp(math.lgamma(n / 2.0) - math.lgamma((n - 1) / 2.0)) / math.sqrt(math.pi)


def ren_kahler_rhs(t, k, r):
    """Gamma-prefactored hypergeometric side of the weighted-integral identity

    int_-1^1 (1-s^2)^((t-3)/2) (1-2rs+r^2)^(-k) ds
        = Gamma((t-1)/2) Gamma(1/2) / Gamma(t/2) * F(k, k+1-t/2; t/2; r^2).
    """
    pref = math.exp(math.lgamma((t - 1.0) / 2.0) + math.lgamma(0.5) - math.lgamma(t / 2.0))
    return pref * gauss_2f1(k, k + 1.0 - t / 2.0, t / 2.0, r * r)
