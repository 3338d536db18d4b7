"""Stable evaluation of the special functions behind the multiplier machinery.

Provides Laguerre polynomials and orthonormal Laguerre functions, normalized
Hermite functions, normalized Bessel functions, and the Laguerre generating
function together with its derivative in the summation variable.

All routines accept scalars or numpy arrays in the argument variable and are
pure (no global mutable state), so they are safe to call concurrently.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln, jv

__all__ = [
    "laguerre_poly",
    "laguerre_poly_table",
    "laguerre_fn",
    "laguerre_fn_table",
    "laguerre_norm_const",
    "laguerre_eigenvalue",
    "laguerre_envelope_scale",
    "hermite_fn",
    "hermite_fn_table",
    "normalized_bessel",
    "normalized_bessel_zeros",
    "gen_fn_Z",
    "gen_fn_Z_prime",
]

# Upward three-term recurrence is stable for x >= 0; exercised by tests for
# k <= 500 on [0, 2100] (the node range of the largest quadrature rules).
_MAX_TESTED_DEGREE = 500


def _check_alpha(alpha):
    if not alpha > -1.0:
        raise ValueError(f"Laguerre type parameter must satisfy alpha > -1, got {alpha}")


def _check_index(k):
    if k < 0 or k != int(k):
        raise ValueError(f"expansion index must be a nonnegative integer, got {k}")


def laguerre_eigenvalue(k, alpha):
    """Eigenvalue k + (alpha+1)/2 of the k-th Laguerre function."""
    _check_index(k)
    _check_alpha(alpha)
    return k + (alpha + 1.0) / 2.0


def laguerre_envelope_scale(k, alpha):
    """Scale 4k + 2*alpha + 2 governing the oscillatory envelope of l_k."""
    _check_index(k)
    _check_alpha(alpha)
    return 4.0 * k + 2.0 * alpha + 2.0


def laguerre_poly_table(kmax, alpha, x):
    """All Laguerre polynomials L_0..L_kmax at x, shape (kmax+1,) + x.shape.

    Uses the standard three-term recurrence upward in the degree, which is
    stable on x >= 0 for the degrees this package works with.
    """
    _check_index(kmax)
    _check_alpha(alpha)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("Laguerre polynomials are evaluated on x >= 0 only")
    out = np.empty((kmax + 1,) + x.shape, dtype=float)
    out[0] = 1.0
    if kmax >= 1:
        out[1] = alpha + 1.0 - x
    for k in range(2, kmax + 1):
        out[k] = ((2.0 * k - 1.0 + alpha - x) * out[k - 1]
                  - (k - 1.0 + alpha) * out[k - 2]) / k
    return out


def laguerre_poly(k, alpha, x):
    """Laguerre polynomial L_k^alpha(x) for x >= 0."""
    table = laguerre_poly_table(k, alpha, x)
    value = table[k]
    return float(value) if np.isscalar(x) else value


def laguerre_norm_const(k, alpha):
    """Normalization sqrt(k! / Gamma(k+alpha+1)), computed through log-Gamma.

    The log-Gamma route keeps the ratio finite for all k this package uses;
    a literal factorial would overflow long before k = 500.
    """
    _check_index(k)
    _check_alpha(alpha)
    return math.exp(0.5 * (gammaln(k + 1.0) - gammaln(k + alpha + 1.0)))


def laguerre_fn_table(kmax, alpha, x):
    """Orthonormal Laguerre functions l_0..l_kmax at x."""
    x = np.asarray(x, dtype=float)
    table = laguerre_poly_table(kmax, alpha, x)
    ks = np.arange(kmax + 1, dtype=float)
    norms = np.exp(0.5 * (gammaln(ks + 1.0) - gammaln(ks + alpha + 1.0)))
    return norms.reshape((-1,) + (1,) * x.ndim) * table * np.exp(-x / 2.0)


def laguerre_fn(k, alpha, x):
    """Orthonormal Laguerre function l_k^alpha(x) = norm * e^{-x/2} L_k^alpha(x)."""
    value = laguerre_fn_table(k, alpha, x)[k]
    return float(value) if np.isscalar(x) else value


def hermite_fn_table(kmax, x):
    """Normalized Hermite functions h_0..h_kmax at x (any real x).

    The recurrence runs on the positively-normalized oscillator
    eigenfunctions; a sign (-1)^floor(k/2) is then applied so that the
    quadratic-argument identities

        h_{2k}(x) = l_k^{-1/2}(x^2),    h_{2k+1}(x) = x * l_k^{1/2}(x^2)

    hold with this package's Laguerre functions.
    """
    _check_index(kmax)
    x = np.asarray(x, dtype=float)
    out = np.empty((kmax + 1,) + x.shape, dtype=float)
    out[0] = math.pi ** -0.25 * np.exp(-x * x / 2.0)
    if kmax >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for k in range(2, kmax + 1):
        out[k] = (math.sqrt(2.0 / k) * x * out[k - 1]
                  - math.sqrt((k - 1.0) / k) * out[k - 2])
    ks = np.arange(kmax + 1)
    signs = np.where((ks // 2) % 2 == 0, 1.0, -1.0)
    out *= signs.reshape((-1,) + (1,) * x.ndim)
    return out


def hermite_fn(k, x):
    """Normalized Hermite function h_k(x)."""
    value = hermite_fn_table(k, x)[k]
    return float(value) if np.isscalar(x) else value


def _normalized_bessel_series(beta, x):
    # sum_m (-1)^m (x/2)^{2m} Gamma(beta+1) / (m! Gamma(m+beta+1))
    x = np.asarray(x, dtype=float)
    term = np.ones_like(x)
    acc = np.ones_like(x)
    z = -(x / 2.0) ** 2
    for m in range(1, 200):
        term = term * z / (m * (m + beta))
        acc = acc + term
        if np.all(np.abs(term) < 1e-18):
            break
    return acc


def normalized_bessel(beta, x):
    """Normalized Bessel function Gamma(beta+1) J_beta(x) / (x/2)^beta.

    Continuous at the origin with value 1.  Only orders beta >= -1/2 are
    supported; that is the range on which the function stays bounded by 1.
    """
    if beta < -0.5:
        raise ValueError(f"normalized Bessel requires beta >= -1/2, got {beta}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("normalized Bessel is evaluated on x >= 0 only")
    # Power series below the switch point, library Bessel above it.  The
    # series converges in a few dozen terms below 2*max(1, beta).
    switch = 2.0 * max(1.0, beta)
    out = np.empty_like(x)
    small = x < switch
    if small.any():
        out[small] = _normalized_bessel_series(beta, x[small])
    large = ~small
    if large.any():
        xl = x[large]
        scale = np.exp(gammaln(beta + 1.0) - beta * np.log(xl / 2.0))
        out[large] = scale * jv(beta, xl)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=None)
def _bessel_zeros_cached(beta, count):
    zeros = []
    m = 1
    while len(zeros) < count:
        # McMahon estimate for the m-th positive zero, then bracketed refine.
        guess = (m + 0.5 * beta - 0.25) * math.pi
        lo = max(guess - 0.49 * math.pi, 1e-8)
        hi = guess + 0.49 * math.pi
        if zeros:
            lo = max(lo, zeros[-1] + 1e-8)
        if jv(beta, lo) * jv(beta, hi) > 0:
            lo = max(lo - 0.4, zeros[-1] + 1e-8 if zeros else 1e-8)
            hi = hi + 0.4
        zeros.append(brentq(lambda t: jv(beta, t), lo, hi, xtol=1e-14, rtol=4e-16))
        m += 1
    return tuple(zeros)


def normalized_bessel_zeros(beta, count):
    """First `count` positive zeros of J_beta (equivalently of the normalized form)."""
    if beta < -0.5:
        raise ValueError(f"zeros are tabulated for beta >= -1/2 only, got {beta}")
    if count < 1:
        return np.empty(0)
    return np.array(_bessel_zeros_cached(float(beta), int(count)))


def gen_fn_Z(alpha, x, w):
    """Laguerre generating function (1-w)^{-alpha-1} exp(-x w/(1-w)) on w in [0, 1].

    The value at w = 1 is the continuous extension 0 for x > 0; at x = 0 the
    function has a pole there, which is rejected.
    """
    _check_alpha(alpha)
    x_arr = np.asarray(x, dtype=float)
    w_arr = np.asarray(w, dtype=float)
    if np.any(x_arr < 0):
        raise ValueError("generating function is evaluated on x >= 0 only")
    if np.any((w_arr < 0) | (w_arr > 1)):
        raise ValueError("generating function requires 0 <= w <= 1")
    at_one = w_arr == 1.0
    if np.any(at_one & (x_arr == 0.0)):
        raise ValueError("generating function has a pole at w = 1 when x = 0")
    w_safe = np.where(at_one, 0.5, w_arr)
    # log form avoids inf * 0 as w -> 1: the exponential term dominates.
    value = np.exp(-(alpha + 1.0) * np.log1p(-w_safe) - x_arr * w_safe / (1.0 - w_safe))
    value = np.where(at_one, 0.0, value)
    if np.isscalar(x) and np.isscalar(w):
        return float(value)
    return value


def gen_fn_Z_prime(alpha, x, w):
    """d/dw of the generating function, via the order-raising identity.

    Evaluated as (alpha+1) Z_{alpha+1,x}(w) - x Z_{alpha+2,x}(w); no numeric
    differentiation is involved.
    """
    w_arr = np.asarray(w, dtype=float)
    if np.any(w_arr >= 1.0):
        raise ValueError("derivative of the generating function requires 0 <= w < 1")
    return (alpha + 1.0) * gen_fn_Z(alpha + 1.0, x, w) - np.asarray(x, float) * gen_fn_Z(alpha + 2.0, x, w)
