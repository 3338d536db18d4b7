"""Quadrature rules and Stieltjes integration used by every other module.

Two Gauss rules are built Golub-Welsch style (nodes are eigenvalues of the
Jacobi matrix of the corresponding recurrence, polished by Newton steps;
weights come from the classical closed form evaluated through logarithms so
they stay relatively accurate far into the tail).  On top of the rules sit
composite panel integrators with geometric grading toward integrable endpoint
singularities, and the Stieltjes integral

    integral f dPsi = sum_n a_n f(tau_n) + integral f(t) phi(t) dt

for measures made of atoms plus a density.  Oscillatory densities (the
Bessel-type ones) are integrated lobe by lobe between their sign changes and
the alternating tail is summed by repeated averaging, which also handles the
conditionally convergent case.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln

__all__ = [
    "QuadratureRule",
    "DivergentIntegralError",
    "gauss_generalized_laguerre",
    "gauss_legendre",
    "panel_integrate",
    "graded_edges",
    "integrate_stieltjes",
    "integrate_density",
    "integrate_density_interval",
    "DEFAULT_TAIL_START",
]

MAX_RULE_ORDER = 512

# Initial truncation point for density tails; extended by doubling until the
# running total stops moving at relative 1e-13.
DEFAULT_TAIL_START = 60.0

_REL_TAIL_TOL = 1e-13
_MAX_TAIL_DOUBLINGS = 14


class DivergentIntegralError(ArithmeticError):
    """The integral of the requested quantity does not converge numerically."""


@dataclass(frozen=True)
class QuadratureRule:
    """An immutable Gauss rule: strictly increasing nodes, positive weights."""

    kind: str
    order: int
    nodes: np.ndarray
    weights: np.ndarray
    alpha: float | None = None

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise ValueError("nodes and weights must be 1-d arrays of equal length")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("quadrature nodes must be strictly increasing")
        if np.any(weights < 0):
            raise ValueError("quadrature weights must be nonnegative")

    def integrate(self, f):
        """Apply the rule to a vectorized integrand."""
        return float(np.dot(self.weights, f(self.nodes)))


def _laguerre_value_scaled(n, alpha, x):
    """(mantissa_n, mantissa_{n-1}, log_scale): L_n = mantissa_n * exp(log_scale)."""
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    cur = alpha + 1.0 - x
    scale = np.zeros_like(x)
    for k in range(2, n + 1):
        prev, cur = cur, ((2.0 * k - 1.0 + alpha - x) * cur - (k - 1.0 + alpha) * prev) / k
        mag = np.maximum(np.abs(cur), np.abs(prev))
        big = mag > 1e120
        if big.any():
            cur[big] *= 1e-120
            prev[big] *= 1e-120
            scale[big] += 120.0 * math.log(10.0)
    return cur, prev, scale


@lru_cache(maxsize=64)
def _gauss_generalized_laguerre_cached(n, alpha):
    i = np.arange(n, dtype=float)
    diag = 2.0 * i + alpha + 1.0
    off = np.sqrt(i[1:] * (i[1:] + alpha))
    try:
        nodes, _ = eigh_tridiagonal(diag, off)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise RuntimeError("symmetric eigensolve for the Jacobi matrix failed") from exc
    # Two Newton polish steps on L_n; x L_n' = n L_n - (n+alpha) L_{n-1}.
    for _ in range(2):
        cur, prev, _ = _laguerre_value_scaled(n, alpha, nodes)
        deriv = (n * cur - (n + alpha) * prev) / nodes
        nodes = nodes - cur / deriv
    # w_i = Gamma(n+alpha+1)/n! * x_i / ((n+1) L_{n+1}(x_i))^2, in log space.
    cur, _, scale = _laguerre_value_scaled(n + 1, alpha, nodes)
    log_w = (gammaln(n + alpha + 1.0) - gammaln(n + 1.0) + np.log(nodes)
             - 2.0 * math.log(n + 1.0) - 2.0 * (np.log(np.abs(cur)) + scale))
    weights = np.exp(log_w)
    return QuadratureRule("generalized_laguerre", n, nodes, weights, alpha=float(alpha))


def gauss_generalized_laguerre(n, alpha):
    """Gauss rule of given order for the weight x^alpha e^{-x} on (0, inf)."""
    if not 1 <= n <= MAX_RULE_ORDER:
        raise ValueError(f"rule order must be in [1, {MAX_RULE_ORDER}], got {n}")
    if not alpha > -1.0:
        raise ValueError(f"generalized Laguerre weight requires alpha > -1, got {alpha}")
    return _gauss_generalized_laguerre_cached(int(n), float(alpha))


@lru_cache(maxsize=64)
def _gauss_legendre_cached(n):
    i = np.arange(1, n, dtype=float)
    off = i / np.sqrt(4.0 * i * i - 1.0)
    nodes, vecs = eigh_tridiagonal(np.zeros(n), off)
    weights = 2.0 * vecs[0, :] ** 2
    return QuadratureRule("legendre", n, nodes, weights)


def gauss_legendre(n):
    """Gauss rule of given order for the unit weight on [-1, 1]."""
    if not 1 <= n <= MAX_RULE_ORDER:
        raise ValueError(f"rule order must be in [1, {MAX_RULE_ORDER}], got {n}")
    return _gauss_legendre_cached(int(n))


# ---------------------------------------------------------------------------
# Composite panel machinery
# ---------------------------------------------------------------------------

_PANEL_RULE_ORDER = 24


def panel_integrate(f, edges, order=_PANEL_RULE_ORDER):
    """Composite Gauss-Legendre integral of f over consecutive [edges] panels."""
    rule = gauss_legendre(order)
    edges = np.asarray(edges, dtype=float)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        total += half * float(np.dot(rule.weights, f(mid + half * rule.nodes)))
    return total


def graded_edges(a, b, levels, toward="left"):
    """Panel edges on [a, b], geometrically refined toward one endpoint.

    Used wherever an integrable endpoint singularity (power-type) must be
    resolved; `levels` dyadic refinements push the innermost panel down to
    (b-a) * 2^-levels from the singular endpoint.
    """
    if b <= a:
        return np.array([a, b])
    span = b - a
    steps = span * 0.5 ** np.arange(levels, 0, -1.0)
    if toward == "left":
        inner = a + steps
    elif toward == "right":
        inner = b - steps[::-1]
    else:
        raise ValueError("toward must be 'left' or 'right'")
    return np.unique(np.concatenate([[a], inner, [b]]))


def _averaged_tail(terms):
    """Limit of an alternating-ish series by repeated averaging of partial sums."""
    sums = np.cumsum(terms)
    while len(sums) > 1:
        sums = 0.5 * (sums[:-1] + sums[1:])
    return float(sums[0])


# ---------------------------------------------------------------------------
# Stieltjes integration
# ---------------------------------------------------------------------------


def _density_values(density, t, absolute):
    values = density.values(t)
    return np.abs(values) if absolute else values


def _integrate_oscillatory(density, f, absolute, max_lobes=160, plain_head=28):
    """Lobe-wise integration between the density's sign changes.

    For absolutely convergent cases the lobe sums are accumulated until they
    fall below the running tolerance; otherwise the alternating lobe series is
    summed by repeated averaging.  With `absolute=True` the lobe magnitudes
    must decay on their own, or the total variation genuinely diverges.
    """
    zeros = density.sign_changes(max_lobes)
    integrand = lambda t: f(t) * _density_values(density, t, absolute)
    lobes = [panel_integrate(integrand, graded_edges(0.0, zeros[0], 120))]
    for a, b in zip(zeros[:-1], zeros[1:]):
        lobes.append(panel_integrate(integrand, [a, b]))
    lobes = np.array(lobes)
    partial = np.cumsum(lobes)
    for i in range(8, len(lobes)):
        if abs(lobes[i]) <= 1e-17 * max(abs(partial[i]), 1e-300):
            return float(partial[i]), abs(lobes[i])
    tail = np.abs(lobes[plain_head:])
    if absolute:
        # |phi| lobes all have one sign; decay is required for convergence.
        if tail[-1] >= 0.5 * tail[0] or tail[-1] > _REL_TAIL_TOL * abs(partial[-1]):
            raise DivergentIntegralError(
                "total variation integral does not converge: lobe magnitudes do not decay")
        return float(partial[-1]), float(tail[-1])
    value = float(partial[plain_head - 1] + _averaged_tail(lobes[plain_head:]))
    return value, abs(float(lobes[-1])) * 1e-3


def _integrate_smooth(density, f, absolute):
    """Graded head plus doubling tail blocks for non-oscillatory densities."""
    support = density.support_end
    integrand = lambda t: f(t) * _density_values(density, t, absolute)
    head_end = DEFAULT_TAIL_START if support is None else min(support, DEFAULT_TAIL_START)
    total = panel_integrate(integrand, graded_edges(0.0, head_end, 480))
    if support is not None and support <= DEFAULT_TAIL_START:
        return total, 1e-15 * abs(total)
    lo = head_end
    block = math.inf
    prev_block = math.inf
    for _ in range(_MAX_TAIL_DOUBLINGS):
        hi = 2.0 * lo
        block = panel_integrate(integrand, np.linspace(lo, hi, 9))
        total += block
        scale = max(abs(total), 1e-300)
        if abs(block) <= _REL_TAIL_TOL * scale and abs(prev_block) <= 10 * _REL_TAIL_TOL * scale:
            return total, abs(block)
        prev_block = block
        lo = hi
    raise DivergentIntegralError(
        "density tail is not exponentially dominated; integral did not converge "
        f"by T = {lo:.3g}")


def integrate_density(density, f, absolute=False):
    """(value, error estimate) of integral f(t) phi(t) dt over (0, inf)."""
    if getattr(density, "oscillatory", False):
        return _integrate_oscillatory(density, f, absolute)
    return _integrate_smooth(density, f, absolute)


def integrate_density_interval(density, a, b, f=None):
    """Integral of f(t) phi(t) dt over a finite interval [a, b]."""
    if f is None:
        f = lambda t: 1.0
    if b <= a:
        return 0.0
    integrand = lambda t: f(t) * density.values(t)
    edges = graded_edges(a, b, 480 if a == 0.0 else 8)
    if getattr(density, "oscillatory", False):
        interior = density.sign_changes_upto(b)
        edges = np.unique(np.concatenate([edges, interior[(interior > a) & (interior < b)]]))
    return panel_integrate(integrand, edges)


def integrate_stieltjes(symbol, f):
    """Stieltjes integral of f against the symbol's measure.

    Atoms are summed exactly; the density part goes through the adaptive
    panel/tail machinery.  Raises DivergentIntegralError when the density
    contribution fails to converge.
    """
    total = 0.0
    for tau, weight in symbol.atoms:
        total += weight * float(f(np.asarray(tau, dtype=float)))
    if symbol.density is not None:
        value, _ = integrate_density(symbol.density, f)
        total += value
    return total
