"""Analysis and synthesis in the five orthonormal systems.

Supported systems, each with the measure its functions are orthonormal
against:

    laguerre_l         l_k    on x^alpha dx
    laguerre_script_L  y^{alpha/2} l_k(y)            on dx
    laguerre_phi       sqrt(2) y^{alpha+1/2} l_k(y^2) on dx
    laguerre_psi       sqrt(2) l_k(y^2)              on y^{2 alpha + 1} dy
    hermite            h_k                           on dx over the real line

Every operator here acts on the truncated expansion space: the underlying
series are infinite, so analyze/synthesize/apply_multiplier all implement the
projection onto the first N+1 basis functions.

Coefficients of the dense test class, polynomials times e^{-x/2} (or
e^{-x^2/2} on the Hermite side), are computed with Gauss rules matched to the
basis measure and are exact up to rounding: the exponential factors of the
test function and of the basis function combine into the Gauss weight, so the
integrand handed to the rule is a plain polynomial.  Arbitrary grid functions
are interpolated by cubic splines and analyzed by composite panels instead;
that path has lower accuracy and is intended for data, not validation.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from . import quad, specfun, symbols

__all__ = [
    "SYSTEMS",
    "ExpansionBasis",
    "CoefficientVector",
    "GridFunction",
    "PolyHalfExp",
    "PolyGauss",
    "SeriesFunction",
    "basis_function",
    "basis_function_table",
    "laguerre_basis_poly",
    "default_grid",
    "analyze",
    "synthesize",
    "apply_multiplier",
    "change_system",
    "transplant",
    "transplant_series",
]

SYSTEMS = ("laguerre_l", "laguerre_script_L", "laguerre_phi", "laguerre_psi", "hermite")

DEFAULT_TRUNCATION = 64


@dataclass(frozen=True)
class ExpansionBasis:
    """An orthonormal system together with its type parameter."""

    system: str
    alpha: float = 0.0

    def __post_init__(self):
        if self.system not in SYSTEMS:
            raise ValueError(f"unknown system {self.system!r}; expected one of {SYSTEMS}")
        if self.system != "hermite" and not self.alpha > -1.0:
            raise ValueError(f"Laguerre-type systems require alpha > -1, got {self.alpha}")

    @property
    def measure_exponent(self):
        """Exponent gamma of the measure x^gamma dx the system is orthonormal in."""
        return {
            "laguerre_l": self.alpha,
            "laguerre_script_L": 0.0,
            "laguerre_phi": 0.0,
            "laguerre_psi": 2.0 * self.alpha + 1.0,
            "hermite": 0.0,
        }[self.system]


@dataclass
class CoefficientVector:
    """Truncated expansion coefficients c_0..c_N in a given basis."""

    basis: ExpansionBasis
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.ndim != 1:
            raise ValueError("coefficients must form a 1-d sequence")

    @property
    def truncation(self):
        return len(self.coeffs) - 1

    def to_json(self):
        return {"basis": {"system": self.basis.system, "alpha": self.basis.alpha},
                "coeffs": list(self.coeffs)}

    @classmethod
    def from_json(cls, payload):
        basis = ExpansionBasis(payload["basis"]["system"], float(payload["basis"].get("alpha", 0.0)))
        return cls(basis, np.asarray(payload["coeffs"], dtype=float))


@dataclass(frozen=True)
class GridFunction:
    """Samples on a strictly increasing positive grid, with the measure
    exponent the samples live against."""

    grid: np.ndarray
    values: np.ndarray
    measure_exponent: float = 0.0

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        if grid.ndim != 1 or grid.shape != values.shape:
            raise ValueError("grid and values must be 1-d arrays of the same length")
        if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing and positive")
        if not np.all(np.isfinite(values)):
            raise ValueError("grid function values must be finite")

    def interpolator(self):
        return CubicSpline(self.grid, self.values)

    def to_csv(self):
        buf = io.StringIO()
        buf.write("x,value\n")
        for x, v in zip(self.grid, self.values):
            buf.write(f"{x:.17g},{v:.17g}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text, measure_exponent=0.0):
        rows = [line.split(",") for line in text.strip().splitlines()[1:]]
        data = np.array([[float(a), float(b)] for a, b in rows])
        return cls(data[:, 0], data[:, 1], measure_exponent)


def default_grid(x_min=1e-3, x_max=60.0, points=400):
    """Geometrically spaced evaluation grid."""
    return np.geomspace(x_min, x_max, points)


# ---------------------------------------------------------------------------
# Test-function classes (polynomial times decay factor)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolyHalfExp:
    """q(x) e^{-x/2} on the half line; the dense class used for validation."""

    coeffs: tuple
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def poly_part(self, x):
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), self.coeffs)

    # exp_free(x) = f(x) e^{x/2}; pairing it with the basis function's own
    # e^{-x/2} turns Gauss-Laguerre analysis into an exact polynomial rule.
    exp_free = poly_part

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.poly_part(x) * np.exp(-x / 2.0)


@dataclass(frozen=True)
class PolyGauss:
    """q(x) e^{-x^2/2} on the real line; the Hermite-side test class."""

    coeffs: tuple
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        q = np.polynomial.polynomial.polyval(x, self.coeffs)
        return q * np.exp(-x * x / 2.0)

    def parity_parts(self):
        """(even half, odd half) after the substitution u = x^2.

        For f = q(x) e^{-x^2/2} the even part becomes q_e(u) e^{-u/2} with
        q_e collecting the even monomials, and the odd part x r(x^2) e^{-x^2/2}
        becomes r(u) e^{-u/2}; both land in the half-line test class.
        """
        even = self.coeffs[0::2]
        odd = self.coeffs[1::2]
        return (PolyHalfExp(even if even else (0.0,), label=self.label + ":even"),
                PolyHalfExp(odd if odd else (0.0,), label=self.label + ":odd"))


def laguerre_basis_poly(k, alpha):
    """Monomial coefficients of L_k^alpha (ascending), by the recurrence.

    Useful for building small-degree basis functions as test-class members;
    monomial form loses accuracy for large k, so keep k modest (<= 30).
    """
    prev = np.array([1.0])
    if k == 0:
        return prev
    cur = np.array([alpha + 1.0, -1.0])
    for j in range(2, k + 1):
        nxt = np.zeros(j + 1)
        nxt[: j] += (2.0 * j - 1.0 + alpha) * cur
        nxt[1: j + 1] -= cur
        nxt[: j - 1] -= (j - 1.0 + alpha) * prev
        prev, cur = cur, nxt / j
    return cur


# ---------------------------------------------------------------------------
# Basis function evaluation
# ---------------------------------------------------------------------------


def basis_function_table(basis, kmax, x):
    """Values of the first kmax+1 basis functions, shape (kmax+1,) + x.shape."""
    x = np.asarray(x, dtype=float)
    system = basis.system
    if system == "hermite":
        return specfun.hermite_fn_table(kmax, x)
    alpha = basis.alpha
    if system == "laguerre_l":
        return specfun.laguerre_fn_table(kmax, alpha, x)
    if system == "laguerre_script_L":
        return x ** (alpha / 2.0) * specfun.laguerre_fn_table(kmax, alpha, x)
    if system == "laguerre_phi":
        return math.sqrt(2.0) * x ** (alpha + 0.5) * specfun.laguerre_fn_table(kmax, alpha, x * x)
    if system == "laguerre_psi":
        return math.sqrt(2.0) * specfun.laguerre_fn_table(kmax, alpha, x * x)
    raise ValueError(f"unknown system {system!r}")


def basis_function(basis, k, x):
    value = basis_function_table(basis, k, x)[k]
    return float(value) if np.isscalar(x) else value


class SeriesFunction:
    """Callable view of a truncated expansion sum c_k * basis_k."""

    def __init__(self, cv):
        self.cv = cv

    @property
    def degree(self):
        return self.cv.truncation

    def __call__(self, x):
        return synthesize(self.cv, x)

    def exp_free(self, x):
        """f(x) e^{x/2} for plain-Laguerre series: a stable polynomial."""
        if self.cv.basis.system != "laguerre_l":
            raise NotImplementedError("exp-free evaluation only for the plain Laguerre system")
        x = np.asarray(x, dtype=float)
        kmax = self.cv.truncation
        table = specfun.laguerre_poly_table(kmax, self.cv.basis.alpha, x)
        ks = np.arange(kmax + 1)
        norms = np.array([specfun.laguerre_norm_const(k, self.cv.basis.alpha) for k in ks])
        return _compensated_dot(self.cv.coeffs * norms, table)


def _compensated_dot(coeffs, table):
    """sum_k coeffs[k] * table[k, ...] with compensated (exact) summation."""
    prods = coeffs.reshape((-1,) + (1,) * (table.ndim - 1)) * table
    flat = prods.reshape(len(coeffs), -1)
    out = np.fromiter((math.fsum(col) for col in flat.T), dtype=float, count=flat.shape[1])
    return out.reshape(table.shape[1:])


def synthesize(cv, x):
    """Evaluate the truncated series at x (scalar or array)."""
    scalar = np.isscalar(x)
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    table = basis_function_table(cv.basis, cv.truncation, x_arr)
    out = _compensated_dot(cv.coeffs, table)
    return float(out[0]) if scalar else out.reshape(np.shape(x))


# ---------------------------------------------------------------------------
# Analysis
# ---------------------------------------------------------------------------


def _required_order(N, degree):
    # Gauss rule of order n is exact through polynomial degree 2n-1.
    return (N + degree) // 2 + 2


def _analyze_laguerre_exact(view, alpha, N, quad_order):
    exp_free, degree = view
    needed = _required_order(N, degree)
    if quad_order is not None and quad_order < needed:
        raise ValueError(
            f"quadrature order {quad_order} cannot resolve degree {degree} against "
            f"{N + 1} coefficients; need at least order {needed}")
    order = quad_order if quad_order is not None else max(needed, 48)
    rule = quad.gauss_generalized_laguerre(order, alpha)
    poly_vals = exp_free(rule.nodes)
    table = specfun.laguerre_poly_table(N, alpha, rule.nodes)
    norms = np.array([specfun.laguerre_norm_const(k, alpha) for k in range(N + 1)])
    weighted = rule.weights * poly_vals
    coeffs = np.fromiter(
        (norms[k] * math.fsum(weighted * table[k]) for k in range(N + 1)),
        dtype=float, count=N + 1)
    return coeffs


def _analyze_laguerre_panels(f, alpha, N, lo, hi):
    if lo == 0.0:
        base = quad.graded_edges(0.0, min(hi, 8.0), 60)
        edges = np.concatenate([base, np.geomspace(min(hi, 8.0), hi, 193)[1:]]) \
            if hi > 8.0 else base
    else:
        edges = np.geomspace(lo, hi, 257)
    rule = quad.gauss_legendre(24)
    mids = 0.5 * (edges[:-1] + edges[1:])
    halfs = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mids[:, None] + halfs[:, None] * rule.nodes[None, :]).ravel()
    wts = (halfs[:, None] * rule.weights[None, :]).ravel()
    weighted = wts * np.asarray(f(nodes), dtype=float) * nodes ** alpha
    table = specfun.laguerre_fn_table(N, alpha, nodes)
    return np.fromiter((math.fsum(weighted * table[k]) for k in range(N + 1)),
                       dtype=float, count=N + 1)


def _as_half_line_callable(f):
    if isinstance(f, GridFunction):
        spline = f.interpolator()
        lo, hi = f.grid[0], f.grid[-1]
        return (lambda x: np.where((x >= lo) & (x <= hi), spline(np.asarray(x, float)), 0.0),
                lo, hi)
    return f, 0.0, 150.0


def _exp_free_view(f):
    """(exp_free callable, degree) when f supports the exact Gauss path."""
    if isinstance(f, PolyHalfExp):
        return f.exp_free, f.degree
    if isinstance(f, SeriesFunction) and f.cv.basis.system == "laguerre_l":
        return f.exp_free, f.degree
    return None


def _analyze_plain_laguerre(f, alpha, N, quad_order):
    view = _exp_free_view(f)
    if view is not None:
        return _analyze_laguerre_exact(view, alpha, N, quad_order)
    fn, lo, hi = _as_half_line_callable(f)
    return _analyze_laguerre_panels(fn, alpha, N, lo, hi)


def analyze(f, basis, N=DEFAULT_TRUNCATION, quad_order=None):
    """Expansion coefficients of f through index N in the given basis.

    Test-class inputs (PolyHalfExp / PolyGauss / plain-Laguerre
    SeriesFunction) go through exact Gauss rules; callables and
    GridFunctions go through interpolation and composite panels, which is
    flagged as the lower-accuracy path.
    """
    system = basis.system
    if system == "hermite":
        return _analyze_hermite(f, N, quad_order)
    alpha = basis.alpha
    if system == "laguerre_l":
        coeffs = _analyze_plain_laguerre(f, alpha, N, quad_order)
    elif system == "laguerre_script_L":
        fn, lo, hi = _as_half_line_callable(f)
        g = lambda y: np.asarray(fn(y)) * y ** (alpha / 2.0)
        coeffs = _analyze_laguerre_panels(g, alpha, N, lo, hi)
    elif system == "laguerre_phi":
        fn, lo, hi = _as_half_line_callable(f)
        g = lambda u: np.asarray(fn(np.sqrt(u))) * u ** (-alpha / 2.0 - 0.25) / math.sqrt(2.0)
        coeffs = _analyze_laguerre_panels(g, alpha, N, lo * lo, min(hi * hi, 3600.0))
    elif system == "laguerre_psi":
        fn, lo, hi = _as_half_line_callable(f)
        g = lambda u: np.asarray(fn(np.sqrt(u))) / math.sqrt(2.0)
        coeffs = _analyze_laguerre_panels(g, alpha, N, lo * lo, min(hi * hi, 3600.0))
    else:
        raise ValueError(f"unknown system {system!r}")
    return CoefficientVector(basis, coeffs)


def _analyze_hermite(f, N, quad_order):
    basis = ExpansionBasis("hermite")
    n_even = N // 2
    n_odd = (N - 1) // 2
    if isinstance(f, PolyGauss):
        g_even, g_odd = f.parity_parts()
    else:
        fn = f
        g_even = lambda u: 0.5 * (np.asarray(fn(np.sqrt(u))) + np.asarray(fn(-np.sqrt(u))))
        g_odd = lambda u: 0.5 * (np.asarray(fn(np.sqrt(u))) - np.asarray(fn(-np.sqrt(u)))) / np.sqrt(u)
    a_even = _analyze_plain_laguerre(g_even, -0.5, n_even, quad_order)
    coeffs = np.zeros(N + 1)
    coeffs[0::2] = a_even
    if n_odd >= 0:
        a_odd = _analyze_plain_laguerre(g_odd, 0.5, n_odd, quad_order)
        coeffs[1::2] = a_odd
    return CoefficientVector(basis, coeffs)


# ---------------------------------------------------------------------------
# Multiplier application
# ---------------------------------------------------------------------------


def apply_multiplier(cv, sym, rho=1.0):
    """Damped diagonal action c_k -> m(k) rho^k c_k.

    For the Hermite system the index k already walks the even/odd ladder, so
    even coefficients receive m at even arguments and odd ones at odd
    arguments, exactly as the parity reduction requires.
    """
    if not 0.0 < rho <= 1.0:
        raise ValueError(f"damping parameter must lie in (0, 1], got {rho}")
    ks = np.arange(len(cv.coeffs))
    m = np.array([symbols.symbol_value(sym, float(k)) for k in ks])
    return CoefficientVector(cv.basis, cv.coeffs * m * rho ** ks)


# ---------------------------------------------------------------------------
# System changes (pointwise unitary-style maps) and transplantation
# ---------------------------------------------------------------------------


def _to_hub(f, system, alpha):
    """Map samples of a function in `system` to the hub system (script L)."""
    y, v = f.grid, f.values
    if system == "laguerre_script_L":
        return y, v
    if system == "laguerre_l":
        # f = W g with (W g)(y) = y^{-alpha/2} g(y)
        return y, v * y ** (alpha / 2.0)
    if system == "laguerre_phi":
        # f = V g with (V g)(y) = (2y)^{1/2} g(y^2)
        return y * y, v / np.sqrt(2.0 * y)
    if system == "laguerre_psi":
        # f = Z g with (Z g)(y) = sqrt(2) y^{-alpha} g(y^2)
        return y * y, v * y ** alpha / math.sqrt(2.0)
    raise ValueError(f"system changes are not defined for {system!r}")


def _from_hub(grid, values, system, alpha):
    if system == "laguerre_script_L":
        return grid, values
    if system == "laguerre_l":
        return grid, values * grid ** (-alpha / 2.0)
    if system == "laguerre_phi":
        y = np.sqrt(grid)
        return y, values * np.sqrt(2.0 * y)
    if system == "laguerre_psi":
        y = np.sqrt(grid)
        return y, values * math.sqrt(2.0) * y ** (-alpha)
    raise ValueError(f"system changes are not defined for {system!r}")


def change_system(f, from_basis, to_basis):
    """Carry a GridFunction between Laguerre-type systems of the same alpha.

    The maps are the pointwise substitutions that send the k-th basis
    function of one system to the k-th of the other, so the operation is
    exact on samples; only the grid itself is transformed.
    """
    if from_basis.alpha != to_basis.alpha:
        raise ValueError("system changes require matching alpha")
    if "hermite" in (from_basis.system, to_basis.system):
        raise ValueError("system changes connect the Laguerre-type systems only")
    hub_grid, hub_values = _to_hub(f, from_basis.system, from_basis.alpha)
    grid, values = _from_hub(hub_grid, hub_values, to_basis.system, to_basis.alpha)
    return GridFunction(grid, values, to_basis.measure_exponent)


def transplant_series(f, alpha_from, alpha_to, N=DEFAULT_TRUNCATION, quad_order=None):
    """Coefficient form of the transplantation operator.

    Analyzes in the alpha_from system and re-synthesizes the same
    coefficients in the alpha_to system (they pass through unchanged).
    """
    if isinstance(f, CoefficientVector):
        if f.basis.system != "laguerre_l" or f.basis.alpha != alpha_from:
            raise ValueError("coefficient input must live in the plain Laguerre "
                             "system with the source alpha")
        coeffs = f.coeffs[: N + 1]
    else:
        coeffs = analyze(f, ExpansionBasis("laguerre_l", alpha_from), N, quad_order).coeffs
    return CoefficientVector(ExpansionBasis("laguerre_l", alpha_to), coeffs.copy())


def transplant(f, alpha_from, alpha_to, N=DEFAULT_TRUNCATION, quad_order=None, grid=None):
    """Transplanted function on a sampling grid (default geometric grid)."""
    cv = transplant_series(f, alpha_from, alpha_to, N, quad_order)
    if grid is None:
        grid = default_grid()
    values = synthesize(cv, grid)
    return GridFunction(grid, values, alpha_to)
