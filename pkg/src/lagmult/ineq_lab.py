"""Weighted norms, admissible-exponent predicates, and norm experiments.

The predicates implement the exponent conditions under which the multiplier
operators extend to bounded maps between power-weighted Lebesgue spaces:

    plain Laguerre system, type alpha, small-time exponent sigma:
        1 < p <= q,  a < (alpha+1)/p',  b < (alpha+1)/q,
        (1/q - 1/p)(alpha + 1/2) <= a + b <= (1/q - 1/p)(alpha + 1) + sigma

    Hermite system:
        1 < p <= q,  a < 1/p',  b < 1/q,  0 <= a + b <= 1/q - 1/p + 2 sigma

with 0 < sigma < alpha + 1 (resp. 0 < sigma < 1/2).  The companion systems
reduce to the plain Laguerre conditions through the weight identities of the
pointwise system-change maps; the literal ranges quoted for those systems in
the source material disagree with that reduction for p < q, so both verdicts
are exposed (`admissible_system` returns the reduced one).

The experiment runner measures the ratio of weighted norms of M f against f
over a family of test functions.  A ratio below a constant across the family
is consistent with boundedness; experiments cannot certify unboundedness
outside the admissible region, and reports there are informative only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import expansion, quad, symbols

__all__ = [
    "ExponentSet",
    "TestFamily",
    "MemberResult",
    "ExperimentReport",
    "NormDivergenceError",
    "weighted_norm",
    "admissible_laguerre",
    "admissible_hermite",
    "admissible_system",
    "system_reduction",
    "system_literal_conditions",
    "default_family",
    "run_experiment",
]


class NormDivergenceError(ArithmeticError):
    """The weighted norm integral diverges for the requested exponents."""


@dataclass(frozen=True)
class ExponentSet:
    """Exponents (p, q) with weight powers (a, b), plus sigma and alpha."""

    p: float
    q: float
    a: float
    b: float
    sigma: float
    alpha: float = 0.0

    def __post_init__(self):
        if not (1.0 < self.p <= self.q and math.isfinite(self.q)):
            raise ValueError(f"need 1 < p <= q < inf, got p={self.p}, q={self.q}")

    @property
    def p_conj(self):
        return self.p / (self.p - 1.0)

    @property
    def q_conj(self):
        return self.q / (self.q - 1.0)


# ---------------------------------------------------------------------------
# Weighted norms
# ---------------------------------------------------------------------------

_SMALL_PROBE = np.array([1e-6, 1e-5, 1e-4, 1e-3])


def _vanishing_order(fn):
    vals = np.abs(np.asarray(fn(_SMALL_PROBE), dtype=float))
    if np.all(vals < 1e-280):
        return math.inf
    vals = np.maximum(vals, 1e-280)
    slope, _ = np.polyfit(np.log(_SMALL_PROBE), np.log(vals), 1)
    return float(slope)


def _norm_integral_callable(fn, p, gamma):
    order = _vanishing_order(fn)
    if p * min(order, 0.0 if math.isinf(order) else order) + gamma <= -1.0 + 1e-12 \
            and not math.isinf(order):
        raise NormDivergenceError(
            f"|f|^p x^gamma is not integrable at 0: local exponent "
            f"{p * order + gamma:.3f} <= -1")
    integrand = lambda x: np.abs(np.asarray(fn(x), dtype=float)) ** p * x ** gamma
    total = quad.panel_integrate(integrand, quad.graded_edges(0.0, 60.0, 200))
    lo = 60.0
    for _ in range(8):
        hi = 2.0 * lo
        block = quad.panel_integrate(integrand, np.linspace(lo, hi, 9))
        total += block
        if abs(block) <= 1e-14 * max(total, 1e-300):
            return total
        lo = hi
    raise NormDivergenceError(f"norm integral did not converge by x = {lo:.3g}")


def _norm_integral_grid(f, p, gamma):
    spline = f.interpolator()
    lo, hi = float(f.grid[0]), float(f.grid[-1])
    integrand = lambda x: np.abs(spline(x)) ** p * x ** gamma
    edges = np.geomspace(lo, hi, 257)
    main = quad.panel_integrate(integrand, edges)
    # tail estimate from the decay rate of the last samples
    tail = 0.0
    mags = np.abs(f.values[-5:])
    if mags[-1] > 0 and np.all(mags[:-1] > 0):
        rates = np.diff(np.log(mags)) / np.diff(f.grid[-5:])
        rate = -float(np.mean(rates)) * p
        if rate > 0:
            tail = abs(f.values[-1]) ** p * hi ** gamma / rate
        else:
            raise NormDivergenceError("grid samples do not decay; tail estimate diverges")
    return main + tail


def weighted_norm(f, p, gamma, two_sided=False):
    """(integral |f|^p x^gamma dx)^{1/p} over the half line (or the whole
    line with |x|^gamma when two_sided)."""
    if p < 1.0:
        raise ValueError(f"norm exponent must satisfy p >= 1, got {p}")
    if isinstance(f, expansion.GridFunction):
        return _norm_integral_grid(f, p, gamma) ** (1.0 / p)
    if two_sided:
        fn_plus = lambda x: f(x)
        fn_minus = lambda x: f(-np.asarray(x, dtype=float))
        total = (_norm_integral_callable(fn_plus, p, gamma)
                 + _norm_integral_callable(fn_minus, p, gamma))
        return total ** (1.0 / p)
    return _norm_integral_callable(f, p, gamma) ** (1.0 / p)


# ---------------------------------------------------------------------------
# Admissibility predicates
# ---------------------------------------------------------------------------


def admissible_laguerre(e):
    """Exponent conditions for the plain Laguerre system."""
    diff = 1.0 / e.q - 1.0 / e.p
    return (0.0 < e.sigma < e.alpha + 1.0
            and e.a < (e.alpha + 1.0) / e.p_conj
            and e.b < (e.alpha + 1.0) / e.q
            and diff * (e.alpha + 0.5) <= e.a + e.b <= diff * (e.alpha + 1.0) + e.sigma)


def admissible_hermite(e):
    """Exponent conditions for the Hermite system (alpha plays no role)."""
    diff = 1.0 / e.q - 1.0 / e.p
    return (0.0 < e.sigma < 0.5
            and e.a < 1.0 / e.p_conj
            and e.b < 1.0 / e.q
            and 0.0 <= e.a + e.b <= diff + 2.0 * e.sigma)


def system_reduction(e, system):
    """Map a companion system's weight powers (given in e.a, e.b) to the
    plain-Laguerre pair through the norm identities of the change maps."""
    alpha, p, q = e.alpha, e.p, e.q
    if system == "laguerre_l":
        a, b = e.a, e.b
    elif system == "laguerre_script_L":
        a = e.a + alpha * (0.5 - 1.0 / p)
        b = e.b - alpha * (0.5 - 1.0 / q)
    elif system == "laguerre_phi":
        a_mid = e.a / 2.0 + 0.25 - 1.0 / (2.0 * p)
        b_mid = e.b / 2.0 - 0.25 + 1.0 / (2.0 * q)
        a = a_mid + alpha * (0.5 - 1.0 / p)
        b = b_mid - alpha * (0.5 - 1.0 / q)
    elif system == "laguerre_psi":
        a, b = e.a / 2.0, e.b / 2.0
    else:
        raise ValueError(f"no reduction for system {system!r}")
    return ExponentSet(p, q, a, b, e.sigma, alpha)


def admissible_system(e, system):
    """Admissibility for any system, by reduction to the plain Laguerre
    predicate (Hermite delegates to its own predicate)."""
    if system == "hermite":
        return admissible_hermite(e)
    return admissible_laguerre(system_reduction(e, system))


def system_literal_conditions(e, system):
    """The literally quoted ranges for the companion systems.

    These disagree with the reduction for p < q (their upper sum bound is
    non-positive there); surfaced for comparison, not used for verdicts.
    """
    diff = 1.0 / e.q - 1.0 / e.p
    alpha = e.alpha
    if system == "laguerre_script_L":
        return (e.a < alpha / 2.0 + 1.0 / e.p_conj
                and e.b < alpha / 2.0 + 1.0 / e.q
                and diff * (alpha + 1.0) < e.a + e.b <= e.sigma * diff)
    if system == "laguerre_phi":
        return (e.a < alpha + 1.0 / e.p_conj + 0.5
                and e.b < alpha + 1.0 / e.q + 0.5
                and diff * (2.0 * alpha + 1.0) < e.a + e.b <= (2.0 * e.sigma - 1.0) * diff)
    if system == "laguerre_psi":
        return (e.a < 2.0 * alpha + 1.0 + 1.0 / e.p_conj
                and e.b < 1.0 / e.q
                and diff * (2.0 * alpha + 1.0) < e.a + e.b <= (2.0 * e.sigma - 1.0) * diff)
    raise ValueError(f"no literal conditions recorded for system {system!r}")


# ---------------------------------------------------------------------------
# Test families and the experiment runner
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TestFamily:
    """Named members of the dense polynomial-times-decay test class."""

    members: tuple

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)


def default_family(seed=0, kind="laguerre", max_degree=10, extra=5):
    """Monomial members x^j (j = 0..max_degree) plus seeded random members."""
    cls = expansion.PolyHalfExp if kind == "laguerre" else expansion.PolyGauss
    members = []
    for j in range(max_degree + 1):
        coeffs = (0.0,) * j + (1.0,)
        members.append(cls(coeffs, label=f"monomial_{j:02d}"))
    rng = np.random.default_rng(seed)
    for i in range(extra):
        coeffs = tuple(rng.uniform(-1.0, 1.0, size=max_degree + 1))
        members.append(cls(coeffs, label=f"random_{i}"))
    return TestFamily(tuple(members))


@dataclass
class MemberResult:
    name: str
    p_norm: float
    q_norm: float
    ratio: float
    note: str = ""


@dataclass
class ExperimentReport:
    basis: expansion.ExpansionBasis
    exponents: ExponentSet
    rho: float
    truncation: int
    admissible: bool
    informative_only: bool
    rows: list = field(default_factory=list)
    h1_total_variation: float | None = None
    h2_sigma_fit: float | None = None
    h2_accepted: bool | None = None
    literal_verdict: bool | None = None

    @property
    def max_ratio(self):
        ratios = [r.ratio for r in self.rows if not r.note]
        return max(ratios) if ratios else math.nan

    def summary(self):
        return {
            "system": self.basis.system,
            "alpha": self.basis.alpha,
            "exponents": {"p": self.exponents.p, "q": self.exponents.q,
                          "a": self.exponents.a, "b": self.exponents.b,
                          "sigma": self.exponents.sigma},
            "rho": self.rho,
            "truncation": self.truncation,
            "admissible": self.admissible,
            "informative_only": self.informative_only,
            "literal_verdict": self.literal_verdict,
            "max_ratio": self.max_ratio,
            "h1_total_variation": self.h1_total_variation,
            "h2_sigma_fit": self.h2_sigma_fit,
            "h2_accepted": self.h2_accepted,
            "flagged_members": [r.name for r in self.rows if r.note],
        }


def _experiment_weights(basis, e):
    """Measure exponents (numerator gamma, denominator gamma, two_sided)."""
    system = basis.system
    alpha = basis.alpha
    if system == "laguerre_l":
        return alpha - e.b * e.q, alpha + e.a * e.p, False
    if system == "hermite":
        return -e.b * e.q, e.a * e.p, True
    if system in ("laguerre_script_L", "laguerre_phi"):
        return -e.b * e.q, e.a * e.p, False
    if system == "laguerre_psi":
        offset = 2.0 * alpha + 1.0
        return offset - e.b * e.q, offset + e.a * e.p, False
    raise ValueError(f"unknown system {system!r}")


def run_experiment(sym, basis, e, family=None, rho=1.0, truncation=expansion.DEFAULT_TRUNCATION,
                   map_member=map):
    """Weighted-norm ratios of the multiplier across a test family.

    Each member f is analyzed, the diagonal multiplier with damping rho is
    applied, and the ratio of the output q-norm to the input p-norm is
    recorded.  Members whose norm integrals diverge are flagged, not fatal.
    `map_member` may be swapped for a parallel map; aggregation order stays
    member order, which keeps the report deterministic.
    """
    if family is None:
        family = default_family(kind="hermite" if basis.system == "hermite" else "laguerre")
    gamma_num, gamma_den, two_sided = _experiment_weights(basis, e)
    if basis.system == "hermite":
        admissible = admissible_hermite(e)
    else:
        admissible = admissible_system(e, basis.system)
    report = ExperimentReport(
        basis=basis, exponents=e, rho=rho, truncation=truncation,
        admissible=admissible, informative_only=not admissible)
    if basis.system not in ("laguerre_l", "hermite"):
        report.literal_verdict = system_literal_conditions(e, basis.system)
    try:
        report.h1_total_variation = symbols.verify_H1(sym)
    except symbols.DivergentIntegralError:
        report.h1_total_variation = None
    fit_sigma, _ = symbols.verify_H2(sym)
    report.h2_sigma_fit = None if math.isinf(fit_sigma) else fit_sigma
    report.h2_accepted = symbols.h2_accepts(sym, e.sigma)

    def one(member):
        name = member.label or f"member_{id(member):x}"
        try:
            cv = expansion.analyze(member, basis, truncation)
            m_cv = expansion.apply_multiplier(cv, sym, rho)
            q_norm = weighted_norm(expansion.SeriesFunction(m_cv), e.q, gamma_num, two_sided)
            p_norm = weighted_norm(member, e.p, gamma_den, two_sided)
            return MemberResult(name, p_norm, q_norm, q_norm / p_norm)
        except (NormDivergenceError, quad.DivergentIntegralError) as exc:
            return MemberResult(name, math.nan, math.nan, math.nan, note=str(exc))

    report.rows = list(map_member(one, family.members))
    return report
