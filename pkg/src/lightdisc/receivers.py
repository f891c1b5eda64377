"""Analytic error probabilities for the four receivers and the quantum bounds.

Under hypothesis Coherent the signal is a coherent state of mean photon
number nbar_s; under Thermal it is a thermal state of the same mean. Every
receiver reduces to a binary MAP test on a counting (or quadrature)
statistic, and the quantum limits come from the truncated Fock states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import gammaln
from scipy.stats import norm

from . import fock
from .photostats import (CountDistribution, bose_einstein_pmf, laguerre_pmf,
                         padded, poisson_pmf)

GK_BETA_HEADROOM = 5.0   # search bracket is [0, sqrt(nbar_s) + headroom]
GK_GRID_POINTS = 200     # coarse seeding grid before golden-section
GK_BETA_XTOL = 1e-6
CHERNOFF_S_XTOL = 1e-9

RECEIVER_NAMES = ("dd", "hd", "kennedy", "gk")
BOUND_NAMES = ("helstrom", "chernoff")


class HypothesisLabel(Enum):
    """The two hypotheses: laser light or thermal light of equal mean."""

    COHERENT = "coherent"
    THERMAL = "thermal"


@dataclass(frozen=True)
class DiscriminationProblem:
    """Signal strength and priors for the binary laser-vs-thermal test."""

    nbar_s: float
    prior_coherent: float = 0.5

    def __post_init__(self):
        if self.nbar_s < 0:
            raise ValueError("nbar_s must be nonnegative")
        if not 0.0 <= self.prior_coherent <= 1.0:
            raise ValueError("prior_coherent must lie in [0, 1]")

    @property
    def prior_thermal(self) -> float:
        return 1.0 - self.prior_coherent


@dataclass(frozen=True)
class GkOperatingPoint:
    """Optimal over-displacement amplitude and the error it achieves."""

    beta: float
    p_err: float


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_min(f, a: float, b: float, xtol: float) -> tuple[float, float]:
    """Golden-section minimum of a unimodal scalar function on [a, b]."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while abs(b - a) > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def map_decide(count: int, p_coh: CountDistribution, p_th: CountDistribution,
               prior_coherent: float = 0.5) -> HypothesisLabel:
    """MAP rule on a photon count; ties go to Thermal.

    Ties have measure zero for these families away from nbar_s = 0; the
    deterministic tie rule keeps the degenerate point reproducible.
    """
    if count < 0 or count > p_coh.n_cap or count > p_th.n_cap:
        raise ValueError(f"count {count} outside the pmf tables")
    w_coh = prior_coherent * float(p_coh.pmf[count])
    w_th = (1.0 - prior_coherent) * float(p_th.pmf[count])
    return HypothesisLabel.COHERENT if w_coh > w_th else HypothesisLabel.THERMAL


def error_from_pmfs(p_coh: CountDistribution, p_th: CountDistribution,
                    prior_coherent: float = 0.5) -> float:
    """Bayes error of the MAP rule: sum over n of min(pi1 p1[n], pi2 p2[n]).

    The shorter pmf is zero-padded so both hypotheses share a count range;
    the value is invariant under further simultaneous padding.
    """
    cap = max(p_coh.n_cap, p_th.n_cap)
    a = padded(p_coh, cap).pmf
    b = padded(p_th, cap).pmf
    return float(np.minimum(prior_coherent * a, (1.0 - prior_coherent) * b).sum())


def dd_error(problem: DiscriminationProblem) -> float:
    """Ideal photon-number-resolving direct detection."""
    return error_from_pmfs(poisson_pmf(problem.nbar_s),
                           bose_einstein_pmf(problem.nbar_s),
                           problem.prior_coherent)


def homodyne_moments(problem: DiscriminationProblem) -> tuple[float, float, float]:
    """(coherent mean, coherent variance, thermal variance) of x = (a + adag)/2.

    Convention: vacuum variance 1/4, so the coherent hypothesis gives
    N(sqrt(nbar_s), 1/4) and the thermal hypothesis N(0, (2 nbar_s + 1)/4).
    Any self-consistent quadrature scaling yields the same error.
    """
    ns = problem.nbar_s
    return math.sqrt(ns), 0.25, (2.0 * ns + 1.0) * 0.25


def homodyne_interval(problem: DiscriminationProblem) -> tuple[float, float]:
    """Acceptance interval [x_lo, x_hi] for Coherent in the quadrature test.

    The variances differ, so the log-likelihood-ratio equation is quadratic
    with a negative leading coefficient: accept Coherent between its roots.
    Returns an empty interval (nan, nan) when no x favors Coherent.
    """
    if problem.nbar_s <= 0.0:
        raise ValueError("no acceptance interval at nbar_s = 0")
    pi1, pi2 = problem.prior_coherent, problem.prior_thermal
    if pi1 <= 0.0 or pi2 <= 0.0:
        raise ValueError("degenerate priors have no interval")
    m, v1, v2 = homodyne_moments(problem)
    a = 0.5 / v2 - 0.5 / v1          # negative: v1 < v2
    b = m / v1
    c = -m * m / (2.0 * v1) + 0.5 * math.log(v2 / v1) + math.log(pi1 / pi2)
    disc = b * b - 4.0 * a * c
    if disc <= 0.0:
        return math.nan, math.nan
    root = math.sqrt(disc)
    x1 = (-b + root) / (2.0 * a)
    x2 = (-b - root) / (2.0 * a)
    return min(x1, x2), max(x1, x2)


def homodyne_error(problem: DiscriminationProblem) -> float:
    """Bayes error of the two-Gaussian quadrature test, via the Gaussian CDF."""
    pi1, pi2 = problem.prior_coherent, problem.prior_thermal
    if pi1 == 0.0 or pi2 == 0.0:
        return 0.0
    if problem.nbar_s == 0.0:
        return min(pi1, pi2)  # identical vacuum Gaussians
    m, v1, v2 = homodyne_moments(problem)
    lo, hi = homodyne_interval(problem)
    if math.isnan(lo):
        return pi1  # never accept Coherent
    s1, s2 = math.sqrt(v1), math.sqrt(v2)
    inside_coh = norm.cdf((hi - m) / s1) - norm.cdf((lo - m) / s1)
    inside_th = norm.cdf(hi / s2) - norm.cdf(lo / s2)
    return float(pi1 * (1.0 - inside_coh) + pi2 * inside_th)


def homodyne_decide(x: float, problem: DiscriminationProblem) -> HypothesisLabel:
    """MAP decision from one quadrature sample; ties go to Thermal."""
    pi1, pi2 = problem.prior_coherent, problem.prior_thermal
    if pi1 == 0.0:
        return HypothesisLabel.THERMAL
    if pi2 == 0.0:
        return HypothesisLabel.COHERENT
    m, v1, v2 = homodyne_moments(problem)
    w_coh = math.log(pi1) - 0.5 * math.log(v1) - (x - m) ** 2 / (2.0 * v1)
    w_th = math.log(pi2) - 0.5 * math.log(v2) - x * x / (2.0 * v2)
    return HypothesisLabel.COHERENT if w_coh > w_th else HypothesisLabel.THERMAL


def gk_objective(problem: DiscriminationProblem, beta: float) -> float:
    """Error of the over-displacement receiver at a fixed beta.

    Nulling the coherent hypothesis and over-displacing by beta leaves
    Poisson(beta^2) counts under Coherent and displaced-thermal counts with
    d^2 = (sqrt(nbar_s) + beta)^2 under Thermal.
    """
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    ns = problem.nbar_s
    p_coh = poisson_pmf(beta * beta)
    p_th = laguerre_pmf(ns, (math.sqrt(ns) + beta) ** 2)
    return error_from_pmfs(p_coh, p_th, problem.prior_coherent)


def kennedy_error(problem: DiscriminationProblem) -> float:
    """Exact-nulling receiver: the generalized-Kennedy objective at beta = 0."""
    return gk_objective(problem, 0.0)


def gk_error(problem: DiscriminationProblem) -> GkOperatingPoint:
    """Optimal over-displacement: minimize gk_objective over beta >= 0.

    A 200-point coarse grid seeds a golden-section refinement (the objective
    can in principle be non-convex); beta = 0 stays in the candidate set, so
    the result is never worse than the Kennedy point.
    """
    if problem.nbar_s == 0.0 or problem.prior_coherent in (0.0, 1.0):
        return GkOperatingPoint(beta=0.0, p_err=kennedy_error(problem))
    hi = math.sqrt(problem.nbar_s) + GK_BETA_HEADROOM
    grid = np.linspace(0.0, hi, GK_GRID_POINTS)
    vals = [gk_objective(problem, float(b)) for b in grid]
    i = int(np.argmin(vals))
    lo_b = float(grid[max(i - 1, 0)])
    hi_b = float(grid[min(i + 1, len(grid) - 1)])
    b_ref, f_ref = _golden_min(lambda b: gk_objective(problem, b), lo_b, hi_b,
                               GK_BETA_XTOL)
    candidates = [(0.0, float(vals[0])), (float(grid[i]), float(vals[i])),
                  (float(b_ref), float(f_ref))]
    beta, p_err = min(candidates, key=lambda t: t[1])
    return GkOperatingPoint(beta=beta, p_err=p_err)


def helstrom_error(problem: DiscriminationProblem, dim: int | None = None) -> float:
    """Quantum limit 0.5 (1 - ||pi2 rho_th - pi1 rho_coh||_1).

    For equal priors this is the usual 0.5 (1 - 0.5 ||rho_th - rho_coh||_1).
    dim defaults to fock.choose_dim(nbar_s); pass a doubled value to probe
    truncation stability.
    """
    ns = problem.nbar_s
    if dim is None:
        dim = fock.choose_dim(ns)
    rho_coh = fock.coherent_state(math.sqrt(ns), dim)
    rho_th = fock.thermal_matrix(ns, dim)
    dist = fock.trace_norm_distance(problem.prior_thermal * rho_th.matrix,
                                    problem.prior_coherent * rho_coh.matrix)
    return 0.5 * (1.0 - dist)


def chernoff_bound(problem: DiscriminationProblem) -> tuple[float, float]:
    """Quantum Chernoff bound: min over s in [0,1] of Tr(rho_coh^s rho_th^(1-s)).

    rho_coh is pure, so Q(s) = sum_n |c_n|^2 p_n^(1-s) with p_n the thermal
    weights. Golden-section handles any interior minimum; both endpoints stay
    in the candidate set (for this pair Q is increasing in s, so the minimum
    sits at s = 0). Returns (s_opt, q); the multi-copy exponent is -ln q.
    """
    ns = problem.nbar_s
    if ns == 0.0:
        return 0.0, 1.0
    dim = fock.choose_dim(ns)
    n = np.arange(dim)
    log_c2 = -ns + n * math.log(ns) - gammaln(n + 1.0)
    log_p = n * math.log(ns) - (n + 1) * math.log(ns + 1.0)

    def q_of(s: float) -> float:
        return float(np.exp(log_c2 + (1.0 - s) * log_p).sum())

    s_ref, q_ref = _golden_min(q_of, 0.0, 1.0, CHERNOFF_S_XTOL)
    candidates = [(0.0, q_of(0.0)), (1.0, q_of(1.0)), (float(s_ref), float(q_ref))]
    s_opt, q = min(candidates, key=lambda t: t[1])
    return float(s_opt), float(q)


@dataclass(frozen=True)
class ErrorCurvePoint:
    """Analytic receiver errors and quantum bounds at one signal strength."""

    nbar_s: float
    dd: float | None = None
    hd: float | None = None
    kennedy: float | None = None
    gk: float | None = None
    gk_beta: float | None = None
    helstrom: float | None = None
    chernoff_s: float | None = None
    chernoff_q: float | None = None


def curve_point(problem: DiscriminationProblem,
                receivers: tuple[str, ...] = RECEIVER_NAMES,
                bounds: tuple[str, ...] = BOUND_NAMES) -> ErrorCurvePoint:
    """Evaluate the requested receivers and bounds at one problem instance."""
    unknown = set(receivers) - set(RECEIVER_NAMES)
    if unknown:
        raise ValueError(f"unknown receivers: {sorted(unknown)}")
    unknown = set(bounds) - set(BOUND_NAMES)
    if unknown:
        raise ValueError(f"unknown bounds: {sorted(unknown)}")
    fields: dict = {"nbar_s": problem.nbar_s}
    if "dd" in receivers:
        fields["dd"] = dd_error(problem)
    if "hd" in receivers:
        fields["hd"] = homodyne_error(problem)
    if "kennedy" in receivers:
        fields["kennedy"] = kennedy_error(problem)
    if "gk" in receivers:
        point = gk_error(problem)
        fields["gk"] = point.p_err
        fields["gk_beta"] = point.beta
    if "helstrom" in bounds:
        fields["helstrom"] = helstrom_error(problem)
    if "chernoff" in bounds:
        s_opt, q = chernoff_bound(problem)
        fields["chernoff_s"] = s_opt
        fields["chernoff_q"] = q
    return ErrorCurvePoint(**fields)
