import math

import numpy as np
import pytest
from scipy import stats

from lightdisc import receivers
from lightdisc.photostats import (CountDistribution, bose_einstein_pmf,
                                  laguerre_pmf, padded, poisson_pmf)
from lightdisc.receivers import (DiscriminationProblem, HypothesisLabel,
                                 chernoff_bound, curve_point, dd_error,
                                 error_from_pmfs, gk_error, gk_objective,
                                 helstrom_error, homodyne_decide,
                                 homodyne_error, homodyne_interval,
                                 kennedy_error, map_decide)


def test_map_decide_tie_goes_to_thermal():
    p = poisson_pmf(0.3)
    assert map_decide(0, p, p) == HypothesisLabel.THERMAL


def test_map_decide_zero_likelihood_cases():
    spread = poisson_pmf(0.5)
    point = padded(CountDistribution(pmf=np.array([1.0, 0.0]),
                                     family="poisson", params=(0.0,)),
                   spread.n_cap)
    # count 1 is impossible under the point mass, so Coherent must win there
    assert map_decide(1, spread, point) == HypothesisLabel.COHERENT
    assert map_decide(1, point, spread) == HypothesisLabel.THERMAL


def test_map_decide_matches_direct_pmf_comparison():
    p_coh = poisson_pmf(0.09)
    p_th = laguerre_pmf(0.25, (0.5 + 0.3) ** 2)
    cap = min(p_coh.n_cap, p_th.n_cap)
    for n in range(cap + 1):
        expected = (HypothesisLabel.COHERENT
                    if p_coh.pmf[n] > p_th.pmf[n] else HypothesisLabel.THERMAL)
        assert map_decide(n, p_coh, p_th) == expected


def test_map_decide_rejects_out_of_range_counts():
    p = poisson_pmf(0.5)
    with pytest.raises(ValueError):
        map_decide(-1, p, p)
    with pytest.raises(ValueError):
        map_decide(p.n_cap + 1, p, p)


def test_error_identical_pmfs_is_half():
    p = bose_einstein_pmf(0.7)
    assert abs(error_from_pmfs(p, p) - 0.5) < 1e-12


def test_error_disjoint_supports_is_zero():
    a = CountDistribution(pmf=np.array([1.0, 0.0]), family="poisson",
                          params=(0.0,))
    b = CountDistribution(pmf=np.array([0.0, 1.0]), family="derived")
    assert error_from_pmfs(a, b) == 0.0


def test_error_invariant_under_simultaneous_padding():
    p_coh = poisson_pmf(0.8)
    p_th = bose_einstein_pmf(0.8)
    cap = max(p_coh.n_cap, p_th.n_cap) + 40
    base = error_from_pmfs(p_coh, p_th)
    wide = error_from_pmfs(padded(p_coh, cap), padded(p_th, cap))
    assert wide == base


def test_error_degenerate_prior_is_zero():
    p_coh = poisson_pmf(0.8)
    p_th = bose_einstein_pmf(0.8)
    assert error_from_pmfs(p_coh, p_th, prior_coherent=1.0) == 0.0
    assert error_from_pmfs(p_coh, p_th, prior_coherent=0.0) == 0.0


def test_dd_error_against_brute_force_sum():
    # oracle: scipy pmfs summed far past any reasonable truncation
    ns = 1.0
    n = np.arange(201)
    pois = stats.poisson.pmf(n, ns)
    be = (ns / (ns + 1.0)) ** n / (ns + 1.0)
    expected = np.minimum(0.5 * pois, 0.5 * be).sum()
    # the library pmfs stop at a 1e-10 tail, the oracle runs to n = 200
    assert abs(dd_error(DiscriminationProblem(ns)) - expected) < 1e-10


def test_dd_error_vacuum_is_half():
    assert abs(dd_error(DiscriminationProblem(0.0)) - 0.5) < 1e-12


def test_dd_error_non_increasing():
    grid = np.logspace(-2, np.log10(2.0), 12)
    vals = [dd_error(DiscriminationProblem(float(g))) for g in grid]
    assert all(b <= a + 1e-10 for a, b in zip(vals, vals[1:]))


def _homodyne_quadrature_oracle(problem, n_points=400001, span=12.0):
    # numerical Bayes error: integrate min of the two weighted densities
    m, v1, v2 = receivers.homodyne_moments(problem)
    x = np.linspace(-span, span + m, n_points)
    f_coh = problem.prior_coherent * stats.norm.pdf(x, loc=m, scale=math.sqrt(v1))
    f_th = problem.prior_thermal * stats.norm.pdf(x, loc=0.0, scale=math.sqrt(v2))
    return float(np.trapezoid(np.minimum(f_coh, f_th), x))


def test_homodyne_error_matches_quadrature():
    problem = DiscriminationProblem(0.5)
    assert abs(homodyne_error(problem) - _homodyne_quadrature_oracle(problem)) < 1e-6


def test_homodyne_error_unequal_priors_matches_quadrature():
    problem = DiscriminationProblem(0.5, prior_coherent=0.3)
    assert abs(homodyne_error(problem) - _homodyne_quadrature_oracle(problem)) < 1e-6


def test_homodyne_error_vacuum_is_half():
    assert homodyne_error(DiscriminationProblem(0.0)) == 0.5


def test_homodyne_interval_brackets_the_coherent_mean():
    problem = DiscriminationProblem(0.4)
    lo, hi = homodyne_interval(problem)
    assert lo < math.sqrt(0.4) < hi


def test_homodyne_empty_interval_costs_the_coherent_prior():
    # prior so lopsided that no quadrature value favors Coherent
    problem = DiscriminationProblem(0.01, prior_coherent=1e-9)
    lo, hi = homodyne_interval(problem)
    assert math.isnan(lo) and math.isnan(hi)
    assert homodyne_error(problem) == problem.prior_coherent


def test_homodyne_decide_consistent_with_interval():
    problem = DiscriminationProblem(0.6)
    lo, hi = homodyne_interval(problem)
    eps = 1e-9
    assert homodyne_decide(0.5 * (lo + hi), problem) == HypothesisLabel.COHERENT
    assert homodyne_decide(lo - eps, problem) == HypothesisLabel.THERMAL
    assert homodyne_decide(hi + eps, problem) == HypothesisLabel.THERMAL


def test_kennedy_error_closed_form():
    # exact nulling leaves a point mass at n = 0 against the thermal pmf,
    # so the error is half the displaced-thermal vacuum weight
    for ns in (0.05, 0.4, 1.0):
        expected = 0.5 / (1.0 + ns) * math.exp(-ns / (1.0 + ns))
        assert abs(kennedy_error(DiscriminationProblem(ns)) - expected) < 1e-14


def test_kennedy_is_gk_objective_at_zero():
    problem = DiscriminationProblem(0.3)
    assert kennedy_error(problem) == gk_objective(problem, 0.0)


def test_gk_objective_rejects_negative_beta():
    with pytest.raises(ValueError):
        gk_objective(DiscriminationProblem(0.3), -0.1)


def test_gk_error_vacuum_point():
    point = gk_error(DiscriminationProblem(0.0))
    assert point.beta == 0.0
    assert abs(point.p_err - 0.5) < 1e-12


def test_gk_error_against_dense_grid():
    problem = DiscriminationProblem(0.05)
    point = gk_error(problem)
    hi = math.sqrt(0.05) + receivers.GK_BETA_HEADROOM
    grid = np.linspace(0.0, hi, 10001)
    vals = np.array([gk_objective(problem, float(b)) for b in grid])
    i = int(np.argmin(vals))
    assert point.p_err <= vals[i] + 1e-12
    assert abs(point.p_err - vals[i]) < 1e-8
    assert abs(point.beta - grid[i]) < hi / 10000 + 1e-6


@pytest.mark.parametrize("ns", [0.02, 0.1, 0.4, 1.5])
def test_gk_never_worse_than_kennedy(ns):
    problem = DiscriminationProblem(ns)
    assert gk_error(problem).p_err <= kennedy_error(problem) + 1e-12


def test_gk_error_degenerate_prior_keeps_beta_zero():
    point = gk_error(DiscriminationProblem(0.4, prior_coherent=1.0))
    assert point.beta == 0.0
    assert point.p_err == 0.0


def test_helstrom_vacuum_is_half():
    assert abs(helstrom_error(DiscriminationProblem(0.0)) - 0.5) < 1e-12


def test_helstrom_stable_under_dimension_doubling():
    problem = DiscriminationProblem(0.5)
    assert abs(helstrom_error(problem, dim=60) - helstrom_error(problem, dim=120)) < 1e-9


def test_helstrom_below_trivial_prior_guess():
    problem = DiscriminationProblem(0.5, prior_coherent=0.3)
    p = helstrom_error(problem)
    assert 0.0 < p < 0.3


def test_chernoff_vacuum_endpoint():
    assert chernoff_bound(DiscriminationProblem(0.0)) == (0.0, 1.0)


def test_chernoff_q_at_unity_s_is_state_norm():
    # Q(1) collapses to the squared norm of the coherent amplitudes
    ns = 0.5
    n = np.arange(60)
    log_c2 = -ns + n * math.log(ns) - np.array(
        [math.lgamma(k + 1.0) for k in n])
    q1 = float(np.exp(log_c2).sum())
    assert abs(q1 - 1.0) < 1e-10


def _chernoff_integrand_grid(ns, s_grid):
    dim = 80
    n = np.arange(dim)
    log_c2 = -ns + n * math.log(ns) - np.array(
        [math.lgamma(k + 1.0) for k in n])
    log_p = n * math.log(ns) - (n + 1) * math.log(ns + 1.0)
    return np.array([np.exp(log_c2 + (1.0 - s) * log_p).sum() for s in s_grid])


def test_chernoff_minimum_not_above_endpoints():
    for ns in (0.1, 0.5, 1.0):
        s_opt, q = chernoff_bound(DiscriminationProblem(ns))
        ends = _chernoff_integrand_grid(ns, [0.0, 1.0])
        assert q <= ends[0] + 1e-12
        assert q <= ends[1] + 1e-12
        assert 0.0 <= s_opt <= 1.0


def test_chernoff_matches_dense_s_grid():
    ns = 0.5
    _, q = chernoff_bound(DiscriminationProblem(ns))
    vals = _chernoff_integrand_grid(ns, np.linspace(0.0, 1.0, 20001))
    assert abs(q - vals.min()) < 1e-10


@pytest.mark.parametrize("ns", [0.1, 0.5, 1.0])
def test_chernoff_upper_bounds_helstrom(ns):
    problem = DiscriminationProblem(ns)
    _, q = chernoff_bound(problem)
    assert 0.5 * q >= helstrom_error(problem) - 1e-9


def test_receiver_ordering_and_range():
    # quantum limit below the optimized displacement receiver, which cannot
    # beat its own beta = 0 point, which cannot beat plain photon counting
    for ns in (0.05, 0.2, 0.4, 1.0, 2.0):
        problem = DiscriminationProblem(ns)
        h = helstrom_error(problem)
        gk = gk_error(problem).p_err
        k = kennedy_error(problem)
        dd = dd_error(problem)
        hd = homodyne_error(problem)
        assert h <= gk + 1e-10
        assert gk <= k + 1e-10
        assert k <= dd + 1e-10
        assert h <= hd + 1e-10
        for val in (h, gk, k, dd, hd):
            assert 0.0 <= val <= 0.5 + 1e-12


def test_all_curves_non_increasing_in_signal():
    grid = np.logspace(-3, np.log10(2.0), 20)
    rows = [curve_point(DiscriminationProblem(float(g))) for g in grid]
    for name in ("dd", "hd", "kennedy", "gk", "helstrom"):
        vals = [getattr(r, name) for r in rows]
        assert all(b <= a + 1e-10 for a, b in zip(vals, vals[1:])), name


def test_kennedy_beats_homodyne_at_high_signal():
    for ns in (0.35, 0.5, 1.0):
        problem = DiscriminationProblem(ns)
        assert kennedy_error(problem) < homodyne_error(problem)


def test_gk_beats_homodyne_above_crossover_region():
    for ns in (0.05, 0.1, 0.5):
        problem = DiscriminationProblem(ns)
        assert gk_error(problem).p_err < homodyne_error(problem)


def test_homodyne_close_to_kennedy_near_crossover():
    problem = DiscriminationProblem(0.25)
    assert abs(homodyne_error(problem) - kennedy_error(problem)) <= 0.01


def test_curve_point_full_population():
    point = curve_point(DiscriminationProblem(0.4))
    assert point.nbar_s == 0.4
    assert point.dd is not None and point.hd is not None
    assert point.kennedy is not None and point.gk is not None
    assert point.gk_beta is not None
    assert point.helstrom is not None
    assert point.chernoff_s is not None and point.chernoff_q is not None
    assert point.gk <= point.kennedy


def test_curve_point_subsets_leave_none_fields():
    point = curve_point(DiscriminationProblem(0.4), receivers=("dd",),
                        bounds=())
    assert point.dd is not None
    assert point.hd is None and point.kennedy is None and point.gk is None
    assert point.helstrom is None and point.chernoff_q is None


def test_curve_point_rejects_unknown_names():
    with pytest.raises(ValueError):
        curve_point(DiscriminationProblem(0.4), receivers=("dd", "bogus"))
    with pytest.raises(ValueError):
        curve_point(DiscriminationProblem(0.4), bounds=("helstrom", "bogus"))


def test_problem_validation():
    with pytest.raises(ValueError):
        DiscriminationProblem(-0.1)
    with pytest.raises(ValueError):
        DiscriminationProblem(0.5, prior_coherent=1.5)
    assert DiscriminationProblem(0.5, prior_coherent=0.2).prior_thermal == 0.8
