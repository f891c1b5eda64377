import numpy as np
import pytest
from scipy import stats

from lightdisc import photostats as ps
from lightdisc.fock import TruncationError


def test_poisson_zero_mean_is_point_mass():
    dist = ps.poisson_pmf(0.0)
    assert dist.pmf[0] == 1.0
    assert np.all(dist.pmf[1:] == 0.0)


def test_poisson_mean_one_entries():
    dist = ps.poisson_pmf(1.0)
    assert abs(dist.pmf[0] - np.exp(-1.0)) < 1e-15
    assert abs(dist.pmf[1] - np.exp(-1.0)) < 1e-15


def test_poisson_matches_scipy():
    dist = ps.poisson_pmf(0.7)
    expected = stats.poisson.pmf(np.arange(dist.n_cap + 1), 0.7)
    assert np.max(np.abs(dist.pmf - expected)) < 1e-15


def test_poisson_mean_invariant():
    dist = ps.poisson_pmf(0.4)
    assert abs(dist.mean() - 0.4) < 1e-8


def test_poisson_cap_too_small():
    with pytest.raises(TruncationError):
        ps.poisson_pmf(5.0, n_cap=3)


def test_bose_einstein_geometric_entries():
    dist = ps.bose_einstein_pmf(1.0)
    n = np.arange(dist.n_cap + 1)
    assert np.max(np.abs(dist.pmf - 0.5 ** (n + 1))) < 1e-15


def test_bose_einstein_ground_weight():
    assert abs(ps.bose_einstein_pmf(0.1).pmf[0] - 1.0 / 1.1) < 1e-15


def test_bose_einstein_zero_is_point_mass():
    dist = ps.bose_einstein_pmf(0.0)
    assert dist.pmf[0] == 1.0


def test_bose_einstein_cap_too_small():
    with pytest.raises(TruncationError):
        ps.bose_einstein_pmf(2.0, n_cap=10)


def test_laguerre_zero_displacement_is_bose_einstein():
    lag = ps.laguerre_pmf(0.1, 0.0, n_cap=40)
    be = ps.bose_einstein_pmf(0.1, n_cap=40)
    assert np.array_equal(lag.pmf, be.pmf)
    assert lag.family == "laguerre"


def test_laguerre_zero_thermal_is_poisson():
    lag = ps.laguerre_pmf(0.0, 0.9, n_cap=30)
    poi = ps.poisson_pmf(0.9, n_cap=30)
    assert np.array_equal(lag.pmf, poi.pmf)


def test_laguerre_tiny_thermal_limit():
    lag = ps.laguerre_pmf(1e-14, 0.9, n_cap=30)
    poi = ps.poisson_pmf(0.9, n_cap=30)
    assert np.max(np.abs(lag.pmf - poi.pmf)) < 1e-8


def test_laguerre_mean():
    dist = ps.laguerre_pmf(0.1, 0.9)
    assert abs(dist.mean() - 1.0) < 1e-6
    assert abs(dist.mean() - 1.0) < ps.MEAN_TOL  # type invariant is tighter


@pytest.mark.parametrize("nbar,d2", [(0.05, 0.1), (0.1, 0.9), (0.5, 2.0), (1.0, 0.5)])
def test_laguerre_normalization_and_mean(nbar, d2):
    dist = ps.laguerre_pmf(nbar, d2)
    total = float(dist.pmf.sum())
    assert 1.0 - ps.TAIL_TOL <= total <= 1.0 + 1e-12
    assert abs(dist.mean() - (nbar + d2)) < ps.MEAN_TOL


def test_laguerre_log_domain_no_underflow():
    dist = ps.laguerre_pmf(0.1, 0.9, n_cap=200)
    assert np.all(np.isfinite(dist.pmf))
    assert np.all(dist.pmf >= 0.0)
    assert dist.pmf[150] < 1e-100  # deep tail evaluated, not flushed to junk


def test_laguerre_rejects_negative_params():
    with pytest.raises(ValueError):
        ps.laguerre_pmf(-0.1, 0.9)
    with pytest.raises(ValueError):
        ps.laguerre_pmf(0.1, -0.9)


def test_padded_preserves_values():
    dist = ps.poisson_pmf(0.5)
    wide = ps.padded(dist, dist.n_cap + 10)
    assert wide.n_cap == dist.n_cap + 10
    assert np.array_equal(wide.pmf[: dist.n_cap + 1], dist.pmf)
    assert np.all(wide.pmf[dist.n_cap + 1:] == 0.0)
    with pytest.raises(ValueError):
        ps.padded(dist, dist.n_cap - 1)


def test_families_pass_their_own_check():
    for dist in (ps.poisson_pmf(1.3), ps.bose_einstein_pmf(0.7),
                 ps.laguerre_pmf(0.3, 1.1)):
        assert dist.check() is dist


def test_sample_point_mass_always_zero():
    dist = ps.poisson_pmf(0.0)
    rng = np.random.default_rng(1)
    assert all(ps.sample_count(dist, rng) == 0 for _ in range(10))


def test_sample_deterministic_for_fixed_seed():
    dist = ps.poisson_pmf(0.5)
    runs = []
    for _ in range(2):
        rng = np.random.default_rng(42)
        runs.append([ps.sample_count(dist, rng) for _ in range(20)])
    assert runs[0] == runs[1]


def test_sample_mean_clt():
    # 1e6 draws of Poisson(1): the mean sits within 4 sigma of 1
    dist = ps.poisson_pmf(1.0)
    rng = np.random.default_rng(123)
    draws = np.array([ps.sample_count(dist, rng) for _ in range(10 ** 6)])
    assert abs(draws.mean() - 1.0) < 4.0 / 1000.0


@pytest.mark.parametrize("dist", [ps.poisson_pmf(1.0), ps.bose_einstein_pmf(0.5),
                                  ps.laguerre_pmf(0.1, 0.9)],
                         ids=["poisson", "bose_einstein", "laguerre"])
def test_sampler_chi_square_fit(dist):
    n_draws = 10 ** 5
    rng = np.random.default_rng(2024)
    draws = np.array([ps.sample_count(dist, rng) for _ in range(n_draws)])
    observed = np.bincount(draws, minlength=dist.n_cap + 1).astype(float)
    expected = dist.pmf / dist.pmf.sum() * n_draws
    # merge the sparse tail into one cell with expected mass at least 5
    cut = len(expected)
    while cut > 2 and expected[cut:].sum() < 5.0:
        cut -= 1
    obs = np.append(observed[:cut], observed[cut:].sum())
    exp = np.append(expected[:cut], expected[cut:].sum())
    _, pvalue = stats.chisquare(obs, exp)
    assert pvalue >= 1e-3
