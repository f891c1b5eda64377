"""Photon-counting laws for the three field classes met in this problem.

Coherent light counts are Poisson, thermal light counts are Bose-Einstein
(geometric), and displaced thermal light counts follow a Laguerre
distribution. Everything is evaluated in the log domain and truncated at a
cap chosen so the dropped tail is negligible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .fock import TruncationError

TAIL_TOL = 1e-10     # mass a truncated pmf may leave beyond its cap
MEAN_TOL = 1e-8      # truncated mean must match the analytic mean this well
_SIGMAS = 12.0       # auto cap first guess: mean + 12 standard deviations
_RESCALE = 1e250     # running-rescale threshold for the Laguerre recurrence


@dataclass(eq=False)
class CountDistribution:
    """Finite pmf over photon counts 0..n_cap inclusive.

    family is poisson | bose_einstein | laguerre for the analytic laws;
    derived tables (capped, convolved, or estimated from calibration data)
    carry a free-form tag and skip the analytic-mean check.
    params holds (mean,), (nbar,), or (nbar_th, d2) for the analytic laws.
    """

    pmf: np.ndarray
    family: str
    params: tuple[float, ...] = ()

    @property
    def n_cap(self) -> int:
        return int(len(self.pmf) - 1)

    def mean(self) -> float:
        return float(np.arange(len(self.pmf)) @ self.pmf)

    def analytic_mean(self) -> float | None:
        if self.family in ("poisson", "bose_einstein"):
            return self.params[0]
        if self.family == "laguerre":
            return self.params[0] + self.params[1]
        return None

    def check(self) -> "CountDistribution":
        if len(self.pmf) < 2:
            raise ValueError("pmf must cover counts 0 and 1 at least")
        if not np.all(np.isfinite(self.pmf)) or np.any(self.pmf < 0):
            raise ValueError("pmf entries must be finite and nonnegative")
        total = float(self.pmf.sum())
        if not (1.0 - TAIL_TOL <= total <= 1.0 + 1e-12):
            raise TruncationError(f"pmf sums to {total!r}; n_cap too small")
        target = self.analytic_mean()
        if target is not None and abs(self.mean() - target) > MEAN_TOL:
            raise TruncationError(
                f"truncated mean {self.mean()!r} misses analytic mean {target!r}")
        return self


def padded(dist: CountDistribution, n_cap: int) -> CountDistribution:
    """Zero-pad a distribution out to a larger cap; same family and params."""
    if n_cap < dist.n_cap:
        raise ValueError("n_cap smaller than the current cap")
    if n_cap == dist.n_cap:
        return dist
    pmf = np.zeros(n_cap + 1)
    pmf[: len(dist.pmf)] = dist.pmf
    return CountDistribution(pmf, dist.family, dist.params)


def _build(family: str, params: tuple[float, ...], mean: float, var: float,
           values, n_cap: int | None) -> CountDistribution:
    """Assemble a distribution, auto-growing the cap when none is given.

    The first guess mean + 12 sigma is verified by summation: the cap must
    keep the tail under TAIL_TOL and the truncated mean within a tenth of
    MEAN_TOL, so the type invariant holds with margin even for heavy tails.
    """
    if n_cap is not None:
        if n_cap < 1:
            raise ValueError("n_cap must be positive")
        return CountDistribution(values(int(n_cap)), family, params).check()
    cap = max(1, int(math.ceil(mean + _SIGMAS * math.sqrt(max(var, 0.0)))))
    while True:
        pmf = values(cap)
        tail = 1.0 - float(pmf.sum())
        deficit = mean - float(np.arange(cap + 1) @ pmf)
        if tail <= TAIL_TOL and abs(deficit) <= 0.1 * MEAN_TOL:
            return CountDistribution(pmf, family, params).check()
        cap = max(cap + 1, int(1.2 * cap))


def poisson_pmf(mean: float, n_cap: int | None = None) -> CountDistribution:
    """Poisson counting law, pmf[n] = e^(-mean) mean^n / n!."""
    if mean < 0:
        raise ValueError("mean must be nonnegative")

    def values(cap: int) -> np.ndarray:
        if mean == 0.0:
            out = np.zeros(cap + 1)
            out[0] = 1.0
            return out
        n = np.arange(cap + 1)
        return np.exp(-mean + n * math.log(mean) - gammaln(n + 1.0))

    return _build("poisson", (mean,), mean, mean, values, n_cap)


def bose_einstein_pmf(nbar: float, n_cap: int | None = None) -> CountDistribution:
    """Thermal (geometric) counting law, pmf[n] = nbar^n / (nbar+1)^(n+1)."""
    if nbar < 0:
        raise ValueError("nbar must be nonnegative")

    def values(cap: int) -> np.ndarray:
        if nbar == 0.0:
            out = np.zeros(cap + 1)
            out[0] = 1.0
            return out
        n = np.arange(cap + 1)
        return np.exp(n * math.log(nbar) - (n + 1) * math.log(nbar + 1.0))

    return _build("bose_einstein", (nbar,), nbar, nbar * (nbar + 1.0), values, n_cap)


def laguerre_pmf(nbar_th: float, d2: float, n_cap: int | None = None) -> CountDistribution:
    """Counting law of a displaced thermal state.

    pmf[n] = BE(nbar_th)[n] * e^(-d2/(nbar_th+1)) * L_n(-d2/(nbar_th (nbar_th+1)))
    with L_n the Laguerre polynomial. The argument is negative, so every term
    of the three-term recurrence is positive: a running rescale keeps the
    iteration finite at large n and no cancellation ever occurs. Limits:
    nbar_th -> 0 recovers Poisson(d2) and d2 -> 0 recovers Bose-Einstein.
    The mean is nbar_th + d2.
    """
    if nbar_th < 0 or d2 < 0:
        raise ValueError("nbar_th and d2 must be nonnegative")
    if nbar_th == 0.0:
        base = poisson_pmf(d2, n_cap)
        return CountDistribution(base.pmf, "laguerre", (0.0, d2)).check()
    if d2 == 0.0:
        base = bose_einstein_pmf(nbar_th, n_cap)
        return CountDistribution(base.pmf, "laguerre", (nbar_th, 0.0)).check()

    x = d2 / (nbar_th * (nbar_th + 1.0))
    log_ratio = math.log(nbar_th / (nbar_th + 1.0))
    offset = -math.log(nbar_th + 1.0) - d2 / (nbar_th + 1.0)

    def values(cap: int) -> np.ndarray:
        log_l = np.empty(cap + 1)
        log_l[0] = 0.0
        log_l[1] = math.log1p(x)
        prev, cur, shift = 1.0, 1.0 + x, 0.0
        for n in range(1, cap):
            prev, cur = cur, ((2.0 * n + 1.0 + x) * cur - n * prev) / (n + 1.0)
            if cur > _RESCALE:
                prev /= cur
                shift += math.log(cur)
                cur = 1.0
            log_l[n + 1] = shift + math.log(cur)
        n = np.arange(cap + 1)
        return np.exp(n * log_ratio + offset + log_l)

    mean = nbar_th + d2
    var = nbar_th * (nbar_th + 1.0) + d2 * (2.0 * nbar_th + 1.0)
    return _build("laguerre", (nbar_th, d2), mean, var, values, n_cap)


def sample_count(dist: CountDistribution, rng: np.random.Generator) -> int:
    """Draw one count by inverse CDF over the finite table."""
    cdf = np.cumsum(dist.pmf)
    u = rng.random() * cdf[-1]
    return int(np.searchsorted(cdf, u, side="right"))
