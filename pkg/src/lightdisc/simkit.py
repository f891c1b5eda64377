"""Monte Carlo emulation of the receivers with bench-style detector flaws.

Three imperfections are modeled: finite nulling extinction (a residual
fraction of the signal leaks through the null), dark counts, and dead-time
saturation of the click counter. Trials run on independent per-trial
generator streams, so batches are reproducible and can be partitioned
across workers and merged by trial index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, NamedTuple

import numpy as np

from .photostats import (CountDistribution, bose_einstein_pmf, laguerre_pmf,
                         padded, poisson_pmf, sample_count)
from .receivers import (DiscriminationProblem, HypothesisLabel, error_from_pmfs,
                        homodyne_decide, homodyne_moments, map_decide)

WILSON_Z = 1.959963984540054  # two-sided 95% normal quantile
_CALIBRATION_STREAM = 10 ** 9  # offset keeping calibration rng away from trials


class ReceiverKind(Enum):
    DIRECT_DETECTION = "dd"
    HOMODYNE = "hd"
    KENNEDY = "kennedy"
    GENERALIZED_KENNEDY = "gk"


_DISPLACED = (ReceiverKind.KENNEDY, ReceiverKind.GENERALIZED_KENNEDY)


@dataclass(frozen=True)
class DetectorModel:
    """Click detector with dead time tau_d inside a measurement window tau_s.

    The counter saturates at count_cap = floor(tau_s / tau_d) clicks and dark
    counts arrive at dark_rate per second. Defaults follow the bench device:
    50 ns dead time in a 1 us window, so zeta = 0.05 and count_cap = 20.
    """

    tau_d: float = 50e-9
    tau_s: float = 1e-6
    dark_rate: float = 0.0

    def __post_init__(self):
        if self.tau_d <= 0 or self.tau_s <= 0:
            raise ValueError("tau_d and tau_s must be positive")
        if self.tau_d >= self.tau_s:
            raise ValueError("dead time must be shorter than the window (zeta < 1)")
        if self.dark_rate < 0:
            raise ValueError("dark_rate must be nonnegative")

    @property
    def zeta(self) -> float:
        return self.tau_d / self.tau_s

    @property
    def count_cap(self) -> int:
        return int(math.floor(self.tau_s / self.tau_d))

    @property
    def dark_mean(self) -> float:
        return self.dark_rate * self.tau_s

    @classmethod
    def ideal(cls) -> "DetectorModel":
        """No dark counts, cap far beyond any pmf used here."""
        return cls(tau_d=1e-15, tau_s=1e-6, dark_rate=0.0)


@dataclass(frozen=True)
class ReceiverSpec:
    """Which receiver to run plus its imperfection parameters."""

    kind: ReceiverKind
    beta: float = 0.0
    extinction_db: float = math.inf
    detector: DetectorModel = field(default_factory=DetectorModel)

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")
        if self.beta > 0 and self.kind is not ReceiverKind.GENERALIZED_KENNEDY:
            raise ValueError("beta applies only to the generalized Kennedy receiver")
        if self.extinction_db < 0:
            raise ValueError("extinction_db must be nonnegative (dB)")
        if math.isfinite(self.extinction_db) and self.kind not in _DISPLACED:
            raise ValueError("extinction applies only to displacement receivers")


class TrialRecord(NamedTuple):
    hypothesis: HypothesisLabel
    observation: float
    decision: HypothesisLabel


@dataclass(frozen=True)
class TrialBatch:
    """Outcome of a simulation run; records line up with trial indices."""

    n_trials: int
    seed: int
    records: tuple[TrialRecord, ...]

    def __post_init__(self):
        if len(self.records) != self.n_trials:
            raise ValueError("records length must equal n_trials")


def _capped(dist: CountDistribution, cap: int) -> CountDistribution:
    """Lump all mass at counts >= cap into the cap bin (dead-time saturation)."""
    if dist.n_cap <= cap:
        return dist
    pmf = dist.pmf[: cap + 1].copy()
    pmf[cap] = float(dist.pmf[cap:].sum())
    return CountDistribution(pmf, "derived", dist.params)


def _convolved_with_poisson(dist: CountDistribution, lam: float) -> CountDistribution:
    """Add independent Poisson(lam) dark counts to a counting law."""
    dark = poisson_pmf(lam)
    return CountDistribution(np.convolve(dist.pmf, dark.pmf), "derived", dist.params)


def effective_pmfs(spec: ReceiverSpec,
                   problem: DiscriminationProblem) -> tuple[CountDistribution, CountDistribution]:
    """Counting pmfs under both hypotheses with the detector flaws folded in.

    Imperfections apply in a fixed order: extinction first (the residual
    unnulled signal adds eps*nbar_s to the coherent-hypothesis Poisson mean,
    eps = 10^(-extinction_db/10)), then dark-count convolution, then the
    dead-time cap. Both pmfs come back zero-padded to a common cap.
    """
    if spec.kind is ReceiverKind.HOMODYNE:
        raise ValueError("homodyne is a quadrature receiver and has no counting pmfs")
    ns = problem.nbar_s
    if spec.kind is ReceiverKind.DIRECT_DETECTION:
        p_coh = poisson_pmf(ns)
        p_th = bose_einstein_pmf(ns)
    else:
        beta = spec.beta
        eps = 0.0 if math.isinf(spec.extinction_db) else 10.0 ** (-spec.extinction_db / 10.0)
        p_coh = poisson_pmf(beta * beta + eps * ns)
        p_th = laguerre_pmf(ns, (math.sqrt(ns) + beta) ** 2)
    if spec.detector.dark_mean > 0.0:
        p_coh = _convolved_with_poisson(p_coh, spec.detector.dark_mean)
        p_th = _convolved_with_poisson(p_th, spec.detector.dark_mean)
    cap = spec.detector.count_cap
    p_coh = _capped(p_coh, cap)
    p_th = _capped(p_th, cap)
    common = max(p_coh.n_cap, p_th.n_cap)
    return padded(p_coh, common), padded(p_th, common)


def analytic_error(spec: ReceiverSpec, problem: DiscriminationProblem) -> float:
    """MAP error of the modeled (possibly imperfect) receiver."""
    from .receivers import homodyne_error

    if spec.kind is ReceiverKind.HOMODYNE:
        return homodyne_error(problem)
    p_coh, p_th = effective_pmfs(spec, problem)
    return error_from_pmfs(p_coh, p_th, problem.prior_coherent)


def _trial_rng(seed: int, index: int) -> np.random.Generator:
    # one independent, reproducible stream per trial index
    return np.random.default_rng(np.random.SeedSequence((seed, index)))


def _empirical_table(dist: CountDistribution, n_cal: int, seed: int,
                     channel: int) -> CountDistribution:
    """Histogram estimate of a pmf from n_cal calibration draws."""
    rng = np.random.default_rng(np.random.SeedSequence((seed, _CALIBRATION_STREAM + channel)))
    draws = rng.choice(len(dist.pmf), size=n_cal, p=dist.pmf / float(dist.pmf.sum()))
    pmf = np.bincount(draws, minlength=len(dist.pmf)).astype(float) / n_cal
    return CountDistribution(pmf, "empirical", dist.params)


def run_trials(spec: ReceiverSpec, problem: DiscriminationProblem, n_trials: int,
               seed: int, estimator: str = "analytic",
               calibration_trials: int = 1000) -> TrialBatch:
    """Simulate n_trials one-shot discriminations and record each outcome.

    Each trial draws its hypothesis from the priors, samples an observation
    from the matching effective pmf (a Gaussian quadrature value for
    homodyne), applies the MAP rule, and records the triple. estimator
    selects the tables behind the MAP rule: "analytic" uses the model pmfs
    directly; "empirical" first estimates each hypothesis pmf from
    calibration_trials sampled counts, the way a calibrated bench run would.
    Deterministic for fixed (seed, n_trials, spec, problem).
    """
    if n_trials < 1:
        raise ValueError("n_trials must be positive")
    if estimator not in ("analytic", "empirical"):
        raise ValueError("estimator must be 'analytic' or 'empirical'")
    pi1 = problem.prior_coherent
    records = []

    if spec.kind is ReceiverKind.HOMODYNE:
        if estimator == "empirical":
            raise ValueError("the empirical estimator covers counting receivers only")
        m, v1, v2 = homodyne_moments(problem)
        s1, s2 = math.sqrt(v1), math.sqrt(v2)
        for i in range(n_trials):
            rng = _trial_rng(seed, i)
            coh = rng.random() < pi1
            truth = HypothesisLabel.COHERENT if coh else HypothesisLabel.THERMAL
            x = rng.normal(m, s1) if coh else rng.normal(0.0, s2)
            records.append(TrialRecord(truth, float(x), homodyne_decide(x, problem)))
        return TrialBatch(n_trials, seed, tuple(records))

    true_coh, true_th = effective_pmfs(spec, problem)
    est_coh, est_th = true_coh, true_th
    if estimator == "empirical":
        est_coh = _empirical_table(true_coh, calibration_trials, seed, 0)
        est_th = _empirical_table(true_th, calibration_trials, seed, 1)
    for i in range(n_trials):
        rng = _trial_rng(seed, i)
        coh = rng.random() < pi1
        truth = HypothesisLabel.COHERENT if coh else HypothesisLabel.THERMAL
        n = sample_count(true_coh if coh else true_th, rng)
        records.append(TrialRecord(truth, n, map_decide(n, est_coh, est_th, pi1)))
    return TrialBatch(n_trials, seed, tuple(records))


def empirical_error(batch: TrialBatch) -> tuple[float, tuple[float, float]]:
    """Error fraction of a batch with its Wilson 95% score interval."""
    n = batch.n_trials
    wrong = sum(1 for r in batch.records if r.decision is not r.hypothesis)
    p = wrong / n
    z2 = WILSON_Z * WILSON_Z
    center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n)
    half = (WILSON_Z / (1.0 + z2 / n)) * math.sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n))
    return p, (max(0.0, center - half), min(1.0, center + half))


def _row_seed(seed: int, row: int) -> int:
    # distinct 64-bit seed per sweep row, stable across platforms
    return int(np.random.SeedSequence((seed, 7919, row)).generate_state(1, np.uint64)[0])


def lo_sweep(problem: DiscriminationProblem, beta_grid: Iterable[float],
             spec_template: ReceiverSpec, n_trials: int = 1000,
             seed: int = 0) -> list[tuple[float, float, float, tuple[float, float]]]:
    """Analytic and empirical error as a function of the over-displacement.

    Returns one row per beta: (beta, p_err_analytic, p_hat, (ci_lo, ci_hi)).
    The template fixes the imperfections; kind is forced to the generalized
    Kennedy receiver and beta swept over the grid. Row seeds are derived from
    (seed, row index) so rows stay independent.
    """
    betas = [float(b) for b in beta_grid]
    if not betas:
        raise ValueError("beta_grid must not be empty")
    if any(b < 0 for b in betas):
        raise ValueError("beta values must be nonnegative")
    if any(b2 <= b1 for b1, b2 in zip(betas, betas[1:])):
        raise ValueError("beta_grid must be strictly ascending")
    rows = []
    for j, beta in enumerate(betas):
        spec = replace(spec_template, kind=ReceiverKind.GENERALIZED_KENNEDY, beta=beta)
        analytic = analytic_error(spec, problem)
        batch = run_trials(spec, problem, n_trials, _row_seed(seed, j))
        p_hat, ci = empirical_error(batch)
        rows.append((beta, float(analytic), float(p_hat), ci))
    return rows
