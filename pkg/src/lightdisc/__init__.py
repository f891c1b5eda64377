"""Discriminating laser light from thermal light.

Analytic error probabilities (direct detection, homodyne, Kennedy,
generalized Kennedy), the Helstrom and quantum Chernoff limits, and a Monte
Carlo harness with bench-style detector imperfections.
"""

from .fock import (DIM_FLOOR, PaddingError, TruncatedState, TruncationError,
                   apply_displacement, choose_dim, coherent_state,
                   coherent_vector, displacement_matrix, thermal_matrix,
                   trace_norm_distance)
from .photostats import (CountDistribution, bose_einstein_pmf, laguerre_pmf,
                         padded, poisson_pmf, sample_count)
from .receivers import (BOUND_NAMES, RECEIVER_NAMES, DiscriminationProblem,
                        ErrorCurvePoint, GkOperatingPoint, HypothesisLabel,
                        chernoff_bound, curve_point, dd_error, error_from_pmfs,
                        gk_error, gk_objective, helstrom_error, homodyne_decide,
                        homodyne_error, homodyne_interval, homodyne_moments,
                        kennedy_error, map_decide)
from .simkit import (DetectorModel, ReceiverKind, ReceiverSpec, TrialBatch,
                     TrialRecord, analytic_error, effective_pmfs,
                     empirical_error, lo_sweep, run_trials)

__version__ = "0.1.0"

__all__ = [
    "DIM_FLOOR", "PaddingError", "TruncatedState", "TruncationError",
    "apply_displacement", "choose_dim", "coherent_state", "coherent_vector",
    "displacement_matrix", "thermal_matrix", "trace_norm_distance",
    "CountDistribution", "bose_einstein_pmf", "laguerre_pmf", "padded",
    "poisson_pmf", "sample_count",
    "BOUND_NAMES", "RECEIVER_NAMES", "DiscriminationProblem", "ErrorCurvePoint",
    "GkOperatingPoint", "HypothesisLabel", "chernoff_bound", "curve_point",
    "dd_error", "error_from_pmfs", "gk_error", "gk_objective", "helstrom_error",
    "homodyne_decide", "homodyne_error", "homodyne_interval", "homodyne_moments",
    "kennedy_error", "map_decide",
    "DetectorModel", "ReceiverKind", "ReceiverSpec", "TrialBatch", "TrialRecord",
    "analytic_error", "effective_pmfs", "empirical_error", "lo_sweep",
    "run_trials",
    "__version__",
]
