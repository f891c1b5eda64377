"""Truncated Fock-space states for the laser-vs-thermal discrimination problem.

Amplitudes are restricted to real, nonnegative values (a stable phase
reference pins the relative phase to zero), so every state here is a real
symmetric matrix and the displacement operator is real orthogonal. That
halves the numerical cost and loses nothing for this problem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln
from scipy.stats import poisson

TAIL_TOL = 1e-12     # Fock-tail mass a state constructor may drop
PSD_TOL = 1e-10      # eigenvalue floor for a valid density matrix
DEFECT_TOL = 1e-8    # orthogonality defect allowed on interior columns
DIM_FLOOR = 30       # choose_dim never returns less than this


class TruncationError(ValueError):
    """The requested truncation drops more tail mass than allowed."""


class PaddingError(TruncationError):
    """A cropped displacement shows unitarity defects where it should not."""


@dataclass(eq=False)
class TruncatedState:
    """Density matrix truncated to the lowest ``dim`` Fock levels.

    matrix is real symmetric, PSD up to PSD_TOL, with trace close to 1;
    label is one of coherent | thermal | displaced-thermal | other.
    """

    matrix: np.ndarray
    label: str = "other"

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def trace(self) -> float:
        return float(np.trace(self.matrix))

    def check(self, trace_tol: float = 1e-12) -> "TruncatedState":
        """Enforce the type invariants; returns self so factories can chain."""
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
            raise ValueError("matrix must be square with dim >= 2")
        asym = float(np.max(np.abs(m - m.T)))
        if asym != 0.0:
            raise ValueError(f"matrix not symmetric, max asymmetry {asym:.3e}")
        tr = self.trace()
        if abs(tr - 1.0) > trace_tol:
            raise TruncationError(f"trace {tr!r} outside 1 +/- {trace_tol:g}")
        lowest = float(np.linalg.eigvalsh(m)[0])
        if lowest < -PSD_TOL:
            raise ValueError(f"matrix not PSD, lowest eigenvalue {lowest:.3e}")
        return self


def _require_poisson_tail(mean: float, dim: int) -> None:
    tail = float(poisson.sf(dim - 1, mean))
    if tail > TAIL_TOL:
        raise TruncationError(
            f"Poisson(mean={mean:g}) keeps tail {tail:.3e} beyond dim={dim}")


def coherent_vector(alpha: float, dim: int) -> np.ndarray:
    """Fock amplitudes <n|alpha> = e^(-alpha^2/2) alpha^n / sqrt(n!), alpha real.

    Evaluated in the log domain so large alpha never overflows the factorial.
    The squared entries are the Poisson(alpha^2) pmf.
    """
    if alpha < 0:
        raise ValueError("alpha must be nonnegative (phase convention)")
    if dim < 2:
        raise ValueError("dim must be at least 2")
    _require_poisson_tail(alpha * alpha, dim)
    if alpha == 0.0:
        vec = np.zeros(dim)
        vec[0] = 1.0
        return vec
    n = np.arange(dim)
    return np.exp(-0.5 * alpha * alpha + n * math.log(alpha) - 0.5 * gammaln(n + 1.0))


def coherent_state(alpha: float, dim: int) -> TruncatedState:
    """Projector |alpha><alpha| as a TruncatedState."""
    vec = coherent_vector(alpha, dim)
    return TruncatedState(np.outer(vec, vec), label="coherent").check()


def thermal_matrix(nbar: float, dim: int) -> TruncatedState:
    """Thermal state of mean photon number nbar: diag of Bose-Einstein weights."""
    if nbar < 0:
        raise ValueError("nbar must be nonnegative")
    if dim < 2:
        raise ValueError("dim must be at least 2")
    diag = np.zeros(dim)
    if nbar == 0.0:
        diag[0] = 1.0
    else:
        tail = math.exp(dim * math.log(nbar / (nbar + 1.0)))
        if tail > TAIL_TOL:
            raise TruncationError(
                f"thermal tail {tail:.3e} beyond dim={dim} exceeds {TAIL_TOL:g}")
        n = np.arange(dim)
        diag = np.exp(n * math.log(nbar) - (n + 1) * math.log(nbar + 1.0))
    return TruncatedState(np.diag(diag), label="thermal").check()


def default_pad(beta: float) -> int:
    """Extra rows needed so the cropped displacement is clean at this beta."""
    return 4 * int(math.ceil(beta * beta)) + 20


def _interior_columns(beta: float, dim: int) -> int:
    """How many leading columns of the cropped displacement must be orthonormal.

    Displacing |m> concentrates the image near photon number m + beta^2 with
    spread ~ sqrt(beta^2 (2m+1)). Five spreads of headroom below the crop edge
    keep the escaped mass, and with it the defect, well under DEFECT_TOL.
    Column 0 is always covered.
    """
    b2 = beta * beta
    m = 0
    while m + 1 < dim and (m + 1) + 5.0 * abs(beta) * math.sqrt(2.0 * (m + 1) + 1.0) <= dim - b2:
        m += 1
    return m + 1


def displacement_matrix(beta: float, dim: int, pad: int | None = None) -> np.ndarray:
    """Truncated displacement exp(beta (adag - a)) as a dim x dim real matrix.

    The skew-symmetric generator is built at dim + pad and exponentiated
    there, then cropped, which confines truncation artifacts to the discarded
    rows. Column 0 equals coherent_vector(|beta|, dim) up to the sign of beta.
    """
    if dim < 2:
        raise ValueError("dim must be at least 2")
    needed = default_pad(beta)
    if pad is None:
        pad = needed
    elif pad < needed:
        raise ValueError(f"pad must be at least {needed} for beta={beta:g}")
    big = dim + pad
    k = np.arange(1, big)
    gen = np.zeros((big, big))
    gen[k, k - 1] = beta * np.sqrt(k)    # beta * adag on the lower diagonal
    gen[k - 1, k] = -beta * np.sqrt(k)   # -beta * a on the upper diagonal
    crop = np.asarray(expm(gen))[:dim, :dim].copy()
    h = _interior_columns(beta, dim)
    defect = float(np.max(np.abs(crop[:, :h].T @ crop[:, :h] - np.eye(h))))
    if defect > DEFECT_TOL:
        raise PaddingError(
            f"unitarity defect {defect:.3e} on the first {h} columns; "
            f"dim={dim} is too small for beta={beta:g}")
    return crop


def apply_displacement(state: TruncatedState, beta: float) -> TruncatedState:
    """Rotate a state by the truncated displacement: D(beta) M D(beta)^T.

    A thermal input comes back labeled displaced-thermal. The trace may sag
    slightly when mass leaks past the crop edge; more than 1e-10 of leakage
    raises, and the caller should enlarge dim.
    """
    if beta == 0.0:
        return state
    d = displacement_matrix(beta, state.dim)
    rot = d @ state.matrix @ d.T
    rot = 0.5 * (rot + rot.T)  # exact resymmetrization of rounding noise
    label = "displaced-thermal" if state.label == "thermal" else state.label
    return TruncatedState(rot, label=label).check(trace_tol=1e-10)


def trace_norm_distance(a, b) -> float:
    """Trace norm ||a - b||_1, the sum of |eigenvalues| of the difference.

    Accepts TruncatedState or plain symmetric arrays; the weighted Helstrom
    form passes prior-scaled matrices directly. For two states the result
    lies in [0, 2].
    """
    ma = a.matrix if isinstance(a, TruncatedState) else np.asarray(a)
    mb = b.matrix if isinstance(b, TruncatedState) else np.asarray(b)
    if ma.shape != mb.shape:
        raise ValueError(f"dimension mismatch: {ma.shape} vs {mb.shape}")
    eig = np.linalg.eigvalsh(ma - mb)
    return float(np.sum(np.abs(eig)))


def choose_dim(nbar: float, beta_max: float = 0.0) -> int:
    """Smallest dim (at least DIM_FLOOR) holding both hypotheses after displacement.

    Coverage means the Poisson((sqrt(nbar) + beta_max)^2) tail and the thermal
    geometric tail both drop below TAIL_TOL. Deterministic in its inputs.
    """
    if nbar < 0 or beta_max < 0:
        raise ValueError("nbar and beta_max must be nonnegative")
    mean = (math.sqrt(nbar) + beta_max) ** 2
    log_ratio = math.log(nbar / (nbar + 1.0)) if nbar > 0 else None
    log_tol = math.log(TAIL_TOL)
    dim = DIM_FLOOR
    while True:
        ok_pois = float(poisson.sf(dim - 1, mean)) <= TAIL_TOL
        ok_geom = log_ratio is None or dim * log_ratio <= log_tol
        if ok_pois and ok_geom:
            return dim
        dim += 1
