"""Wasserstein barycenters of Gaussian measures.

The barycenter of a weighted collection has the weighted mean of the
locations as its location, and a dispersion solving

    S = sum_i w_i (S^(1/2) S_i S^(1/2))^(1/2)

which is approximated by the fixed-point iteration

    M' = M^(-1/2) ( sum_i w_i (M^(1/2) S_i M^(1/2))^(1/2) )^2 M^(-1/2)

until the iterates stop moving in Frobenius norm.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimMismatchError, InvalidWeightsError
from .measures import GaussianMeasure, MeasureCollection
from .spd import spd_roots, sqrt_spd, sym_part

WEIGHT_SUM_TOL = 1e-12

INIT_EUCLIDEAN_MEAN = "euclidean_mean"
INIT_FIRST_MEMBER = "first_member"


@dataclass(frozen=True)
class BarycenterConfig:
    """Stopping rule and initialization for the dispersion iteration.

    ``tol`` bounds the relative Frobenius change between successive
    iterates; ``init`` selects the starting matrix: the Euclidean mean of
    the dispersions (SPD as a convex combination) or the first member.
    """

    tol: float = 1e-10
    max_iter: int = 500
    init: str = INIT_EUCLIDEAN_MEAN

    def __post_init__(self):
        if self.tol <= 0.0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be at least 1, got {self.max_iter}")
        if self.init not in (INIT_EUCLIDEAN_MEAN, INIT_FIRST_MEMBER):
            raise ValueError(f"unknown init {self.init!r}")


@dataclass(frozen=True, eq=False)
class BarycenterResult:
    """Barycenter plus convergence diagnostics.

    ``residual`` is the Frobenius norm of the fixed-point defect of the
    returned dispersion; ``converged`` is False when the iteration hit
    ``max_iter``, in which case the best iterate is still returned.
    """

    barycenter: GaussianMeasure
    iterations: int
    residual: float
    converged: bool


def check_weights(weights, n: int) -> np.ndarray:
    """Validate a weight vector on the unit simplex.

    Raises
    ------
    InvalidWeightsError
        If the length differs from ``n``, any weight is negative, or the
        weights do not sum to one within tolerance.
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.shape[0] != n:
        raise InvalidWeightsError(f"expected {n} weights, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise InvalidWeightsError("weights contain non-finite entries")
    if np.any(w < 0.0):
        raise InvalidWeightsError("weights must be nonnegative")
    total = float(w.sum())
    if abs(total - 1.0) > WEIGHT_SUM_TOL * max(1.0, abs(total)):
        raise InvalidWeightsError(f"weights sum to {total!r}, expected 1")
    return w


def uniform_weights(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def barycenter_location(measures: MeasureCollection, weights) -> np.ndarray:
    """Weighted mean of the member locations."""
    w = check_weights(weights, len(measures))
    means = np.stack([m.mean for m in measures])
    return w @ means


def fixed_point_step(M, measures, weights) -> np.ndarray:
    """One iterate of the barycenter dispersion map.

    Parameters
    ----------
    M : array_like
        Current SPD iterate.
    measures : MeasureCollection or sequence of GaussianMeasure
        Members whose dispersions enter the map.
    weights : array_like
        Simplex weights, one per member.

    Returns
    -------
    ndarray
        The next iterate, re-symmetrized; SPD whenever the inputs are.
    """
    covs = [m.cov for m in measures]
    w = check_weights(weights, len(covs))
    return _fixed_point_step_covs(np.asarray(M, dtype=float), covs, w)


def _fixed_point_step_covs(M, covs, w) -> np.ndarray:
    root, inv_root = spd_roots(M)
    d = M.shape[0]
    inner = np.zeros((d, d))
    for wi, cov in zip(w, covs):
        if wi == 0.0:
            continue
        inner += wi * sqrt_spd(sym_part(root @ cov @ root))
    return sym_part(inv_root @ inner @ inner @ inv_root)


def _dispersion_residual(S, covs, w) -> float:
    root = sqrt_spd(S)
    target = np.zeros_like(S)
    for wi, cov in zip(w, covs):
        target += wi * sqrt_spd(sym_part(root @ cov @ root))
    return float(np.linalg.norm(S - target))


def wasserstein_barycenter(
    measures: MeasureCollection,
    weights=None,
    config: BarycenterConfig = None,
) -> BarycenterResult:
    """Barycenter of a weighted collection of Gaussian measures.

    The location is the weighted mean of member locations. The dispersion
    is iterated from the configured initial matrix until the relative
    Frobenius change drops below ``config.tol`` or ``config.max_iter`` is
    reached; members with exactly zero weight are dropped beforehand.

    Returns
    -------
    BarycenterResult
        Barycenter, iteration count, fixed-point residual, and whether the
        stopping tolerance was met.
    """
    if config is None:
        config = BarycenterConfig()
    n = len(measures)
    w = uniform_weights(n) if weights is None else check_weights(weights, n)
    dims = {m.dim for m in measures}
    if len(dims) != 1:
        raise DimMismatchError(f"mixed dimensions in collection: {sorted(dims)}")

    location = barycenter_location(measures, w)

    active = [(wi, m.cov) for wi, m in zip(w, measures) if wi > 0.0]
    if not active:
        raise InvalidWeightsError("all weights are zero")
    w_act = np.array([wi for wi, _ in active])
    covs = [cov for _, cov in active]

    if config.init == INIT_FIRST_MEMBER:
        M = covs[0].copy()
    else:
        M = sym_part(sum(wi * cov for wi, cov in zip(w_act, covs)))

    converged = False
    iterations = 0
    for iterations in range(1, config.max_iter + 1):
        M_next = _fixed_point_step_covs(M, covs, w_act)
        change = float(np.linalg.norm(M_next - M))
        scale = max(1.0, float(np.linalg.norm(M)))
        M = M_next
        if change <= config.tol * scale:
            converged = True
            break

    residual = _dispersion_residual(M, covs, w_act)
    return BarycenterResult(
        barycenter=GaussianMeasure(location, M),
        iterations=iterations,
        residual=residual,
        converged=converged,
    )
