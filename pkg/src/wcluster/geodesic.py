"""Geodesics between Gaussian measures and projection onto them.

The shortest path between two Gaussian measures in W2 space interpolates
the locations linearly and carries the dispersion through the optimal map
of the centered parts: with ``L`` the transport matrix,

    m(t) = (1 - t) m0 + t m1
    S(t) = ((1 - t) I + t L) S0 ((1 - t) I + t L)

Registering a measure onto a segment means minimizing the squared distance
to the curve over t in [0, 1].
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimMismatchError, OutOfRangeError
from .measures import (
    GaussianMeasure,
    _clamped_trace_term,
    _w2_squared_parts,
    measures_close,
    w2_distance,
)
from .spd import inv_sqrt_spd, sqrt_spd, sym_part

# Interval width in t at which golden-section refinement stops.
SOLVER_TOL = 1e-8
# W2 distance below which a segment is treated as a constant curve.
DEGENERATE_TOL = 1e-12
# Default dense-scan resolution for the registration objective.
GRID_POINTS = 257

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def transport_map(source: GaussianMeasure, target: GaussianMeasure) -> np.ndarray:
    """Optimal transport matrix between the centered parts of two measures.

    Returns the SPD matrix ``L`` with ``L @ S_source @ L == S_target``, so
    that ``x -> L x`` pushes the centered source onto the centered target.
    """
    if source.dim != target.dim:
        raise DimMismatchError(f"dimension mismatch: {source.dim} vs {target.dim}")
    root_t = sqrt_spd(target.cov)
    core = inv_sqrt_spd(sym_part(root_t @ source.cov @ root_t))
    return sym_part(root_t @ core @ root_t)


@dataclass(frozen=True, eq=False)
class GeodesicSegment:
    """Constant-speed segment from ``source`` (t=0) to ``target`` (t=1).

    ``map`` is the transport matrix of the centered parts; ``degenerate``
    marks coincident endpoints, for which the curve is constant.
    """

    source: GaussianMeasure
    target: GaussianMeasure
    map: np.ndarray
    degenerate: bool

    @property
    def dim(self) -> int:
        return self.source.dim


@dataclass(frozen=True)
class RegistrationSolution:
    """Minimizer of the distance from a measure to a segment.

    ``tau`` is the curve parameter of the projection, ``dist`` the W2
    distance attained there.
    """

    tau: float
    dist: float


def make_geodesic(a: GaussianMeasure, b: GaussianMeasure) -> GeodesicSegment:
    """Build the segment from ``a`` to ``b``; flags coincident endpoints.

    Coincidence is detected both by the distance falling below the
    degeneracy tolerance and by componentwise equality of the endpoints;
    the latter is robust to the noise floor of the closed-form distance.
    """
    degenerate = w2_distance(a, b) < DEGENERATE_TOL or measures_close(a, b)
    return GeodesicSegment(source=a, target=b, map=transport_map(a, b), degenerate=degenerate)


def point_at(segment: GeodesicSegment, t: float) -> GaussianMeasure:
    """Measure at parameter ``t`` on the segment.

    Raises
    ------
    OutOfRangeError
        If ``t`` lies outside [0, 1].
    """
    if not 0.0 <= t <= 1.0:
        raise OutOfRangeError(f"curve parameter must lie in [0, 1], got {t}")
    mean, cov = _point_params(segment, t)
    return GaussianMeasure(mean, cov)


def _point_params(segment: GeodesicSegment, t: float):
    blend = (1.0 - t) * np.eye(segment.dim) + t * segment.map
    cov = sym_part(blend @ segment.source.cov @ blend)
    mean = (1.0 - t) * segment.source.mean + t * segment.target.mean
    return mean, cov


def register(
    mu: GaussianMeasure,
    segment: GeodesicSegment,
    solver_tol: float = SOLVER_TOL,
    grid_points: int = GRID_POINTS,
) -> RegistrationSolution:
    """Project a measure onto a segment.

    The squared-distance objective is continuous on [0, 1] but not
    certified unimodal, so a dense grid scan locates the global basin and
    golden-section search refines inside the bracketing grid cell. Ties
    resolve toward the smaller parameter. For a degenerate segment the
    convention is ``tau = 0`` with the distance to the (constant) source.

    Returns
    -------
    RegistrationSolution
        ``tau`` within ``solver_tol`` of the minimizer, and the distance at
        ``tau``.
    """
    if mu.dim != segment.dim:
        raise DimMismatchError(f"dimension mismatch: {mu.dim} vs {segment.dim}")
    if segment.degenerate:
        return RegistrationSolution(tau=0.0, dist=w2_distance(mu, segment.source))

    mean_mu = mu.mean
    trace_mu = float(np.trace(mu.cov))
    root_mu = sqrt_spd(mu.cov)

    def objective(t: float) -> float:
        mean_t, cov_t = _point_params(segment, t)
        return _w2_squared_parts(mean_mu, trace_mu, root_mu, mean_t, cov_t)

    ts = np.linspace(0.0, 1.0, grid_points)
    values = _grid_objective(mu, segment, ts, root_mu, trace_mu)
    j = int(np.argmin(values))
    best_t, best_f = float(ts[j]), float(values[j])

    lo = float(ts[j - 1]) if j > 0 else float(ts[0])
    hi = float(ts[j + 1]) if j < grid_points - 1 else float(ts[-1])
    ref_t, ref_f = _golden_section(objective, lo, hi, solver_tol)
    if ref_f < best_f or (ref_f == best_f and ref_t < best_t):
        best_t, best_f = ref_t, ref_f

    return RegistrationSolution(tau=best_t, dist=math.sqrt(max(best_f, 0.0)))


def _grid_objective(mu, segment, ts, root_mu, trace_mu) -> np.ndarray:
    """Registration objective on a whole grid in one batched pass."""
    eye = np.eye(segment.dim)
    blends = (1.0 - ts)[:, None, None] * eye + ts[:, None, None] * segment.map
    covs = blends @ segment.source.cov @ blends
    covs = 0.5 * (covs + np.transpose(covs, (0, 2, 1)))
    inner = root_mu @ covs @ root_mu
    inner = 0.5 * (inner + np.transpose(inner, (0, 2, 1)))
    # Eigenvalues of PD products; tiny negatives are eigensolver noise.
    eigvals = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    cross_traces = np.sqrt(eigvals).sum(axis=1)
    cov_traces = np.trace(covs, axis1=1, axis2=2)
    means = np.outer(1.0 - ts, segment.source.mean) + np.outer(ts, segment.target.mean)
    loc2 = ((mu.mean - means) ** 2).sum(axis=1)
    terms = np.array(
        [
            _clamped_trace_term(trace_mu, float(tb), float(tc))
            for tb, tc in zip(cov_traces, cross_traces)
        ]
    )
    return loc2 + terms


def _golden_section(objective, lo: float, hi: float, tol: float):
    """Golden-section minimization; returns the best evaluated (t, f).

    Ties keep the leftmost point so boundary minimizers are preserved.
    """
    a, b = lo, hi
    best_t, best_f = a, objective(a)
    fb = objective(b)
    if fb < best_f:
        best_t, best_f = b, fb

    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = objective(c), objective(d)
    while (b - a) > tol:
        for t, f in ((c, fc), (d, fd)):
            if f < best_f or (f == best_f and t < best_t):
                best_t, best_f = t, f
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = objective(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = objective(d)
    for t, f in ((c, fc), (d, fd)):
        if f < best_f or (f == best_f and t < best_t):
            best_t, best_f = t, f
    return best_t, best_f
