"""K-means over Gaussian measures with barycentric centers.

Lloyd-style alternation: assign each measure to the nearest center in
squared W2 distance, then replace each center by the equal-weight
barycenter of its members, until the centers stop moving or the
assignments stabilize. Initial centers are drawn from the observations;
after the first update the centers are free barycenters and no longer
constrained to the collection.
"""

from dataclasses import dataclass

import numpy as np

from .barycenter import uniform_weights, wasserstein_barycenter
from .compactness import CompactnessReport, evaluate_clustering
from .errors import DimMismatchError, EmptyClusterError, KTooLargeError
from .measures import GaussianMeasure, MeasureCollection, _w2_squared_parts, w2_distance
from .spd import sqrt_spd

INIT_RANDOM = "random"
INIT_FARTHEST = "farthest"


@dataclass(frozen=True)
class ClusteringConfig:
    """Search parameters for the K-means driver.

    ``init`` is ``"random"`` (k distinct members, seeded) or ``"farthest"``
    (member closest to the global barycenter first, then greedy max-min
    separation). ``center_tol`` stops the loop once no center moves more
    than this W2 distance; unchanged assignments stop it as well.
    ``restarts`` reruns the seeded search and keeps the lowest inertia.
    """

    k: int
    init: str = INIT_RANDOM
    seed: int = None
    max_iter: int = 100
    center_tol: float = 1e-8
    restarts: int = 1

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be at least 1, got {self.k}")
        if self.init not in (INIT_RANDOM, INIT_FARTHEST):
            raise ValueError(f"unknown init {self.init!r}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be at least 1, got {self.max_iter}")
        if self.center_tol <= 0.0:
            raise ValueError(f"center_tol must be positive, got {self.center_tol}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be at least 1, got {self.restarts}")


@dataclass(frozen=True, eq=False)
class ClusteringResult:
    """Final partition with centers and diagnostics.

    ``inertia`` is the total squared W2 distance of each measure to its
    center; ``inertia_history`` records it after every assignment pass.
    ``reports`` carries the compactness evaluation when requested.
    """

    assignments: np.ndarray
    centers: tuple
    global_barycenter: GaussianMeasure
    inertia: float
    iterations: int
    converged: bool
    inertia_history: tuple
    reports: CompactnessReport = None


def global_barycenter(collection: MeasureCollection) -> GaussianMeasure:
    """Equal-weight barycenter of the whole collection."""
    return wasserstein_barycenter(collection, uniform_weights(len(collection))).barycenter


def init_centers(collection: MeasureCollection, config: ClusteringConfig):
    """Initial centers drawn from the collection members.

    Random init picks ``k`` distinct members with the configured seed;
    farthest-first starts from the member closest to the global barycenter
    and greedily adds the member maximizing its minimum distance to the
    centers already chosen. Ties resolve toward the smaller index.
    """
    indices = _init_indices(collection, config, np.random.default_rng(config.seed))
    return [collection[i] for i in indices]


def _init_indices(collection, config, rng) -> list:
    n = len(collection)
    if config.k > n:
        raise KTooLargeError(f"k={config.k} exceeds collection size n={n}")
    if config.init == INIT_RANDOM:
        return [int(i) for i in rng.choice(n, size=config.k, replace=False)]
    center = global_barycenter(collection)
    to_center = np.array([w2_distance(m, center) for m in collection])
    chosen = [int(np.argmin(to_center))]
    min_dist = np.array([w2_distance(m, collection[chosen[0]]) for m in collection])
    while len(chosen) < config.k:
        min_dist[chosen] = -np.inf
        nxt = int(np.argmax(min_dist))
        chosen.append(nxt)
        if len(chosen) < config.k:
            dist_new = np.array([w2_distance(m, collection[nxt]) for m in collection])
            min_dist = np.minimum(min_dist, dist_new)
    return chosen


def _distance_matrix(collection, centers, member_roots, member_traces) -> np.ndarray:
    n, k = len(collection), len(centers)
    out = np.empty((n, k))
    for j, center in enumerate(centers):
        if center.dim != collection.dim:
            raise DimMismatchError(
                f"center {j} has dim {center.dim}, expected {collection.dim}"
            )
        for i, m in enumerate(collection):
            out[i, j] = _w2_squared_parts(
                m.mean, member_traces[i], member_roots[i], center.mean, center.cov
            )
    return out


def assign_step(collection: MeasureCollection, centers) -> np.ndarray:
    """Nearest-center assignment by squared W2 distance (ties: smallest id)."""
    roots = [sqrt_spd(m.cov) for m in collection]
    traces = [float(np.trace(m.cov)) for m in collection]
    return np.argmin(_distance_matrix(collection, centers, roots, traces), axis=1)


def update_step(collection: MeasureCollection, assignments, k: int, prev_centers=None):
    """Equal-weight barycenter of each cluster's members.

    An empty cluster is reseeded with the member farthest from its previous
    center, which requires ``prev_centers``; without them the empty cluster
    raises.
    """
    assignments = np.asarray(assignments, dtype=int)
    centers = []
    for cluster_id in range(k):
        member_idx = np.flatnonzero(assignments == cluster_id)
        if member_idx.size == 0:
            if prev_centers is None:
                raise EmptyClusterError(f"cluster {cluster_id} has no members")
            far = np.argmax([w2_distance(m, prev_centers[cluster_id]) for m in collection])
            centers.append(collection[int(far)])
            continue
        members = collection.subset(member_idx)
        centers.append(wasserstein_barycenter(members, uniform_weights(len(members))).barycenter)
    return centers


def kmeans(
    collection: MeasureCollection,
    config: ClusteringConfig,
    initial_centers=None,
    compute_reports: bool = False,
) -> ClusteringResult:
    """Run the clustering, keeping the best of the configured restarts.

    Parameters
    ----------
    collection : MeasureCollection
        Observations to cluster.
    config : ClusteringConfig
        Search parameters; ``config.k`` must not exceed the collection size.
    initial_centers : sequence of GaussianMeasure, optional
        Explicit initial centers overriding ``config.init`` (single run).
    compute_reports : bool
        Attach the compactness evaluation of the final partition.

    Returns
    -------
    ClusteringResult
    """
    n = len(collection)
    if config.k > n:
        raise KTooLargeError(f"k={config.k} exceeds collection size n={n}")

    center_of_mass = global_barycenter(collection)
    rng = np.random.default_rng(config.seed)

    # Deterministic inits need only one run; so do explicit centers.
    runs = config.restarts
    if initial_centers is not None or config.init == INIT_FARTHEST:
        runs = 1

    best = None
    for _ in range(runs):
        if initial_centers is not None:
            centers = list(initial_centers)
            if len(centers) != config.k:
                raise ValueError(f"{len(centers)} initial centers for k={config.k}")
        else:
            centers = [collection[i] for i in _init_indices(collection, config, rng)]
        candidate = _lloyd(collection, centers, config, center_of_mass)
        if best is None or candidate.inertia < best.inertia:
            best = candidate

    if compute_reports:
        reports = evaluate_clustering(
            collection, best.assignments, list(best.centers), center_of_mass
        )
        best = ClusteringResult(
            assignments=best.assignments,
            centers=best.centers,
            global_barycenter=best.global_barycenter,
            inertia=best.inertia,
            iterations=best.iterations,
            converged=best.converged,
            inertia_history=best.inertia_history,
            reports=reports,
        )
    return best


def _lloyd(collection, centers, config, center_of_mass) -> ClusteringResult:
    roots = [sqrt_spd(m.cov) for m in collection]
    traces = [float(np.trace(m.cov)) for m in collection]

    def assign(current_centers):
        matrix = _distance_matrix(collection, current_centers, roots, traces)
        labels = np.argmin(matrix, axis=1)
        inertia = float(matrix[np.arange(len(collection)), labels].sum())
        return labels, inertia

    assignments, inertia = assign(centers)
    history = [inertia]
    converged = False
    iterations = 0
    for iterations in range(1, config.max_iter + 1):
        new_centers = update_step(collection, assignments, config.k, centers)
        movement = max(
            w2_distance(old, new) for old, new in zip(centers, new_centers)
        )
        centers = new_centers
        new_assignments, inertia = assign(centers)
        history.append(inertia)
        stable = bool(np.array_equal(new_assignments, assignments))
        assignments = new_assignments
        if stable or movement <= config.center_tol:
            converged = True
            break

    return ClusteringResult(
        assignments=assignments,
        centers=tuple(centers),
        global_barycenter=center_of_mass,
        inertia=inertia,
        iterations=iterations,
        converged=converged,
        inertia_history=tuple(history),
    )


@dataclass(frozen=True, eq=False)
class ScanRow:
    """GCI outcome of one clustering in a scan over cluster counts."""

    k: int
    gci_total: float
    gci_per_cluster: tuple
    degenerate: bool
    result: ClusteringResult


def gci_scan(
    collection: MeasureCollection,
    kmin: int,
    kmax: int,
    seed: int = None,
    restarts: int = 1,
    max_workers: int = 1,
):
    """Cluster for every K in ``[kmin, kmax]`` and report the GCI curve.

    The same seed is reused for every K so curves are comparable from run
    to run. Returns one :class:`ScanRow` per K, in order.
    """
    n = len(collection)
    if not 1 <= kmin <= kmax <= n:
        raise KTooLargeError(f"need 1 <= kmin <= kmax <= n, got {kmin}..{kmax} for n={n}")

    def run(k: int) -> ScanRow:
        config = ClusteringConfig(k=k, seed=seed, restarts=restarts)
        result = kmeans(collection, config, compute_reports=True)
        reports = result.reports
        return ScanRow(
            k=k,
            gci_total=reports.gci_total,
            gci_per_cluster=tuple(c.gci for c in reports.clusters),
            degenerate=any(c.degenerate for c in reports.clusters),
            result=result,
        )

    ks = range(kmin, kmax + 1)
    if max_workers and max_workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(run, ks))
    return [run(k) for k in ks]
