"""Cluster compactness scoring through double geodesic registration.

For each cluster the members are projected onto the segment running from
the global barycenter to the cluster center. The member closest to the
center acts as the reference element; projecting each member's curve point
back onto the member-to-reference segment yields a second parameter, and
the two parameters combine with the projection distances into a similarity
index per member. Averaging those gives the per-cluster compactness, and
the size-weighted mean over clusters the total index (GCI) used to compare
choices of the cluster count.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimMismatchError, EmptyClusterError, SizeMismatchError
from .geodesic import RegistrationSolution, make_geodesic, point_at, register
from .measures import GaussianMeasure, MeasureCollection, w2_distance

# Floors preventing division blow-ups when a reference projects onto the
# curve start or a member lies exactly on the curve.
EPS_TAU = 1e-9
EPS_SIGMA = 1e-9


@dataclass(frozen=True)
class RegistrationRecord:
    """Double-registration outcome for one member of a cluster.

    ``tau`` and ``sigma_tilde`` come from the projection onto the cluster
    segment, ``sigma`` is the distance to the cluster center, ``s`` the
    reverse-registration parameter. ``tau_tilde`` is the clamped similarity
    index, with the raw (unclamped) value kept alongside; ``floored`` marks
    records where a division floor was applied.
    """

    measure_index: int
    tau: float
    sigma: float
    sigma_tilde: float
    s: float
    tau_tilde_raw: float
    tau_tilde: float
    floored: bool = False


@dataclass(frozen=True)
class ClusterReport:
    cluster_id: int
    minimal_index: int
    records: tuple
    gci: float
    degenerate: bool = False


@dataclass(frozen=True)
class CompactnessReport:
    """Per-cluster reports plus the size-weighted total index."""

    clusters: tuple
    gci_total: float


def minimal_element(members: MeasureCollection, center: GaussianMeasure) -> int:
    """Index of the member closest to the cluster center (ties: smallest)."""
    if len(members) == 0:
        raise EmptyClusterError("cluster has no members")
    distances = [w2_distance(m, center) for m in members]
    return int(np.argmin(distances))


def reverse_register(
    mu_i: GaussianMeasure,
    mu_star: GaussianMeasure,
    anchor: GaussianMeasure,
) -> RegistrationSolution:
    """Project ``anchor`` onto the segment from ``mu_i`` to ``mu_star``.

    The segment is oriented with the member at 0 and the reference element
    at 1, so a parameter near 1 means the anchor sits close to the
    reference. When member and reference coincide the segment is constant
    and the convention is ``s = 1`` with the distance from the reference to
    the anchor.
    """
    curve = make_geodesic(mu_i, mu_star)
    if curve.degenerate:
        return RegistrationSolution(tau=1.0, dist=w2_distance(mu_star, anchor))
    return register(anchor, curve)


def similarity_index(
    tau: float,
    s: float,
    sigma_tilde: float,
    tau_star: float,
    sigma_tilde_star: float,
) -> float:
    """Raw similarity index ``(s * tau / tau_star) * (sigma_tilde_star / sigma_tilde)``.

    Division floors keep the index finite when the reference projects onto
    the curve start (``tau_star`` near 0) or a member lies on the curve
    (``sigma_tilde`` near 0); when both projection distances are below the
    floor their ratio is taken as 1. Identical inputs for the member and
    the reference element give exactly 1.
    """
    value, _ = _similarity_index_flagged(tau, s, sigma_tilde, tau_star, sigma_tilde_star)
    return value


def _similarity_index_flagged(tau, s, sigma_tilde, tau_star, sigma_tilde_star):
    floored = tau_star < EPS_TAU or sigma_tilde < EPS_SIGMA or sigma_tilde_star < EPS_SIGMA
    if sigma_tilde <= EPS_SIGMA and sigma_tilde_star <= EPS_SIGMA:
        ratio = 1.0
    else:
        ratio = max(sigma_tilde_star, EPS_SIGMA) / max(sigma_tilde, EPS_SIGMA)
    value = (s * tau / max(tau_star, EPS_TAU)) * ratio
    return value, floored


def gci_per_cluster(tau_tildes) -> float:
    """Arithmetic mean of the (clamped) member indices of one cluster."""
    values = list(tau_tildes)
    if not values:
        raise EmptyClusterError("cluster has no members")
    return float(np.mean(values))


def gci_total(cluster_reports, n: int) -> float:
    """Size-weighted mean of the per-cluster indices.

    Raises
    ------
    SizeMismatchError
        If the cluster sizes do not sum to ``n``.
    """
    sizes = [len(report.records) for report in cluster_reports]
    if sum(sizes) != n:
        raise SizeMismatchError(f"cluster sizes {sizes} do not sum to n={n}")
    return float(sum(size * report.gci for size, report in zip(sizes, cluster_reports)) / n)


def evaluate_clustering(
    collection: MeasureCollection,
    assignments,
    local_barycenters,
    global_barycenter: GaussianMeasure,
) -> CompactnessReport:
    """Run the double registration for every cluster and aggregate the GCI.

    Parameters
    ----------
    collection : MeasureCollection
        All clustered measures.
    assignments : array_like of int
        Cluster id per measure, covering every cluster ``0..K-1``.
    local_barycenters : sequence of GaussianMeasure
        Cluster centers, one per cluster id.
    global_barycenter : GaussianMeasure
        Barycenter of the whole collection; the curve source shared by all
        clusters.

    Returns
    -------
    CompactnessReport
        One report per cluster plus the total index. A cluster whose
        center coincides with the global barycenter yields a degenerate
        (constant) curve; its members register at 0 by convention and the
        report carries the degeneracy flag.
    """
    assignments = np.asarray(assignments, dtype=int)
    n = len(collection)
    if assignments.shape != (n,):
        raise SizeMismatchError(
            f"expected {n} assignments, got shape {assignments.shape}"
        )
    k = len(local_barycenters)
    if k == 0 or assignments.min() < 0 or assignments.max() >= k:
        raise SizeMismatchError("assignments refer to unknown cluster ids")
    if global_barycenter.dim != collection.dim:
        raise DimMismatchError("global barycenter dimension does not match collection")

    reports = []
    for cluster_id in range(k):
        member_idx = np.flatnonzero(assignments == cluster_id)
        if member_idx.size == 0:
            raise EmptyClusterError(f"cluster {cluster_id} has no members")
        reports.append(
            _cluster_report(collection, member_idx, local_barycenters[cluster_id], global_barycenter, cluster_id)
        )

    total = gci_total(reports, n)
    return CompactnessReport(clusters=tuple(reports), gci_total=total)


def _cluster_report(collection, member_idx, center, global_barycenter, cluster_id) -> ClusterReport:
    curve = make_geodesic(global_barycenter, center)
    members = [collection[i] for i in member_idx]

    sigmas = [w2_distance(m, center) for m in members]
    solutions = [register(m, curve) for m in members]
    taus = [sol.tau for sol in solutions]
    sigma_tildes = [sol.dist for sol in solutions]

    local_star = int(np.argmin(sigmas))
    mu_star = members[local_star]
    tau_star = taus[local_star]
    sigma_tilde_star = sigma_tildes[local_star]

    records = []
    for pos, global_index in enumerate(member_idx):
        if pos == local_star:
            # The reference element is the ideal case by definition.
            records.append(
                RegistrationRecord(
                    measure_index=int(global_index),
                    tau=taus[pos],
                    sigma=sigmas[pos],
                    sigma_tilde=sigma_tildes[pos],
                    s=1.0,
                    tau_tilde_raw=1.0,
                    tau_tilde=1.0,
                )
            )
            continue
        anchor = point_at(curve, taus[pos])
        reverse = reverse_register(members[pos], mu_star, anchor)
        raw, floored = _similarity_index_flagged(
            taus[pos], reverse.tau, sigma_tildes[pos], tau_star, sigma_tilde_star
        )
        records.append(
            RegistrationRecord(
                measure_index=int(global_index),
                tau=taus[pos],
                sigma=sigmas[pos],
                sigma_tilde=sigma_tildes[pos],
                s=reverse.tau,
                tau_tilde_raw=raw,
                tau_tilde=min(raw, 1.0),
                floored=floored,
            )
        )

    gci = gci_per_cluster(rec.tau_tilde for rec in records)
    return ClusterReport(
        cluster_id=cluster_id,
        minimal_index=int(member_idx[local_star]),
        records=tuple(records),
        gci=gci,
        degenerate=curve.degenerate,
    )


def cluster_report_to_obj(report: ClusterReport, collection: MeasureCollection) -> dict:
    """JSON-ready form of one cluster report, labeling members."""
    return {
        "cluster": report.cluster_id,
        "minimal": collection.label_of(report.minimal_index),
        "gci": report.gci,
        "degenerate": report.degenerate,
        "members": [
            {
                "label": collection.label_of(rec.measure_index),
                "tau": rec.tau,
                "sigma": rec.sigma,
                "sigma_tilde": rec.sigma_tilde,
                "s": rec.s,
                "tau_tilde_raw": rec.tau_tilde_raw,
                "tau_tilde": rec.tau_tilde,
                "floored": rec.floored,
            }
            for rec in report.records
        ],
    }


def compactness_report_to_obj(report: CompactnessReport, collection: MeasureCollection) -> dict:
    return {
        "gci_total": report.gci_total,
        "clusters": [cluster_report_to_obj(c, collection) for c in report.clusters],
    }
