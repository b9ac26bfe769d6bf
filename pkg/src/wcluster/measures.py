"""Gaussian (Location-Scatter) measures and their closed-form W2 distance.

A measure is a pair of a location vector and an SPD dispersion matrix. The
squared quadratic Wasserstein distance between two such measures is

    ||m1 - m2||^2 + Tr(S1 + S2 - 2 (S1^(1/2) S2 S1^(1/2))^(1/2))

which this module evaluates spectrally. The zero-location restriction of the
same distance is the Bures-Wasserstein metric on SPD matrices.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DimMismatchError,
    NonFiniteError,
    NotSpdError,
    NumericalBreakdownError,
    SchemaError,
)
from .spd import SYM_TOL, ensure_spd, sqrt_spd, sym_part

# Negative trace mass below this relative size is treated as rounding noise
# and clamped to zero; anything larger is a genuine numerical breakdown.
W2_CLAMP_REL = 1e-8


@dataclass(frozen=True, eq=False)
class GaussianMeasure:
    """Location vector plus SPD dispersion matrix.

    Construction validates shapes, finiteness and symmetry (cheap checks);
    positive definiteness is enforced by the spectral operations that
    consume the dispersion, and by :func:`wcluster.spd.check_spd` at
    ingestion boundaries.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        if mean.ndim != 1:
            raise DimMismatchError(f"mean must be a vector, got shape {mean.shape}")
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
            raise DimMismatchError(f"cov must be square, got shape {cov.shape}")
        if cov.shape[0] != mean.shape[0]:
            raise DimMismatchError(
                f"mean has length {mean.shape[0]} but cov is {cov.shape[0]}x{cov.shape[0]}"
            )
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise NonFiniteError("measure has non-finite entries")
        scale = max(1.0, float(np.linalg.norm(cov)))
        if float(np.max(np.abs(cov - cov.T))) > SYM_TOL * scale:
            raise NotSpdError("dispersion matrix is not symmetric within tolerance")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", sym_part(cov))

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


def measures_close(a: GaussianMeasure, b: GaussianMeasure, rtol: float = 1e-12) -> bool:
    """Componentwise relative equality of two measures."""
    if a.dim != b.dim:
        return False
    return np.allclose(a.mean, b.mean, rtol=rtol, atol=rtol) and np.allclose(
        a.cov, b.cov, rtol=rtol, atol=rtol
    )


@dataclass(frozen=True, eq=False)
class MeasureCollection:
    """Ordered, uniformly-dimensioned list of measures with optional labels."""

    measures: tuple
    labels: tuple = None

    def __post_init__(self):
        measures = tuple(self.measures)
        if not measures:
            raise DimMismatchError("collection must contain at least one measure")
        dim = measures[0].dim
        for i, m in enumerate(measures):
            if not isinstance(m, GaussianMeasure):
                raise TypeError(f"element {i} is not a GaussianMeasure")
            if m.dim != dim:
                raise DimMismatchError(
                    f"measure {i} has dim {m.dim}, expected {dim}"
                )
        labels = self.labels
        if labels is not None:
            labels = tuple(str(lab) for lab in labels)
            if len(labels) != len(measures):
                raise DimMismatchError(
                    f"{len(labels)} labels for {len(measures)} measures"
                )
            if len(set(labels)) != len(labels):
                raise SchemaError("labels must be unique")
        object.__setattr__(self, "measures", measures)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.measures)

    def __iter__(self):
        return iter(self.measures)

    def __getitem__(self, index) -> GaussianMeasure:
        return self.measures[index]

    @property
    def dim(self) -> int:
        return self.measures[0].dim

    def label_of(self, index: int) -> str:
        return self.labels[index] if self.labels is not None else str(index)

    def subset(self, indices) -> "MeasureCollection":
        indices = list(indices)
        labels = None
        if self.labels is not None:
            labels = tuple(self.labels[i] for i in indices)
        return MeasureCollection(tuple(self.measures[i] for i in indices), labels)

    @classmethod
    def from_arrays(cls, means, covs, labels=None) -> "MeasureCollection":
        means = np.asarray(means, dtype=float)
        covs = np.asarray(covs, dtype=float)
        if means.ndim != 2 or covs.ndim != 3 or means.shape[0] != covs.shape[0]:
            raise DimMismatchError(
                f"expected (n, d) means and (n, d, d) covs, got {means.shape} and {covs.shape}"
            )
        measures = tuple(GaussianMeasure(m, c) for m, c in zip(means, covs))
        return cls(measures, tuple(labels) if labels is not None else None)


def as_measure_collection(data) -> MeasureCollection:
    """Coerce supported inputs into a :class:`MeasureCollection`.

    Accepts an existing collection, a sequence of measures, a
    ``(means, covs)`` pair of arrays, or a single ``(n, d, d)`` array of SPD
    matrices which are wrapped as zero-location measures (the matrix-data
    mode, where the distance reduces to the Bures-Wasserstein metric).
    """
    if isinstance(data, MeasureCollection):
        return data
    if isinstance(data, GaussianMeasure):
        return MeasureCollection((data,))
    if isinstance(data, tuple) and len(data) == 2 and not isinstance(data[0], GaussianMeasure):
        return MeasureCollection.from_arrays(data[0], data[1])
    if isinstance(data, np.ndarray):
        if data.ndim != 3:
            raise DimMismatchError(
                "array input must be (n, d, d) SPD matrices; for located measures "
                f"pass a (means, covs) pair (got shape {data.shape})"
            )
        zeros = np.zeros(data.shape[1])
        return MeasureCollection(tuple(GaussianMeasure(zeros, c) for c in data))
    try:
        measures = tuple(data)
    except TypeError:
        raise TypeError(f"cannot interpret {type(data).__name__} as a measure collection")
    return MeasureCollection(measures)


def _clamped_trace_term(trace_a: float, trace_b: float, trace_cross: float) -> float:
    term = trace_a + trace_b - 2.0 * trace_cross
    if term < 0.0:
        budget = W2_CLAMP_REL * (trace_a + trace_b)
        if -term > budget:
            raise NumericalBreakdownError(
                f"trace term {term:.3e} is negative beyond the rounding "
                f"budget {budget:.3e}"
            )
        term = 0.0
    return term


def _w2_squared_parts(mean_a, trace_a, root_a, mean_b, cov_b) -> float:
    """Squared distance given a precomputed square root of the first dispersion."""
    diff = mean_a - mean_b
    cross = sqrt_spd(sym_part(root_a @ cov_b @ root_a))
    term = _clamped_trace_term(trace_a, float(np.trace(cov_b)), float(np.trace(cross)))
    return float(diff @ diff) + term


def w2_squared(a: GaussianMeasure, b: GaussianMeasure) -> float:
    """Squared quadratic Wasserstein distance between two measures.

    Parameters
    ----------
    a, b : GaussianMeasure
        Measures of equal dimension.

    Returns
    -------
    float
        ``||m_a - m_b||^2`` plus the dispersion trace term. A slightly
        negative trace term (rounding noise) is clamped to zero.

    Raises
    ------
    DimMismatchError
        If the dimensions differ.
    NumericalBreakdownError
        If the trace term is negative beyond the rounding budget.
    """
    if a.dim != b.dim:
        raise DimMismatchError(f"dimension mismatch: {a.dim} vs {b.dim}")
    root_a = sqrt_spd(a.cov)
    return _w2_squared_parts(a.mean, float(np.trace(a.cov)), root_a, b.mean, b.cov)


def w2_distance(a: GaussianMeasure, b: GaussianMeasure) -> float:
    """Quadratic Wasserstein distance, the square root of :func:`w2_squared`."""
    return float(np.sqrt(w2_squared(a, b)))


def bures_distance(cov_a, cov_b) -> float:
    """Bures-Wasserstein distance between two SPD matrices.

    Equals the W2 distance between the zero-location measures carrying the
    two matrices as dispersions.
    """
    A = np.asarray(cov_a, dtype=float)
    B = np.asarray(cov_b, dtype=float)
    zeros = np.zeros(A.shape[0])
    return w2_distance(GaussianMeasure(zeros, A), GaussianMeasure(zeros, B))


# ---------------------------------------------------------------------------
# JSON serialization
#
# One measure is {"label": str?, "mean": [d floats], "cov": [[d x d floats]]};
# a collection is a JSON array of those objects. Covariances are passed
# through ensure_spd on load so that file rounding cannot produce an
# indefinite dispersion.
# ---------------------------------------------------------------------------


def measure_to_obj(measure: GaussianMeasure, label: str = None) -> dict:
    obj = {}
    if label is not None:
        obj["label"] = label
    obj["mean"] = measure.mean.tolist()
    obj["cov"] = measure.cov.tolist()
    return obj


def measure_from_obj(obj: dict, jitter: float = 1e-8):
    """Parse one measure object; returns ``(measure, label_or_None)``."""
    if not isinstance(obj, dict) or "mean" not in obj or "cov" not in obj:
        raise SchemaError("measure object must contain 'mean' and 'cov'")
    mean = np.asarray(obj["mean"], dtype=float)
    cov = ensure_spd(np.asarray(obj["cov"], dtype=float), jitter)
    return GaussianMeasure(mean, cov), obj.get("label")


def collection_to_obj(collection: MeasureCollection) -> list:
    return [
        measure_to_obj(m, collection.labels[i] if collection.labels is not None else None)
        for i, m in enumerate(collection)
    ]


def collection_from_obj(obj) -> MeasureCollection:
    if not isinstance(obj, list) or not obj:
        raise SchemaError("measures file must be a non-empty JSON array")
    measures, labels = [], []
    for entry in obj:
        measure, label = measure_from_obj(entry)
        measures.append(measure)
        labels.append(label)
    if any(lab is None for lab in labels):
        labels = None
    return MeasureCollection(tuple(measures), tuple(labels) if labels else None)


def save_measures(collection: MeasureCollection, path) -> None:
    Path(path).write_text(json.dumps(collection_to_obj(collection), indent=2) + "\n")


def load_measures(path) -> MeasureCollection:
    return collection_from_obj(json.loads(Path(path).read_text()))
