"""Wasserstein K-means clustering of Gaussian measures with GCI scoring.

Observations are Location-Scatter (Gaussian) probability measures, or SPD
matrices clustered in zero-location mode under the Bures-Wasserstein
metric. Cluster centers are Wasserstein barycenters, and the quality of a
partition is scored by the geodesic compactness index (GCI), which guides
the choice of the number of clusters.
"""

__version__ = "0.1.0"

from .barycenter import (
    BarycenterConfig,
    BarycenterResult,
    barycenter_location,
    check_weights,
    fixed_point_step,
    uniform_weights,
    wasserstein_barycenter,
)
from .clustering import (
    ClusteringConfig,
    ClusteringResult,
    ScanRow,
    assign_step,
    gci_scan,
    global_barycenter,
    init_centers,
    kmeans,
    update_step,
)
from .compactness import (
    ClusterReport,
    CompactnessReport,
    RegistrationRecord,
    evaluate_clustering,
    gci_per_cluster,
    gci_total,
    minimal_element,
    reverse_register,
    similarity_index,
)
from .errors import (
    DimMismatchError,
    EmptyClusterError,
    IllConditionedError,
    InvalidWeightsError,
    KTooLargeError,
    NonFiniteError,
    NotSpdError,
    NumericalBreakdownError,
    OutOfRangeError,
    OverlappingPeriodsError,
    ParseError,
    SchemaError,
    SizeMismatchError,
    TooFewRecordsError,
    WclusterError,
)
from .estimator import WassersteinKMeans
from .geodesic import (
    GeodesicSegment,
    RegistrationSolution,
    make_geodesic,
    point_at,
    register,
    transport_map,
)
from .ingest import (
    PanelRecord,
    PeriodSpec,
    SummaryConfig,
    load_panel,
    load_periods,
    split_periods,
    summarize,
)
from .measures import (
    GaussianMeasure,
    MeasureCollection,
    as_measure_collection,
    bures_distance,
    load_measures,
    measures_close,
    save_measures,
    w2_distance,
    w2_squared,
)
from .spd import check_spd, ensure_spd, inv_sqrt_spd, sqrt_spd

__all__ = [
    "__version__",
    "BarycenterConfig",
    "BarycenterResult",
    "ClusterReport",
    "ClusteringConfig",
    "ClusteringResult",
    "CompactnessReport",
    "DimMismatchError",
    "EmptyClusterError",
    "GaussianMeasure",
    "GeodesicSegment",
    "IllConditionedError",
    "InvalidWeightsError",
    "KTooLargeError",
    "MeasureCollection",
    "NonFiniteError",
    "NotSpdError",
    "NumericalBreakdownError",
    "OutOfRangeError",
    "OverlappingPeriodsError",
    "PanelRecord",
    "ParseError",
    "PeriodSpec",
    "RegistrationRecord",
    "RegistrationSolution",
    "ScanRow",
    "SchemaError",
    "SizeMismatchError",
    "SummaryConfig",
    "TooFewRecordsError",
    "WassersteinKMeans",
    "WclusterError",
    "as_measure_collection",
    "assign_step",
    "barycenter_location",
    "bures_distance",
    "check_spd",
    "check_weights",
    "ensure_spd",
    "evaluate_clustering",
    "fixed_point_step",
    "gci_per_cluster",
    "gci_scan",
    "gci_total",
    "global_barycenter",
    "init_centers",
    "inv_sqrt_spd",
    "kmeans",
    "load_measures",
    "load_panel",
    "load_periods",
    "make_geodesic",
    "measures_close",
    "minimal_element",
    "point_at",
    "register",
    "reverse_register",
    "save_measures",
    "similarity_index",
    "split_periods",
    "sqrt_spd",
    "summarize",
    "transport_map",
    "uniform_weights",
    "update_step",
    "w2_distance",
    "w2_squared",
    "wasserstein_barycenter",
]
