"""Command-line front end: ingest panels, cluster measures, scan GCI."""

import argparse
import csv
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .barycenter import check_weights, uniform_weights, wasserstein_barycenter
from .clustering import ClusteringConfig, gci_scan, kmeans
from .compactness import compactness_report_to_obj
from .errors import (
    DimMismatchError,
    IllConditionedError,
    InvalidWeightsError,
    KTooLargeError,
    NonFiniteError,
    NotSpdError,
    NumericalBreakdownError,
    OverlappingPeriodsError,
    ParseError,
    SchemaError,
    SizeMismatchError,
    TooFewRecordsError,
    WclusterError,
)
from .measures import (
    GaussianMeasure,
    MeasureCollection,
    bures_distance,
    collection_to_obj,
    load_measures,
    measure_from_obj,
    measure_to_obj,
    w2_distance,
)
from .ingest import SummaryConfig, load_panel, load_periods, split_periods, summarize

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONFIG = 3
EXIT_NUMERICAL = 4

_INPUT_ERRORS = (
    ParseError,
    SchemaError,
    OverlappingPeriodsError,
    TooFewRecordsError,
    NonFiniteError,
    DimMismatchError,
    SizeMismatchError,
    OSError,
    json.JSONDecodeError,
)
_CONFIG_ERRORS = (KTooLargeError, InvalidWeightsError)
_NUMERICAL_ERRORS = (NumericalBreakdownError, NotSpdError, IllConditionedError)


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")


def _write_manifest(out_path, command, config, inputs) -> None:
    out_path = Path(out_path)
    target = out_path / "manifest.json" if out_path.is_dir() else out_path.with_name(out_path.name + ".manifest.json")
    _write_json(
        target,
        {
            "command": command,
            "config": config,
            "inputs": {str(p): _sha256(p) for p in inputs},
            "version": __version__,
        },
    )


def _load_single_measure(path) -> GaussianMeasure:
    obj = json.loads(Path(path).read_text())
    measure, _ = measure_from_obj(obj)
    return measure


def _workers() -> int:
    raw = os.environ.get("WCLUSTER_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def cmd_ingest(args) -> int:
    table = load_panel(args.input, strict=args.strict)
    specs = load_periods(args.periods)
    buckets, dropped = split_periods(table.records, specs)
    config = SummaryConfig(cov_denominator=args.cov_denominator, jitter=args.jitter)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    skipped = []
    for spec in specs:
        measures, labels = [], []
        for entity in sorted(buckets[spec.name]):
            try:
                measures.append(summarize(buckets[spec.name][entity], config))
            except TooFewRecordsError as exc:
                skipped.append(f"{spec.name}/{entity}: {exc}")
                continue
            labels.append(entity)
        if not measures:
            skipped.append(f"{spec.name}: no entity had enough records")
            continue
        collection = MeasureCollection(tuple(measures), tuple(labels))
        _write_json(out_dir / f"{spec.name}.json", collection_to_obj(collection))
    for line in skipped:
        print(f"warning: skipped {line}", file=sys.stderr)
    if dropped:
        print(f"warning: {dropped} record(s) outside all periods", file=sys.stderr)
    _write_manifest(
        out_dir,
        "ingest",
        {
            "input": str(args.input),
            "periods": str(args.periods),
            "cov_denominator": args.cov_denominator,
            "jitter": args.jitter,
            "strict": args.strict,
            "dropped_out_of_range": dropped,
            "skipped": skipped,
        },
        [args.input, args.periods],
    )
    return EXIT_OK


def _assignment_rows(collection, result):
    rows = []
    by_index = {}
    if result.reports is not None:
        for report in result.reports.clusters:
            for rec in report.records:
                by_index[rec.measure_index] = rec
    for i in range(len(collection)):
        row = [collection.label_of(i), int(result.assignments[i])]
        rec = by_index.get(i)
        if rec is not None:
            row += [
                f"{rec.tau:.5f}",
                f"{rec.sigma:.5f}",
                f"{rec.sigma_tilde:.5f}",
                f"{rec.s:.5f}",
                f"{rec.tau_tilde:.5f}",
            ]
        rows.append(row)
    return rows


def cmd_cluster(args) -> int:
    collection = load_measures(args.measures)
    config = ClusteringConfig(
        k=args.k, init=args.init, seed=args.seed, restarts=args.restarts
    )
    result = kmeans(collection, config, compute_reports=args.reports)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    header = ["label", "cluster"]
    if args.reports:
        header += ["tau", "sigma", "sigma_tilde", "s", "tau_tilde"]
    with (out_dir / "assignments.csv").open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(_assignment_rows(collection, result))

    centers = MeasureCollection(
        result.centers, tuple(f"cluster_{k}" for k in range(len(result.centers)))
    )
    _write_json(out_dir / "centers.json", collection_to_obj(centers))
    _write_json(out_dir / "global_barycenter.json", measure_to_obj(result.global_barycenter))
    if args.reports:
        _write_json(
            out_dir / "reports.json",
            compactness_report_to_obj(result.reports, collection),
        )
    _write_manifest(
        out_dir,
        "cluster",
        {
            "measures": str(args.measures),
            "k": args.k,
            "init": args.init,
            "seed": args.seed,
            "restarts": args.restarts,
            "reports": args.reports,
            "inertia": result.inertia,
            "iterations": result.iterations,
            "converged": result.converged,
        },
        [args.measures],
    )
    return EXIT_OK


def cmd_gci_scan(args) -> int:
    collection = load_measures(args.measures)
    rows = gci_scan(
        collection,
        kmin=args.kmin,
        kmax=args.kmax,
        seed=args.seed,
        restarts=args.restarts,
        max_workers=_workers(),
    )
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    header = ["K", "gci_total"] + [f"gci_{k}" for k in range(1, args.kmax + 1)] + ["degenerate"]
    with out_path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            cells = [row.k, f"{row.gci_total:.5f}"]
            cells += [f"{g:.5f}" for g in row.gci_per_cluster]
            cells += [""] * (args.kmax - row.k)
            cells.append(int(row.degenerate))
            writer.writerow(cells)

    suggestion = None
    if args.suggest_k:
        best = max(row.gci_total for row in rows)
        suggestion = next(row.k for row in rows if row.gci_total >= best - 0.02)
        print(f"suggested_k={suggestion}")
    _write_manifest(
        out_path,
        "gci-scan",
        {
            "measures": str(args.measures),
            "kmin": args.kmin,
            "kmax": args.kmax,
            "seed": args.seed,
            "restarts": args.restarts,
            "suggested_k": suggestion,
        },
        [args.measures],
    )
    return EXIT_OK


def cmd_distance(args) -> int:
    a = _load_single_measure(args.a)
    b = _load_single_measure(args.b)
    if args.bures:
        value = bures_distance(a.cov, b.cov)
    else:
        value = w2_distance(a, b)
    print(f"{value:.5f}")
    return EXIT_OK


def cmd_barycenter(args) -> int:
    collection = load_measures(args.measures)
    if args.weights is not None:
        try:
            weights = np.array([float(w) for w in args.weights.split(",")])
        except ValueError:
            raise InvalidWeightsError(f"cannot parse weights {args.weights!r}")
        weights = check_weights(weights, len(collection))
    else:
        weights = uniform_weights(len(collection))
    result = wasserstein_barycenter(collection, weights)
    _write_json(args.out, measure_to_obj(result.barycenter))
    _write_manifest(
        Path(args.out),
        "barycenter",
        {
            "measures": str(args.measures),
            "weights": None if args.weights is None else weights.tolist(),
            "iterations": result.iterations,
            "residual": result.residual,
            "converged": result.converged,
        },
        [args.measures],
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wcluster",
        description="Cluster Gaussian measures with Wasserstein K-means and score the result with the geodesic compactness index.",
    )
    parser.add_argument("--version", action="version", version=f"wcluster {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="summarize panel CSV into per-period measures JSON")
    p.add_argument("--input", required=True)
    p.add_argument("--periods", required=True)
    p.add_argument("--out", required=True, help="output directory, one JSON per period")
    p.add_argument("--cov-denominator", choices=["n-1", "n"], default="n-1")
    p.add_argument("--jitter", type=float, default=1e-8)
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("cluster", help="run K-means on a measures file")
    p.add_argument("--measures", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--init", choices=["random", "farthest"], default="random")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--reports", action="store_true", help="also write GCI reports")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("gci-scan", help="cluster for each K in a range and tabulate GCI")
    p.add_argument("--measures", required=True)
    p.add_argument("--kmin", type=int, required=True)
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--suggest-k", action="store_true",
                   help="print the smallest K within 0.02 of the scan maximum (heuristic)")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_gci_scan)

    p = sub.add_parser("distance", help="W2 distance between two measure files")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--bures", action="store_true", help="zero-location mode (dispersions only)")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("barycenter", help="barycenter of a measures file")
    p.add_argument("--measures", required=True)
    p.add_argument("--weights", default=None, help="comma-separated simplex weights")
    p.add_argument("--out", required=True, help="output JSON path")
    p.set_defaults(func=cmd_barycenter)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except _NUMERICAL_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except WclusterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
