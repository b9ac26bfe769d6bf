"""Panel data to measures: one Gaussian summary per entity and period.

Input is a long-format CSV with header ``entity,date,v1,...,vd``. Rows are
bucketed into named date periods, and each entity's rows within a period
are condensed into a measure: componentwise mean as the location, sample
covariance (repaired to SPD if needed) as the dispersion.
"""

import csv
import warnings
from dataclasses import dataclass
from datetime import date
from pathlib import Path

import numpy as np

from .errors import (
    OverlappingPeriodsError,
    ParseError,
    SchemaError,
    TooFewRecordsError,
)
from .measures import GaussianMeasure
from .spd import ensure_spd

DENOM_N_MINUS_1 = "n-1"
DENOM_N = "n"


@dataclass(frozen=True, eq=False)
class PanelRecord:
    entity: str
    date: date
    values: np.ndarray


@dataclass(frozen=True, eq=False)
class PanelTable:
    """Parsed panel rows, date-sorted, plus the count of dropped rows."""

    records: tuple
    n_dropped: int

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    @property
    def dim(self):
        return self.records[0].values.shape[0] if self.records else None


@dataclass(frozen=True)
class PeriodSpec:
    """Closed date interval with a name; ``start <= end``."""

    name: str
    start: date
    end: date

    def __post_init__(self):
        if self.start > self.end:
            raise SchemaError(f"period {self.name!r}: start {self.start} after end {self.end}")

    def contains(self, d: date) -> bool:
        return self.start <= d <= self.end


@dataclass(frozen=True)
class SummaryConfig:
    """Covariance estimation choices.

    ``jitter`` is relative to the mean diagonal of the raw covariance (with
    a floor of 1 for all-zero covariances); ``min_records`` defaults to
    d + 1 so the raw covariance generically has full rank.
    """

    cov_denominator: str = DENOM_N_MINUS_1
    jitter: float = 1e-8
    min_records: int = None

    def __post_init__(self):
        if self.cov_denominator not in (DENOM_N_MINUS_1, DENOM_N):
            raise ValueError(f"unknown covariance denominator {self.cov_denominator!r}")
        if self.jitter <= 0.0:
            raise ValueError(f"jitter must be positive, got {self.jitter}")


def load_panel(path, format: str = "csv", strict: bool = False) -> PanelTable:
    """Parse a panel file into date-sorted records.

    Rows with missing or malformed fields are dropped and counted (a
    warning summarizes the count), unless ``strict`` is set, in which case
    the first bad row raises :class:`ParseError` naming its line.

    Raises
    ------
    SchemaError
        If the header does not start with ``entity,date`` followed by at
        least one value column.
    ParseError
        In strict mode, on the first malformed row.
    """
    if format != "csv":
        raise SchemaError(f"unsupported panel format {format!r}")
    path = Path(path)
    records = []
    dropped = 0
    dim = None
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected a header row")
        if len(header) < 3 or header[0] != "entity" or header[1] != "date":
            raise SchemaError(
                f"{path}: header must be entity,date,v1,...,vd, got {','.join(header)}"
            )
        dim = len(header) - 2
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            problem = None
            if len(row) != len(header):
                problem = f"expected {len(header)} fields, got {len(row)}"
            else:
                entity = row[0].strip()
                if not entity:
                    problem = "empty entity"
            if problem is None:
                try:
                    when = date.fromisoformat(row[1].strip())
                except ValueError:
                    problem = f"bad date {row[1]!r}"
            if problem is None:
                try:
                    values = np.array([float(v) for v in row[2:]], dtype=float)
                except ValueError:
                    problem = "non-numeric value field"
                else:
                    if not np.all(np.isfinite(values)):
                        problem = "non-finite value field"
            if problem is not None:
                if strict:
                    raise ParseError(f"{path}:{lineno}: {problem}")
                dropped += 1
                continue
            records.append(PanelRecord(entity=entity, date=when, values=values))
    if dropped:
        warnings.warn(f"{path}: dropped {dropped} malformed row(s)", stacklevel=2)
    records.sort(key=lambda r: r.date)
    return PanelTable(records=tuple(records), n_dropped=dropped)


def check_periods(specs) -> list:
    """Validate a period set: unique names, interiors must not overlap.

    Adjacent periods may share a boundary date; such a date belongs to the
    earlier-starting period. Returns the specs sorted by start date.
    """
    specs = sorted(specs, key=lambda s: (s.start, s.end))
    names = [s.name for s in specs]
    if len(set(names)) != len(names):
        raise SchemaError("period names must be unique")
    for earlier, later in zip(specs, specs[1:]):
        if later.start < earlier.end:
            raise OverlappingPeriodsError(
                f"periods {earlier.name!r} and {later.name!r} overlap"
            )
    return specs


def load_periods(path) -> list:
    """Read a ``name,start,end`` CSV of period specs and validate it."""
    path = Path(path)
    specs = []
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["name", "start", "end"]:
            raise SchemaError(f"{path}: header must be name,start,end")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ParseError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            try:
                specs.append(
                    PeriodSpec(
                        name=row[0].strip(),
                        start=date.fromisoformat(row[1].strip()),
                        end=date.fromisoformat(row[2].strip()),
                    )
                )
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}")
    if not specs:
        raise SchemaError(f"{path}: no periods defined")
    return check_periods(specs)


def split_periods(records, specs):
    """Bucket records as period name -> entity -> record list.

    Records outside every period are dropped and counted. Returns the
    mapping and the dropped count.
    """
    specs = check_periods(specs)
    buckets = {spec.name: {} for spec in specs}
    dropped = 0
    for record in records:
        for spec in specs:
            if spec.contains(record.date):
                buckets[spec.name].setdefault(record.entity, []).append(record)
                break
        else:
            dropped += 1
    return buckets, dropped


def summarize(records, config: SummaryConfig = None) -> GaussianMeasure:
    """Condense one entity's rows into a Gaussian measure.

    Location is the componentwise mean; dispersion is the sample covariance
    with the configured denominator, passed through the SPD repair so that
    degenerate samples (constant rows, collinear columns) still yield a
    valid measure.

    Raises
    ------
    TooFewRecordsError
        If fewer than ``min_records`` rows are available (default d + 1).
    """
    if config is None:
        config = SummaryConfig()
    records = list(records)
    if not records:
        raise TooFewRecordsError("no records to summarize")
    data = np.stack([r.values for r in records])
    n, d = data.shape
    min_records = config.min_records if config.min_records is not None else d + 1
    if n < min_records:
        raise TooFewRecordsError(f"{n} records, need at least {min_records}")
    mean = data.mean(axis=0)
    centered = data - mean
    denom = n - 1 if config.cov_denominator == DENOM_N_MINUS_1 else n
    raw_cov = centered.T @ centered / denom
    diag_scale = float(np.mean(np.diag(raw_cov)))
    jitter = config.jitter * (diag_scale if diag_scale > 0.0 else 1.0)
    return GaussianMeasure(mean, ensure_spd(raw_cov, jitter))
