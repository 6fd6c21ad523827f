"""Daily feature rows and their encoded design matrix."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import Iterable, Sequence, TextIO

import numpy as np

from .ingest import DailyRecord

WEEKDAY_COLUMNS = tuple(f"weekday_{k}" for k in range(1, 8))
WEEK_OF_MONTH_COLUMNS = tuple(f"week_of_month_{k}" for k in range(1, 5))
NUMERIC_COLUMNS = (
    "temp_max",
    "temp_mean",
    "temp_min",
    "temp_amplitude",
    "temp_max_y",
    "temp_mean_y",
    "temp_min_y",
    "temp_amplitude_y",
)
ENCODED_COLUMNS = WEEKDAY_COLUMNS + WEEK_OF_MONTH_COLUMNS + ("workday",) + NUMERIC_COLUMNS

FEATURE_CSV_HEADER = (
    "date",
    "weekday",
    "week_of_month",
    "workday",
    *NUMERIC_COLUMNS,
    "target_kwh",
)


class InsufficientDataError(ValueError):
    pass


@dataclass(frozen=True)
class ColumnLayout:
    """Describes how a model should treat each design-matrix column.

    ``numeric`` columns are standardized by the scaled learners,
    ``blocks`` are one-hot groups (one level is dropped for linear
    regression), ``binary`` columns pass through untouched and
    ``redundant`` columns are exact linear combinations of others, which
    linear regression leaves out.
    """

    n_columns: int
    numeric: tuple[int, ...]
    blocks: tuple[tuple[int, ...], ...] = ()
    binary: tuple[int, ...] = ()
    redundant: tuple[int, ...] = ()

    @classmethod
    def all_numeric(cls, n_columns: int) -> "ColumnLayout":
        return cls(n_columns, tuple(range(n_columns)))


def _default_layout() -> ColumnLayout:
    pos = {name: i for i, name in enumerate(ENCODED_COLUMNS)}
    return ColumnLayout(
        n_columns=len(ENCODED_COLUMNS),
        numeric=tuple(pos[c] for c in NUMERIC_COLUMNS),
        blocks=(
            tuple(pos[c] for c in WEEKDAY_COLUMNS),
            tuple(pos[c] for c in WEEK_OF_MONTH_COLUMNS),
        ),
        binary=(pos["workday"],),
        # workday is a function of the weekday block; amplitudes are max - min
        redundant=(pos["workday"], pos["temp_amplitude"], pos["temp_amplitude_y"]),
    )


FEATURE_LAYOUT = _default_layout()


@dataclass(frozen=True)
class FeatureRow:
    date: date
    weekday: int
    week_of_month: int
    workday: int
    temp_max: float
    temp_mean: float
    temp_min: float
    temp_amplitude: float
    temp_max_y: float
    temp_mean_y: float
    temp_min_y: float
    temp_amplitude_y: float
    target_kwh: float

    def numeric_values(self) -> tuple[float, ...]:
        return tuple(getattr(self, c) for c in NUMERIC_COLUMNS)


@dataclass(frozen=True)
class Dataset:
    store_id: str
    rows: tuple[FeatureRow, ...]
    feature_names: tuple[str, ...] = ENCODED_COLUMNS
    layout: ColumnLayout = field(default=FEATURE_LAYOUT, repr=False)

    def __post_init__(self):
        for a, b in zip(self.rows, self.rows[1:]):
            if b.date <= a.date:
                raise ValueError(f"dates must be strictly increasing ({a.date} then {b.date})")

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def dates(self) -> list[date]:
        return [r.date for r in self.rows]

    @property
    def first_date(self) -> date:
        return self.rows[0].date

    @property
    def last_date(self) -> date:
        return self.rows[-1].date

    @property
    def span_days(self) -> int:
        return (self.last_date - self.first_date).days + 1 if self.rows else 0

    def between(self, start: date, end: date) -> "Dataset":
        """Rows with ``start <= date <= end``."""
        return Dataset(
            self.store_id,
            tuple(r for r in self.rows if start <= r.date <= end),
            self.feature_names,
            self.layout,
        )


def week_of_month(d: date) -> int:
    return min(4, math.ceil(d.day / 7))


def engineer_features(days: Iterable[DailyRecord], store_id: str = "store") -> Dataset:
    """One feature row per complete day whose previous calendar day is complete."""
    complete = {d.date: d for d in days if d.complete}
    rows = []
    for day in sorted(complete):
        prev = complete.get(day - timedelta(days=1))
        if prev is None:
            continue
        today = complete[day]
        rows.append(
            FeatureRow(
                date=day,
                weekday=day.isoweekday(),
                week_of_month=week_of_month(day),
                workday=1 if day.isoweekday() <= 5 else 0,
                temp_max=today.temp_max,
                temp_mean=today.temp_mean,
                temp_min=today.temp_min,
                temp_amplitude=abs(today.temp_max - today.temp_min),
                temp_max_y=prev.temp_max,
                temp_mean_y=prev.temp_mean,
                temp_min_y=prev.temp_min,
                temp_amplitude_y=abs(prev.temp_max - prev.temp_min),
                target_kwh=today.energy_kwh,
            )
        )
    if not rows:
        raise InsufficientDataError("insufficient data for lag features")
    return Dataset(store_id, tuple(rows))


def encode_rows(rows: Sequence[FeatureRow]) -> tuple[np.ndarray, np.ndarray]:
    n = len(rows)
    X = np.zeros((n, len(ENCODED_COLUMNS)))
    y = np.empty(n)
    for i, r in enumerate(rows):
        X[i, r.weekday - 1] = 1.0
        X[i, 7 + r.week_of_month - 1] = 1.0
        X[i, 11] = r.workday
        X[i, 12:] = r.numeric_values()
        y[i] = r.target_kwh
    return X, y


def encode(data: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """Design matrix (n x 20) and target vector in ``data.feature_names`` order."""
    if not data.rows:
        raise ValueError("cannot encode an empty dataset")
    return encode_rows(data.rows)


def decode_categoricals(x: np.ndarray) -> tuple[int, int]:
    """Recover (weekday, week_of_month) from one encoded row."""
    weekday = int(np.flatnonzero(x[:7])[0]) + 1
    wom = int(np.flatnonzero(x[7:11])[0]) + 1
    return weekday, wom


def write_features_csv(data: Dataset, out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(FEATURE_CSV_HEADER)
    for r in data.rows:
        writer.writerow(
            [r.date.isoformat(), r.weekday, r.week_of_month, r.workday]
            + [repr(float(v)) for v in r.numeric_values()]
            + [repr(float(r.target_kwh))]
        )
