"""Parsing and resampling of interval meter readings.

Raw readings arrive at a nominal 15-minute cadence (sometimes irregular).
They are bucketed into hourly records and then into daily records whose
``complete`` flag decides whether a day can be used for modelling.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass
from datetime import date, datetime, timedelta
from typing import Iterable, TextIO

import numpy as np

TEMP_PLAUSIBLE_MIN = -40.0
TEMP_PLAUSIBLE_MAX = 60.0
READINGS_PER_HOUR = 4
MAX_INTERPOLATED_GAP_HOURS = 3
DEFAULT_MIN_COVERAGE = 0.8

RAW_HEADER = ("timestamp", "energy_kwh", "temp_c")
DAILY_HEADER = ("date", "energy_kwh", "temp_max", "temp_mean", "temp_min", "complete")


class IngestError(ValueError):
    """Raised for malformed or inconsistent meter input."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


class DuplicateTimestampWarning(UserWarning):
    pass


class ImplausibleTemperatureWarning(UserWarning):
    pass


@dataclass(frozen=True)
class RawReading:
    timestamp: datetime
    energy_kwh: float
    temp_c: float

    @property
    def temp_plausible(self) -> bool:
        return TEMP_PLAUSIBLE_MIN <= self.temp_c <= TEMP_PLAUSIBLE_MAX


@dataclass(frozen=True)
class HourlyRecord:
    """One hour of aggregated readings.

    ``temp_c`` is NaN when the hour has no usable temperature, i.e. it sits
    inside a temperature gap too long to interpolate.
    """

    hour_start: datetime
    energy_kwh: float
    temp_c: float
    coverage: float
    temp_interpolated: bool = False

    @property
    def temp_covered(self) -> bool:
        return not math.isnan(self.temp_c)


@dataclass(frozen=True)
class DailyRecord:
    date: date
    energy_kwh: float
    temp_max: float
    temp_mean: float
    temp_min: float
    complete: bool


def _parse_timestamp(text: str) -> datetime:
    ts = datetime.fromisoformat(text.strip())
    if ts.tzinfo is not None:
        raise ValueError("timestamps must be naive local time")
    return ts


def parse_readings(source: TextIO | str) -> list[RawReading]:
    """Parse a ``timestamp,energy_kwh,temp_c`` CSV into ordered readings.

    Duplicate timestamps keep the last occurrence; their count is reported
    through a :class:`DuplicateTimestampWarning`. Temperatures outside the
    sensor plausibility band are kept but flagged with an
    :class:`ImplausibleTemperatureWarning`; downstream resampling ignores
    them for temperature statistics.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise IngestError("missing header row", line=1) from None
    header = [h.strip() for h in header]
    missing = [c for c in RAW_HEADER if c not in header]
    if missing:
        raise IngestError(f"header is missing column(s) {', '.join(missing)}", line=1)
    idx = [header.index(c) for c in RAW_HEADER]

    readings: list[RawReading] = []
    n_duplicates = 0
    n_implausible = 0
    for row in reader:
        line = reader.line_num
        if not row or all(not field.strip() for field in row):
            continue
        if len(row) != len(header):
            raise IngestError(
                f"expected {len(header)} fields, got {len(row)} at line {line}", line=line
            )
        try:
            ts = _parse_timestamp(row[idx[0]])
            energy = float(row[idx[1]])
            temp = float(row[idx[2]])
        except ValueError as exc:
            raise IngestError(f"malformed value at line {line}: {exc}", line=line) from None
        if not (math.isfinite(energy) and math.isfinite(temp)):
            raise IngestError(f"non-finite value at line {line}", line=line)
        if energy < 0:
            raise IngestError(f"negative consumption at line {line}", line=line)
        reading = RawReading(ts, energy, temp)
        if readings and readings[-1].timestamp == ts:
            readings[-1] = reading
            n_duplicates += 1
        else:
            if readings and ts < readings[-1].timestamp:
                raise IngestError(
                    f"non-monotone timestamp {ts.isoformat(timespec='minutes')} at line {line}",
                    line=line,
                )
            readings.append(reading)

    n_implausible = sum(not r.temp_plausible for r in readings)
    if n_duplicates:
        warnings.warn(
            f"{n_duplicates} duplicate timestamp(s) collapsed (last kept)",
            DuplicateTimestampWarning,
            stacklevel=2,
        )
    if n_implausible:
        warnings.warn(
            f"{n_implausible} reading(s) with temperature outside "
            f"[{TEMP_PLAUSIBLE_MIN:g}, {TEMP_PLAUSIBLE_MAX:g}] C ignored for temperature",
            ImplausibleTemperatureWarning,
            stacklevel=2,
        )
    return readings


def _interpolate_gaps(temps: np.ndarray, max_gap: int) -> tuple[np.ndarray, np.ndarray]:
    # Fill interior NaN runs of length <= max_gap linearly; longer or open-ended runs stay NaN.
    out = temps.copy()
    filled = np.zeros(len(temps), dtype=bool)
    missing = np.isnan(temps)
    i = 0
    n = len(temps)
    while i < n:
        if not missing[i]:
            i += 1
            continue
        j = i
        while j < n and missing[j]:
            j += 1
        if i > 0 and j < n and (j - i) <= max_gap:
            left, right = temps[i - 1], temps[j]
            steps = np.arange(1, j - i + 1) / (j - i + 1)
            out[i:j] = left + (right - left) * steps
            filled[i:j] = True
        i = j
    return out, filled


def resample_hourly(readings: Iterable[RawReading]) -> list[HourlyRecord]:
    """Bucket readings into one record per hour between the first and last reading.

    Energy is summed and temperature averaged over the readings whose
    timestamp falls inside ``[hour, hour + 1)``. Coverage is the reading
    count over the nominal four per hour, capped at 1.
    """
    readings = list(readings)
    if not readings:
        return []
    first = readings[0].timestamp.replace(minute=0, second=0, microsecond=0)
    last = readings[-1].timestamp.replace(minute=0, second=0, microsecond=0)
    n_hours = int((last - first) / timedelta(hours=1)) + 1

    energy: list[list[float]] = [[] for _ in range(n_hours)]
    temps: list[list[float]] = [[] for _ in range(n_hours)]
    counts = np.zeros(n_hours, dtype=int)
    for r in readings:
        k = int((r.timestamp - first) // timedelta(hours=1))
        energy[k].append(r.energy_kwh)
        counts[k] += 1
        if r.temp_plausible:
            temps[k].append(r.temp_c)

    hourly_temp = np.array([math.fsum(t) / len(t) if t else np.nan for t in temps])
    hourly_temp, interpolated = _interpolate_gaps(hourly_temp, MAX_INTERPOLATED_GAP_HOURS)

    return [
        HourlyRecord(
            hour_start=first + timedelta(hours=k),
            energy_kwh=math.fsum(energy[k]),
            temp_c=float(hourly_temp[k]),
            coverage=min(1.0, counts[k] / READINGS_PER_HOUR),
            temp_interpolated=bool(interpolated[k]),
        )
        for k in range(n_hours)
    ]


def resample_daily(
    hours: Iterable[HourlyRecord], min_coverage: float = DEFAULT_MIN_COVERAGE
) -> list[DailyRecord]:
    """Aggregate hourly records into calendar days.

    A day is complete when its mean hourly coverage (absent hours count as
    zero) reaches ``min_coverage``, each 6-hour quadrant holds at least one
    covered hour, and no hour lies inside an uninterpolated temperature gap.
    Temperature statistics use hours carrying a temperature, measured or
    interpolated.
    """
    if not 0.0 < min_coverage <= 1.0:
        raise ValueError("min_coverage must lie in (0, 1]")
    by_day: dict[date, list[HourlyRecord]] = {}
    for h in hours:
        by_day.setdefault(h.hour_start.date(), []).append(h)

    days = []
    for day, recs in by_day.items():
        energy = math.fsum(h.energy_kwh for h in recs)
        temps = [h.temp_c for h in recs if h.temp_covered]
        if temps:
            t_max, t_min = max(temps), min(temps)
            t_mean = min(max(math.fsum(temps) / len(temps), t_min), t_max)
        else:
            t_max = t_mean = t_min = math.nan
        mean_cov = math.fsum(h.coverage for h in recs) / 24.0
        quadrants = {h.hour_start.hour // 6 for h in recs if h.coverage > 0}
        temp_gap = len(temps) < len(recs)
        complete = mean_cov >= min_coverage and len(quadrants) == 4 and not temp_gap
        days.append(DailyRecord(day, energy, t_max, t_mean, t_min, complete))
    days.sort(key=lambda d: d.date)
    return days


def _fmt(x: float) -> str:
    return "" if math.isnan(x) else repr(float(x))


def write_daily_csv(days: Iterable[DailyRecord], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(DAILY_HEADER)
    for d in days:
        writer.writerow(
            [
                d.date.isoformat(),
                _fmt(d.energy_kwh),
                _fmt(d.temp_max),
                _fmt(d.temp_mean),
                _fmt(d.temp_min),
                "true" if d.complete else "false",
            ]
        )


def read_daily_csv(source: TextIO | str) -> list[DailyRecord]:
    """Read the daily CSV produced by :func:`write_daily_csv`."""
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.DictReader(source)
    if reader.fieldnames is None or any(c not in reader.fieldnames for c in DAILY_HEADER):
        raise IngestError(f"daily CSV header must be {','.join(DAILY_HEADER)}", line=1)

    def num(s: str) -> float:
        return float(s) if s.strip() else math.nan

    days = []
    for row in reader:
        line = reader.line_num
        try:
            flag = row["complete"].strip().lower()
            if flag not in ("true", "false"):
                raise ValueError(f"bad boolean {row['complete']!r}")
            days.append(
                DailyRecord(
                    date=date.fromisoformat(row["date"].strip()),
                    energy_kwh=num(row["energy_kwh"]),
                    temp_max=num(row["temp_max"]),
                    temp_mean=num(row["temp_mean"]),
                    temp_min=num(row["temp_min"]),
                    complete=flag == "true",
                )
            )
        except (ValueError, AttributeError) as exc:
            raise IngestError(f"malformed daily row at line {line}: {exc}", line=line) from None
        if len(days) > 1 and days[-1].date <= days[-2].date:
            raise IngestError(f"dates not strictly increasing at line {line}", line=line)
    return days


def ingest(source: TextIO | str, min_coverage: float = DEFAULT_MIN_COVERAGE) -> list[DailyRecord]:
    """Raw CSV straight to daily records."""
    return resample_daily(resample_hourly(parse_readings(source)), min_coverage)
