"""Seeded synthetic store generator.

Produces 15-minute readings whose daily consumption follows a known
two-regime temperature response, so every evaluation protocol can be run
against ground truth.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta
from typing import TextIO

import numpy as np

from .ingest import RawReading

INTERVALS_PER_DAY = 96
TRUTH_HEADER = ("date", "true_kwh", "post_retrofit")

# day of year at which the annual temperature cycle peaks (late July)
PEAK_DAY_OF_YEAR = 205.0


@dataclass(frozen=True)
class SynthConfig:
    """Generator knobs.

    ``temp_seasonal_amplitude`` is peak-to-mean of the yearly sinusoid.
    ``weather_sd`` drives a persistent day-to-day anomaly (AR(1)) while
    ``temp_noise_sd`` is independent per-reading sensor noise.
    ``level_walk_sd_kwh`` adds a random walk to the base load, which makes
    the consumption process only locally stationary.
    """

    n_days: int = 510
    start_date: date = date(2015, 12, 4)
    temp_mean_annual: float = 16.6
    temp_seasonal_amplitude: float = 4.5
    temp_daily_amplitude: float = 4.0
    temp_noise_sd: float = 0.3
    weather_sd: float = 4.0
    weather_persistence: float = 0.7
    base_load_kwh: float = 1500.0
    temp_coeff_kwh_per_deg: float = 40.0
    hot_mode_threshold_c: float = 20.0
    hot_mode_extra_coeff: float = 60.0
    weekday_effects: tuple[float, ...] = (10.0, 5.0, 0.0, 0.0, 15.0, -25.0, -35.0)
    noise_sd_kwh: float = 10.0
    level_walk_sd_kwh: float = 0.0
    retrofit_date: date | None = None
    retrofit_reduction_pct: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n_days < 2:
            raise ValueError("n_days must be >= 2")
        if not 0.0 <= self.retrofit_reduction_pct < 1.0:
            raise ValueError("retrofit_reduction_pct must lie in [0, 1)")
        if len(self.weekday_effects) != 7:
            raise ValueError("weekday_effects needs 7 values (Monday first)")
        if self.base_load_kwh <= 0:
            raise ValueError("base_load_kwh must be positive")


# Climate presets with small, medium and large seasonal swings
# (monthly means roughly 12-21 C, 9-22 C and 8-26 C).
PROFILES: dict[str, dict] = {
    "aveiro": dict(start_date=date(2015, 12, 4), n_days=510, temp_mean_annual=16.6,
                   temp_seasonal_amplitude=4.5),
    "fatima": dict(start_date=date(2016, 1, 7), n_days=476, temp_mean_annual=15.2,
                   temp_seasonal_amplitude=6.5),
    "macedo": dict(start_date=date(2015, 11, 13), n_days=531, temp_mean_annual=15.8,
                   temp_seasonal_amplitude=9.0),
}


def profile_config(name: str, **overrides) -> SynthConfig:
    try:
        base = PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown profile {name!r}; choose from {sorted(PROFILES)}") from None
    return SynthConfig(**{**base, **overrides})


@dataclass(frozen=True)
class TruthDay:
    date: date
    true_kwh: float
    post_retrofit: bool


@dataclass
class SynthStore:
    readings: list[RawReading]
    truth: list[TruthDay] = field(default_factory=list)


def daily_consumption(cfg: SynthConfig, temp_mean: float, weekday: int, level: float = 0.0) -> float:
    """Noise-free pre-retrofit consumption; ``weekday`` is 0 for Monday."""
    return (
        cfg.base_load_kwh
        + level
        + cfg.temp_coeff_kwh_per_deg * temp_mean
        + cfg.hot_mode_extra_coeff * max(0.0, temp_mean - cfg.hot_mode_threshold_c)
        + cfg.weekday_effects[weekday]
    )


def generate(cfg: SynthConfig) -> SynthStore:
    """Readings at exact 15-minute cadence plus the daily ground-truth table."""
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n_days
    weather = np.empty(n)
    innov_sd = cfg.weather_sd * math.sqrt(1.0 - cfg.weather_persistence**2)
    weather[0] = rng.normal(0.0, cfg.weather_sd)
    for k in range(1, n):
        weather[k] = cfg.weather_persistence * weather[k - 1] + rng.normal(0.0, innov_sd)
    sensor = rng.normal(0.0, cfg.temp_noise_sd, size=(n, INTERVALS_PER_DAY))
    level = np.cumsum(rng.normal(0.0, cfg.level_walk_sd_kwh, size=n)) if cfg.level_walk_sd_kwh else np.zeros(n)
    consumption_noise = rng.normal(0.0, cfg.noise_sd_kwh, size=n)

    hours = np.arange(INTERVALS_PER_DAY) / 4.0
    intraday = cfg.temp_daily_amplitude * np.cos(2 * np.pi * (hours - 15.0) / 24.0)

    readings: list[RawReading] = []
    truth: list[TruthDay] = []
    start = datetime.combine(cfg.start_date, datetime.min.time())
    for k in range(n):
        day = cfg.start_date + timedelta(days=k)
        doy = day.timetuple().tm_yday - 1 + hours / 24.0
        seasonal = cfg.temp_seasonal_amplitude * np.cos(2 * np.pi * (doy - PEAK_DAY_OF_YEAR) / 365.25)
        temps = np.round(cfg.temp_mean_annual + seasonal + intraday + weather[k] + sensor[k], 3)
        temp_mean = math.fsum(temps) / INTERVALS_PER_DAY

        kwh = daily_consumption(cfg, temp_mean, day.weekday(), level[k]) + consumption_noise[k]
        post = cfg.retrofit_date is not None and day > cfg.retrofit_date
        if post:
            kwh *= 1.0 - cfg.retrofit_reduction_pct
        per_interval = round(float(max(kwh, 0.0)) / INTERVALS_PER_DAY, 6)

        day_start = start + timedelta(days=k)
        for i in range(INTERVALS_PER_DAY):
            readings.append(
                RawReading(day_start + timedelta(minutes=15 * i), per_interval, float(temps[i]))
            )
        truth.append(TruthDay(day, math.fsum([per_interval] * INTERVALS_PER_DAY), post))
    return SynthStore(readings, truth)


def write_readings_csv(readings, out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(("timestamp", "energy_kwh", "temp_c"))
    for r in readings:
        writer.writerow((r.timestamp.strftime("%Y-%m-%dT%H:%M"), repr(r.energy_kwh), repr(r.temp_c)))


def write_truth_csv(truth, out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(TRUTH_HEADER)
    for t in truth:
        writer.writerow((t.date.isoformat(), repr(t.true_kwh), "true" if t.post_retrofit else "false"))

