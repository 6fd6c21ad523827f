"""Retrofit savings against a baseline trained before the intervention."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import TextIO

import numpy as np

from .evaluation import mae
from .features import Dataset, encode_rows
from .models import ModelSpec, TrainedModel, fit, predict


class InsufficientHistoryError(ValueError):
    def __init__(self, message: str, available: int, required: int):
        super().__init__(message)
        self.available = available
        self.required = required


@dataclass(frozen=True)
class SavingsDay:
    date: date
    predicted_kwh: float
    observed_kwh: float
    post_retrofit: bool


@dataclass(frozen=True)
class SavingsReport:
    """Baseline-versus-observed comparison around a retrofit.

    ``savings_pct`` is a percentage of the predicted post-retrofit
    consumption. ``unreliable`` is set when the error on the pre-retrofit
    gap days exceeds ``unreliable_factor`` times the training error.
    """

    store_id: str
    retrofit_date: date
    train_start: date
    train_end: date
    daily: tuple[SavingsDay, ...]
    train_mae: float
    pre_period_mae: float
    savings_kwh: float
    savings_pct: float
    unreliable: bool
    model: str
    baseline: TrainedModel | None = field(default=None, repr=False, compare=False)

    @property
    def post_days(self) -> list[SavingsDay]:
        return [d for d in self.daily if d.post_retrofit]

    def to_dict(self) -> dict:
        return {
            "store_id": self.store_id,
            "retrofit_date": self.retrofit_date.isoformat(),
            "train_start": self.train_start.isoformat(),
            "train_end": self.train_end.isoformat(),
            "model": self.model,
            "train_mae_kwh": self.train_mae,
            "pre_period_mae_kwh": None if math.isnan(self.pre_period_mae) else self.pre_period_mae,
            "savings_kwh": self.savings_kwh,
            "savings_pct": self.savings_pct,
            "unreliable": self.unreliable,
            "daily": [
                {
                    "date": d.date.isoformat(),
                    "predicted_kwh": d.predicted_kwh,
                    "observed_kwh": d.observed_kwh,
                    "post_retrofit": d.post_retrofit,
                }
                for d in self.daily
            ],
        }


def estimate_savings(
    data: Dataset,
    retrofit_date: date,
    spec: ModelSpec | None = None,
    train_size_days: int = 30,
    gap_days: int = 20,
    horizon_days: int = 50,
    unreliable_factor: float = 2.0,
) -> SavingsReport:
    """Estimate savings as predicted minus observed consumption after ``retrofit_date``.

    The model trains on the ``train_size_days`` days that end ``gap_days``
    before the retrofit and predicts ``horizon_days`` days from there. The
    gap days serve as an out-of-sample check of the baseline; days strictly
    after the retrofit date carry the savings.
    """
    spec = spec or ModelSpec("MLR")
    train_end = retrofit_date - timedelta(days=gap_days + 1)
    train_start = train_end - timedelta(days=train_size_days - 1)
    train = [r for r in data.rows if train_start <= r.date <= train_end]
    if len(train) < train_size_days:
        raise InsufficientHistoryError(
            f"need {train_size_days} complete days between {train_start} and {train_end}; "
            f"{len(train)} available",
            available=len(train),
            required=train_size_days,
        )
    horizon_end = train_end + timedelta(days=horizon_days)
    test = [r for r in data.rows if train_end < r.date <= horizon_end]
    if not any(r.date > retrofit_date for r in test):
        raise InsufficientHistoryError(
            f"no post-retrofit days between {retrofit_date + timedelta(days=1)} and {horizon_end}",
            available=0,
            required=1,
        )

    X_train, y_train = encode_rows(train)
    model = fit(spec, X_train, y_train, period=(train_start, train_end), layout=data.layout)
    fitted, _ = predict(model, X_train)
    X, observed = encode_rows(test)
    predicted, _ = predict(model, X)

    daily = tuple(
        SavingsDay(r.date, float(p), float(o), r.date > retrofit_date)
        for r, p, o in zip(test, predicted, observed)
    )
    pre = np.array([d.date < retrofit_date for d in daily])
    post = np.array([d.post_retrofit for d in daily])
    train_mae = mae(fitted, y_train)
    pre_mae = mae(predicted[pre], observed[pre]) if pre.any() else math.nan
    savings = math.fsum(d.predicted_kwh - d.observed_kwh for d in daily if d.post_retrofit)
    baseline = math.fsum(predicted[post])
    return SavingsReport(
        store_id=data.store_id,
        retrofit_date=retrofit_date,
        train_start=train_start,
        train_end=train_end,
        daily=daily,
        train_mae=train_mae,
        pre_period_mae=pre_mae,
        savings_kwh=savings,
        savings_pct=100.0 * savings / baseline,
        unreliable=bool(pre.any() and pre_mae > unreliable_factor * train_mae),
        model=spec.label,
        baseline=model,
    )


def write_report_json(report: SavingsReport, out: TextIO) -> None:
    json.dump(report.to_dict(), out, indent=1)
    out.write("\n")


def write_report_csv(report: SavingsReport, out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(("date", "predicted_kwh", "observed_kwh", "post_retrofit"))
    for d in report.daily:
        writer.writerow(
            (d.date.isoformat(), repr(d.predicted_kwh), repr(d.observed_kwh), "true" if d.post_retrofit else "false")
        )
