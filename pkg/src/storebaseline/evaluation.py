"""Sliding-window evaluation: MAE, window planning, learning curves and error timelines."""

from __future__ import annotations

import csv
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import date, timedelta
from typing import Iterable, Sequence, TextIO

import numpy as np

from .features import Dataset, encode_rows
from .models import ModelSpec, TrainedModel, fit, predict

DEFAULT_TRAIN_SIZES = tuple(range(10, 181, 10))
DEFAULT_HORIZON = 50
DEFAULT_ANCHORS = 6
DEFAULT_ANCHOR_STEP = 50

CURVE_HEADER = ("model", "train_size_days", "mae_mean_std_units", "mae_std_std_units", "mae_mean_kwh", "n_iterations")
TIMELINE_HEADER = ("model", "block_index", "block_start_date", "mae_std_units", "mae_kwh", "n_predictions")


class InfeasibleWindowError(ValueError):
    def __init__(self, message: str, required_span: int, available_span: int):
        super().__init__(message)
        self.required_span = required_span
        self.available_span = available_span


class SkippedSizeWarning(UserWarning):
    pass


def mae(predicted, observed) -> float:
    """Mean absolute error ``(1/N) sum |predicted - observed|``."""
    p = np.asarray(predicted, dtype=float)
    o = np.asarray(observed, dtype=float)
    if p.shape != o.shape or p.ndim != 1:
        raise ValueError(f"length mismatch: {p.shape} vs {o.shape}")
    if p.size == 0:
        raise ValueError("mae of zero observations")
    if not (np.isfinite(p).all() and np.isfinite(o).all()):
        raise ValueError("mae needs finite values")
    return float(np.abs(p - o).mean())


@dataclass(frozen=True)
class Window:
    train_start: date
    train_end: date
    test_start: date
    test_end: date


@dataclass(frozen=True)
class WindowPlan:
    windows: tuple[Window, ...]
    train_size_days: int
    horizon_days: int

    @property
    def anchors(self) -> list[date]:
        return [w.train_end for w in self.windows]


def plan_windows(
    data: Dataset,
    train_size_days: int,
    horizon_days: int = DEFAULT_HORIZON,
    n_anchors: int = DEFAULT_ANCHORS,
    anchor_step_days: int = DEFAULT_ANCHOR_STEP,
    first_anchor: date | None = None,
) -> WindowPlan:
    """Schedule ``n_anchors`` train/test windows.

    Each window trains on the ``train_size_days`` calendar days ending at its
    anchor and tests on the ``horizon_days`` days after it. Anchors start at
    ``first_anchor`` (default: the earliest feasible train end) and advance
    by ``anchor_step_days``.
    """
    if min(train_size_days, horizon_days, n_anchors) < 1 or anchor_step_days < 0:
        raise ValueError("window sizes and anchor count must be positive")
    span = data.span_days
    if first_anchor is None:
        lead = train_size_days
        first_anchor = data.first_date + timedelta(days=train_size_days - 1) if data.rows else None
    else:
        lead = (first_anchor - data.first_date).days + 1 if data.rows else 0
        if lead < train_size_days:
            raise InfeasibleWindowError(
                f"first anchor {first_anchor} leaves only {lead} days for a {train_size_days}-day training window",
                train_size_days,
                lead,
            )
    required = lead + horizon_days + (n_anchors - 1) * anchor_step_days
    if not data.rows or required > span:
        raise InfeasibleWindowError(
            f"windows need a span of {required} days; dataset spans {span}", required, span
        )
    windows = []
    for k in range(n_anchors):
        end = first_anchor + timedelta(days=k * anchor_step_days)
        windows.append(
            Window(
                train_start=end - timedelta(days=train_size_days - 1),
                train_end=end,
                test_start=end + timedelta(days=1),
                test_end=end + timedelta(days=horizon_days),
            )
        )
    return WindowPlan(tuple(windows), train_size_days, horizon_days)


@dataclass(frozen=True)
class WindowResult:
    store_id: str
    window: Window
    mae: float
    mae_kwh: float
    n_train: int
    n_test: int
    last_train_date: date
    first_test_date: date


@dataclass(frozen=True)
class LearningCurvePoint:
    train_size_days: int
    mae_mean: float
    mae_std: float
    mae_mean_kwh: float
    n_iterations: int
    windows: tuple[WindowResult, ...] = ()


@dataclass(frozen=True)
class ErrorTimelinePoint:
    block_index: int
    block_start_date: date
    mae: float
    mae_kwh: float
    n_predictions: int


def _fit_window(data: Dataset, spec: ModelSpec, train_start: date, train_end: date) -> tuple[TrainedModel, list]:
    rows = [r for r in data.rows if train_start <= r.date <= train_end]
    if not rows:
        raise ValueError(f"no training rows between {train_start} and {train_end}")
    X, y = encode_rows(rows)
    model = fit(spec, X, y, period=(train_start, train_end), layout=data.layout)
    return model, rows


def _run_window(job) -> WindowResult | None:
    data, spec, window = job
    test = [r for r in data.rows if window.test_start <= r.date <= window.test_end]
    train = [r for r in data.rows if window.train_start <= r.date <= window.train_end]
    if not test or len(train) < 2:
        return None
    model, train = _fit_window(data, spec, window.train_start, window.train_end)
    X, y = encode_rows(test)
    kwh, std = predict(model, X)
    return WindowResult(
        store_id=data.store_id,
        window=window,
        mae=mae(std, model.scaler.transform_target(y)),
        mae_kwh=mae(kwh, y),
        n_train=len(train),
        n_test=len(test),
        last_train_date=train[-1].date,
        first_test_date=test[0].date,
    )


def _map(fn, jobs: list, workers: int) -> list:
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return [fn(j) for j in jobs]


def learning_curve(
    data: Dataset | Sequence[Dataset],
    specs: Sequence[ModelSpec],
    train_sizes: Iterable[int] = DEFAULT_TRAIN_SIZES,
    horizon_days: int = DEFAULT_HORIZON,
    n_anchors: int = DEFAULT_ANCHORS,
    anchor_step_days: int = DEFAULT_ANCHOR_STEP,
    workers: int = 1,
) -> dict[str, list[LearningCurvePoint]]:
    """MAE as a function of training size, averaged over anchors and stores.

    Within a store every training size is tested on the same windows: the
    anchors are fixed by the largest feasible size and the training range
    grows backwards from each anchor. Sizes that do not fit a store are
    skipped there with a :class:`SkippedSizeWarning`.
    """
    stores = [data] if isinstance(data, Dataset) else list(data)
    sizes = sorted(set(int(s) for s in train_sizes))
    if not sizes or sizes[0] < 1:
        raise ValueError("train sizes must be positive")
    labels = [s.label for s in specs]
    if len(set(labels)) != len(labels):
        raise ValueError(f"model labels must be unique: {labels}")

    jobs, keys = [], []
    for store in stores:
        feasible = []
        for size in sizes:
            try:
                plan_windows(store, size, horizon_days, n_anchors, anchor_step_days)
                feasible.append(size)
            except InfeasibleWindowError as exc:
                warnings.warn(f"{store.store_id}: skipping {size}-day size ({exc})", SkippedSizeWarning, stacklevel=2)
        if not feasible:
            continue
        anchor = store.first_date + timedelta(days=feasible[-1] - 1)
        for size in feasible:
            plan = plan_windows(store, size, horizon_days, n_anchors, anchor_step_days, first_anchor=anchor)
            for spec in specs:
                for w in plan.windows:
                    jobs.append((store, spec, w))
                    keys.append((spec.label, size))

    results = _map(_run_window, jobs, workers)

    collected: dict[tuple[str, int], list[WindowResult]] = {}
    for key, res in zip(keys, results):
        if res is not None:
            collected.setdefault(key, []).append(res)

    curves: dict[str, list[LearningCurvePoint]] = {label: [] for label in labels}
    for label in labels:
        for size in sizes:
            res = collected.get((label, size))
            if not res:
                continue
            errs = np.array([r.mae for r in res])
            curves[label].append(
                LearningCurvePoint(
                    train_size_days=size,
                    mae_mean=float(errs.mean()),
                    mae_std=float(errs.std()),
                    mae_mean_kwh=float(np.mean([r.mae_kwh for r in res])),
                    n_iterations=len(res),
                    windows=tuple(res),
                )
            )
    return curves


def _timeline_job(job):
    data, spec, train_start, train_size_days, block_size = job
    return error_timeline(data, spec, train_start, train_size_days, block_size)


def error_timeline(
    data: Dataset,
    spec: ModelSpec,
    train_start: date,
    train_size_days: int,
    block_size: int = 10,
) -> list[ErrorTimelinePoint]:
    """Fit once, predict every later day and report MAE per block of predictions."""
    if block_size < 1 or train_size_days < 1:
        raise ValueError("block_size and train_size_days must be positive")
    train_end = train_start + timedelta(days=train_size_days - 1)
    test = [r for r in data.rows if r.date > train_end]
    if not test:
        raise ValueError(f"no days to predict after {train_end}")
    model, _ = _fit_window(data, spec, train_start, train_end)
    X, y = encode_rows(test)
    kwh, std = predict(model, X)
    y_std = model.scaler.transform_target(y)
    points = []
    for b, lo in enumerate(range(0, len(test), block_size)):
        hi = min(lo + block_size, len(test))
        points.append(
            ErrorTimelinePoint(
                block_index=b,
                block_start_date=test[lo].date,
                mae=mae(std[lo:hi], y_std[lo:hi]),
                mae_kwh=mae(kwh[lo:hi], y[lo:hi]),
                n_predictions=hi - lo,
            )
        )
    return points


def long_term_run(
    data: Dataset,
    specs: Sequence[ModelSpec],
    train_size_days: int = 360,
    block_size: int = 10,
    workers: int = 1,
) -> dict[str, list[ErrorTimelinePoint]]:
    """Train every spec on the first ``train_size_days`` and track error to the end."""
    if data.span_days <= train_size_days:
        raise ValueError(f"dataset spans {data.span_days} days; need more than {train_size_days}")
    jobs = [(data, spec, data.first_date, train_size_days, block_size) for spec in specs]
    return {spec.label: tl for spec, tl in zip(specs, _map(_timeline_job, jobs, workers))}


def _num(x: float) -> str:
    return repr(float(x))


def write_curve_csv(curves: dict[str, list[LearningCurvePoint]], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CURVE_HEADER)
    for label, points in curves.items():
        for p in points:
            writer.writerow((label, p.train_size_days, _num(p.mae_mean), _num(p.mae_std), _num(p.mae_mean_kwh), p.n_iterations))


def write_timeline_csv(timelines: dict[str, list[ErrorTimelinePoint]], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(TIMELINE_HEADER)
    for label, points in timelines.items():
        for p in points:
            writer.writerow(
                (label, p.block_index, p.block_start_date.isoformat(), _num(p.mae), _num(p.mae_kwh), p.n_predictions)
            )


def best_point(curves: dict[str, list[LearningCurvePoint]]) -> tuple[str, LearningCurvePoint] | None:
    best = None
    for label, points in curves.items():
        for p in points:
            if best is None or p.mae_mean < best[1].mae_mean:
                best = (label, p)
    return best
