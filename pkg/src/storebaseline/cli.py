"""Command-line entry point.

Exit status: 0 on success, 1 on usage errors, 2 on data errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from datetime import date
from pathlib import Path

from . import evaluation as ev
from .features import InsufficientDataError, engineer_features
from .ingest import DEFAULT_MIN_COVERAGE, IngestError, ingest, read_daily_csv, write_daily_csv
from .models import ANNParams, ModelSpec, RFParams, save_model
from .savings import InsufficientHistoryError, estimate_savings, write_report_csv, write_report_json
from .synth import PROFILES, generate, profile_config, write_readings_csv, write_truth_csv

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
DATA_ERRORS = (
    IngestError,
    InsufficientDataError,
    ev.InfeasibleWindowError,
    InsufficientHistoryError,
    FileNotFoundError,
)


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _date(text: str) -> date:
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid date {text!r}; expected YYYY-MM-DD") from None


def _grid(text: str) -> list[int]:
    """``10:180:10`` (inclusive) or a comma list ``30,60``."""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            start, stop = parts[0], parts[1]
            step = parts[2] if len(parts) > 2 else 10
            if step < 1:
                raise ValueError
            return list(range(start, stop + 1, step))
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid size grid {text!r}") from None


class Settings:
    """Flag values layered over an optional JSON config file and built-in defaults."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config: dict = {}
        if getattr(args, "config", None):
            try:
                self.config = json.loads(Path(args.config).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise UsageError(f"cannot read config {args.config}: {exc}") from None
            if not isinstance(self.config, dict):
                raise UsageError("config file must hold a JSON object")

    def get(self, name: str, default=None):
        value = getattr(self.args, name, None)
        if value is not None:
            return value
        return self.config.get(name, default)

    def seed(self) -> int:
        seed = self.get("seed")
        if seed is None:
            env = os.environ.get("BASELINE_SEED")
            if env is not None:
                try:
                    seed = int(env)
                except ValueError:
                    raise UsageError(f"BASELINE_SEED must be an integer, got {env!r}") from None
        seed = int(seed or 0)
        if not 0 <= seed < 2**64:
            raise UsageError("seed must be a 64-bit unsigned integer")
        return seed

    def specs(self, kinds) -> list[ModelSpec]:
        if isinstance(kinds, str):
            kinds = [k for k in kinds.split(",") if k.strip()]
        params = self.config.get("model_params", {})
        rf = {**params.get("rf", {})}
        ann = {**params.get("ann", {})}
        for flag, group, key in (
            ("n_trees", rf, "n_trees"),
            ("mtry", rf, "mtry"),
            ("min_leaf", rf, "min_leaf"),
            ("hidden_units", ann, "hidden_units"),
            ("epochs", ann, "epochs"),
            ("learning_rate", ann, "learning_rate"),
        ):
            value = getattr(self.args, flag, None)
            if value is not None:
                group[key] = value
        try:
            return [
                ModelSpec(k.strip(), rf=RFParams(**rf), ann=ANNParams(**ann), seed=self.seed())
                for k in kinds
            ]
        except (TypeError, ValueError) as exc:
            raise UsageError(str(exc)) from None


def _load_dataset(path: str, min_coverage: float = DEFAULT_MIN_COVERAGE):
    p = Path(path)
    text = p.read_text()
    header = text.split("\n", 1)[0].strip()
    if header.startswith("date,"):
        days = read_daily_csv(text)
    else:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            days = ingest(text, min_coverage)
        _report_warnings(caught)
    return engineer_features(days, store_id=p.stem)


def _report_warnings(caught) -> None:
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)


def _out_dir(settings: Settings) -> Path:
    out = Path(settings.get("out", "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_ingest(settings: Settings) -> int:
    src = settings.get("input")
    dst = settings.get("output")
    if not src or not dst:
        raise UsageError("--input and --output are required")
    text = Path(src).read_text()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        days = ingest(text, float(settings.get("min_coverage", DEFAULT_MIN_COVERAGE)))
    _report_warnings(caught)
    if not days:
        raise DataError("input holds no readings")
    with open(dst, "w", newline="") as out:
        write_daily_csv(days, out)
    n_complete = sum(d.complete for d in days)
    print(f"{len(days)} days written ({n_complete} complete)", file=sys.stderr)
    return EXIT_OK


def _datasets(settings: Settings):
    paths = settings.get("data")
    if not paths:
        raise UsageError("--data is required")
    if isinstance(paths, str):
        paths = [paths]
    cov = float(settings.get("min_coverage", DEFAULT_MIN_COVERAGE))
    return [_load_dataset(p, cov) for p in paths]


def cmd_learning_curve(settings: Settings) -> int:
    stores = _datasets(settings)
    specs = settings.specs(settings.get("models", "mlr,rf,ann"))
    sizes = settings.get("train_sizes", list(ev.DEFAULT_TRAIN_SIZES))
    if isinstance(sizes, str):
        sizes = _grid(sizes)
    horizon = int(settings.get("horizon", ev.DEFAULT_HORIZON))
    anchors = int(settings.get("anchors", ev.DEFAULT_ANCHORS))
    step = int(settings.get("step", ev.DEFAULT_ANCHOR_STEP))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ev.SkippedSizeWarning)
        curves = ev.learning_curve(
            stores, specs, sizes, horizon, anchors, step, workers=int(settings.get("workers", 1))
        )
    _report_warnings(w for w in caught if issubclass(w.category, ev.SkippedSizeWarning))
    best = ev.best_point(curves)
    if best is None:
        raise DataError("no training size fits the data; the grid is infeasible")

    out = _out_dir(settings)
    with open(out / "learning_curve.csv", "w", newline="") as f:
        ev.write_curve_csv(curves, f)
    label, point = best
    summary = {
        "best": {
            "model": label,
            "train_size_days": point.train_size_days,
            "mae_mean_std_units": point.mae_mean,
            "mae_mean_kwh": point.mae_mean_kwh,
        },
        "stores": [s.store_id for s in stores],
        "models": [s.label for s in specs],
        "train_sizes": sorted(set(sizes)),
        "horizon_days": horizon,
        "n_anchors": anchors,
        "anchor_step_days": step,
        "seed": settings.seed(),
    }
    (out / "learning_curve_summary.json").write_text(json.dumps(summary, indent=1) + "\n")
    return EXIT_OK


def cmd_error_timeline(settings: Settings) -> int:
    (data,) = _datasets(settings)[:1]
    (spec,) = settings.specs([settings.get("model", "mlr")])
    start = settings.get("train_start")
    start = _date(start) if isinstance(start, str) else (start or data.first_date)
    timeline = ev.error_timeline(
        data, spec, start, int(settings.get("train_days", 30)), int(settings.get("block", 10))
    )
    with open(_out_dir(settings) / "error_timeline.csv", "w", newline="") as f:
        ev.write_timeline_csv({spec.label: timeline}, f)
    return EXIT_OK


def cmd_longterm(settings: Settings) -> int:
    (data,) = _datasets(settings)[:1]
    days = int(settings.get("train_days", 360))
    specs = settings.specs(settings.get("models", "mlr,rf,ann"))
    timelines = ev.long_term_run(
        data, specs, days, int(settings.get("block", 10)), workers=int(settings.get("workers", 1))
    )
    with open(_out_dir(settings) / f"longterm_{days}.csv", "w", newline="") as f:
        ev.write_timeline_csv(timelines, f)
    return EXIT_OK


def cmd_savings(settings: Settings) -> int:
    (data,) = _datasets(settings)[:1]
    retrofit = settings.get("retrofit_date")
    if retrofit is None:
        raise UsageError("--retrofit-date is required")
    if isinstance(retrofit, str):
        retrofit = _date(retrofit)
    (spec,) = settings.specs([settings.get("model", "mlr")])
    report = estimate_savings(
        data,
        retrofit,
        spec,
        train_size_days=int(settings.get("train_days", 30)),
        gap_days=int(settings.get("gap", 20)),
        horizon_days=int(settings.get("horizon", 50)),
        unreliable_factor=float(settings.get("unreliable_factor", 2.0)),
    )
    out = _out_dir(settings)
    with open(out / "savings_report.json", "w") as f:
        write_report_json(report, f)
    with open(out / "savings_daily.csv", "w", newline="") as f:
        write_report_csv(report, f)
    if settings.get("save_model"):
        with open(settings.get("save_model"), "w") as f:
            save_model(report.baseline, f)
    flag = " (baseline flagged unreliable)" if report.unreliable else ""
    print(f"savings {report.savings_kwh:.1f} kWh, {report.savings_pct:.2f}%{flag}", file=sys.stderr)
    return EXIT_OK


def cmd_synth(settings: Settings) -> int:
    output = settings.get("output")
    if not output:
        raise UsageError("--output is required")
    overrides = {"seed": settings.seed()}
    if settings.get("days") is not None:
        overrides["n_days"] = int(settings.get("days"))
    if settings.get("start_date") is not None:
        s = settings.get("start_date")
        overrides["start_date"] = _date(s) if isinstance(s, str) else s
    retrofit = settings.get("retrofit_date")
    if retrofit is not None:
        overrides["retrofit_date"] = _date(retrofit) if isinstance(retrofit, str) else retrofit
    overrides["retrofit_reduction_pct"] = float(settings.get("reduction", 0.0))
    overrides.update(settings.config.get("synth", {}))
    try:
        cfg = profile_config(settings.get("profile", "aveiro"), **overrides)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    store = generate(cfg)
    with open(output, "w", newline="") as f:
        write_readings_csv(store.readings, f)
    truth = settings.get("truth") or str(Path(output).with_name(Path(output).stem + "_truth.csv"))
    with open(truth, "w", newline="") as f:
        write_truth_csv(store.truth, f)
    return EXIT_OK


def _add_model_flags(p):
    p.add_argument("--n-trees", type=int)
    p.add_argument("--mtry", type=int)
    p.add_argument("--min-leaf", type=int)
    p.add_argument("--hidden-units", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--learning-rate", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="storebaseline", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file of option defaults; flags take precedence")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="raw interval CSV to daily CSV")
    p.add_argument("--input")
    p.add_argument("--output")
    p.add_argument("--min-coverage", type=float)
    p.set_defaults(func=cmd_ingest)

    def common(p, multi=False):
        p.add_argument("--data", nargs="+" if multi else None)
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int)
        p.add_argument("--min-coverage", type=float)
        _add_model_flags(p)

    p = sub.add_parser("learning-curve", help="MAE versus training size over sliding windows")
    common(p, multi=True)
    p.add_argument("--models", help="comma list of mlr, rf, ann")
    p.add_argument("--train-sizes", type=_grid, help="start:stop:step or comma list")
    p.add_argument("--horizon", type=int)
    p.add_argument("--anchors", type=int)
    p.add_argument("--step", type=int)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_learning_curve)

    p = sub.add_parser("error-timeline", help="blockwise MAE after a single fit")
    common(p)
    p.add_argument("--model")
    p.add_argument("--train-start", type=_date)
    p.add_argument("--train-days", type=int)
    p.add_argument("--block", type=int)
    p.set_defaults(func=cmd_error_timeline)

    p = sub.add_parser("longterm", help="train on the first N days, track error to the end")
    common(p)
    p.add_argument("--models")
    p.add_argument("--train-days", type=int, choices=(180, 360))
    p.add_argument("--block", type=int)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_longterm)

    p = sub.add_parser("savings", help="retrofit savings against a pre-retrofit baseline")
    common(p)
    p.add_argument("--retrofit-date", type=_date)
    p.add_argument("--train-days", type=int)
    p.add_argument("--gap", type=int)
    p.add_argument("--horizon", type=int)
    p.add_argument("--model")
    p.add_argument("--unreliable-factor", type=float)
    p.add_argument("--save-model", help="write the fitted baseline as JSON")
    p.set_defaults(func=cmd_savings)

    p = sub.add_parser("synth", help="generate a synthetic store")
    p.add_argument("--days", type=int)
    p.add_argument("--start-date", type=_date)
    p.add_argument("--retrofit-date", type=_date)
    p.add_argument("--reduction", type=float)
    p.add_argument("--profile", choices=sorted(PROFILES))
    p.add_argument("--seed", type=int)
    p.add_argument("--output")
    p.add_argument("--truth", help="ground-truth CSV path (default: <output>_truth.csv)")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(Settings(args))
    except UsageError as exc:
        print(f"storebaseline: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, *DATA_ERRORS) as exc:
        print(f"storebaseline: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"storebaseline: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
