"""Refrigeration energy baselines from interval meter and temperature data."""

from .evaluation import (
    ErrorTimelinePoint,
    LearningCurvePoint,
    WindowPlan,
    error_timeline,
    learning_curve,
    long_term_run,
    mae,
    plan_windows,
)
from .features import Dataset, FeatureRow, encode, engineer_features
from .ingest import DailyRecord, HourlyRecord, RawReading, parse_readings, resample_daily, resample_hourly
from .models import ModelSpec, TrainedModel, fit, mlr_oracle, predict
from .savings import SavingsReport, estimate_savings
from .synth import SynthConfig, generate, profile_config

__version__ = "0.1.0"

__all__ = [
    "DailyRecord",
    "Dataset",
    "ErrorTimelinePoint",
    "FeatureRow",
    "HourlyRecord",
    "LearningCurvePoint",
    "ModelSpec",
    "RawReading",
    "SavingsReport",
    "SynthConfig",
    "TrainedModel",
    "WindowPlan",
    "encode",
    "engineer_features",
    "error_timeline",
    "estimate_savings",
    "fit",
    "generate",
    "learning_curve",
    "long_term_run",
    "mae",
    "mlr_oracle",
    "parse_readings",
    "plan_windows",
    "predict",
    "profile_config",
    "resample_daily",
    "resample_hourly",
]
