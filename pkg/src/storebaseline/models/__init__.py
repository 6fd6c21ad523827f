"""Baseline learners: multiple linear regression, random forest and a small neural network."""

from .core import (
    ANNParams,
    ConstantColumnWarning,
    ModelInputError,
    ModelSpec,
    RFParams,
    Scaler,
    TrainedModel,
    fit,
    load_model,
    model_from_dict,
    model_to_dict,
    predict,
    save_model,
)
from .linear import RankDeficientWarning, mlr_oracle
from .neural import TrainingDivergedError

__all__ = [
    "ANNParams",
    "ConstantColumnWarning",
    "ModelInputError",
    "ModelSpec",
    "RFParams",
    "RankDeficientWarning",
    "Scaler",
    "TrainedModel",
    "TrainingDivergedError",
    "fit",
    "load_model",
    "mlr_oracle",
    "model_from_dict",
    "model_to_dict",
    "predict",
    "save_model",
]
