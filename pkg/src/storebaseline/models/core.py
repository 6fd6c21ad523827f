"""Common fit/predict contract for the three baseline learners."""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from datetime import date
from typing import TextIO

import numpy as np

from ..features import ColumnLayout
from . import forest, neural
from .linear import solve_ols, with_intercept

KINDS = ("MLR", "RF", "ANN")
MODEL_FORMAT = "storebaseline.model"
MODEL_FORMAT_VERSION = 1


class ModelInputError(ValueError):
    pass


class ConstantColumnWarning(UserWarning):
    pass


@dataclass(frozen=True)
class RFParams:
    n_trees: int = 100
    mtry: int | None = None  # None -> ceil(p / 3)
    min_leaf: int = 5
    bootstrap: bool = True


@dataclass(frozen=True)
class ANNParams:
    hidden_units: int = 10
    epochs: int = 2000
    learning_rate: float = 0.01
    activation: str = "tanh"


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    rf: RFParams = field(default_factory=RFParams)
    ann: ANNParams = field(default_factory=ANNParams)
    seed: int = 0
    name: str | None = None

    def __post_init__(self):
        kind = self.kind.upper()
        if kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}; expected one of {KINDS}")
        object.__setattr__(self, "kind", kind)
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.rf.n_trees < 1 or self.rf.min_leaf < 1 or (self.rf.mtry is not None and self.rf.mtry < 1):
            raise ValueError("random forest counts must be >= 1")
        if self.ann.hidden_units < 1 or self.ann.epochs < 1 or not self.ann.learning_rate > 0:
            raise ValueError("network sizes must be >= 1 and the learning rate positive")
        if self.ann.activation != "tanh":
            raise ValueError("only the tanh activation is supported")

    @property
    def label(self) -> str:
        return self.name or self.kind.lower()

    def mtry_for(self, n_columns: int) -> int:
        mtry = self.rf.mtry if self.rf.mtry is not None else math.ceil(n_columns / 3)
        if mtry > n_columns:
            raise ValueError(f"mtry={mtry} exceeds the {n_columns} available columns")
        return mtry

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        return cls(
            kind=d["kind"],
            rf=RFParams(**d.get("rf", {})),
            ann=ANNParams(**d.get("ann", {})),
            seed=int(d.get("seed", 0)),
            name=d.get("name"),
        )


@dataclass(frozen=True)
class Scaler:
    """Training-row z-score statistics.

    Columns that are not numeric in the layout carry mean 0 and scale 1.
    Constant columns (and a constant target) are recorded with scale 1 and
    listed in ``constant``.
    """

    mean: np.ndarray
    scale: np.ndarray
    target_mean: float
    target_scale: float
    constant: tuple[int, ...] = ()
    constant_target: bool = False

    @classmethod
    def from_training(cls, X: np.ndarray, y: np.ndarray, layout: ColumnLayout) -> "Scaler":
        mean = np.zeros(X.shape[1])
        scale = np.ones(X.shape[1])
        constant = []
        for j in layout.numeric:
            m, s = X[:, j].mean(), X[:, j].std()
            mean[j] = m
            if s > 0:
                scale[j] = s
            else:
                constant.append(j)
        ym, ys = float(y.mean()), float(y.std())
        if constant or ys == 0:
            warnings.warn(
                "constant training column(s) scaled by 1"
                + (f": {constant}" if constant else "")
                + (" (target)" if ys == 0 else ""),
                ConstantColumnWarning,
                stacklevel=3,
            )
        return cls(mean, scale, ym, ys if ys > 0 else 1.0, tuple(constant), ys == 0)

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean) / self.scale

    def transform_target(self, y: np.ndarray) -> np.ndarray:
        return (y - self.target_mean) / self.target_scale

    def inverse_target(self, t: np.ndarray) -> np.ndarray:
        return t * self.target_scale + self.target_mean

    def to_dict(self) -> dict:
        return {
            "mean": self.mean.tolist(),
            "scale": self.scale.tolist(),
            "target_mean": self.target_mean,
            "target_scale": self.target_scale,
            "constant": list(self.constant),
            "constant_target": self.constant_target,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Scaler":
        return cls(
            np.asarray(d["mean"], dtype=float),
            np.asarray(d["scale"], dtype=float),
            float(d["target_mean"]),
            float(d["target_scale"]),
            tuple(d.get("constant", ())),
            bool(d.get("constant_target", False)),
        )


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=a.dtype)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class TrainedModel:
    """A fitted predictor. ``params`` holds the learner state:

    * MLR: ``intercept`` (1,) and ``coef`` (p,) on standardized columns
    * RF: ``trees`` (list of :class:`~storebaseline.models.forest.Tree`),
      ``y_min`` and ``y_max``
    * ANN: ``W1``, ``b1``, ``w2``, ``b2``
    """

    spec: ModelSpec
    layout: ColumnLayout
    scaler: Scaler
    params: dict
    train_start: date | None = None
    train_end: date | None = None
    n_train: int = 0
    train_loss: float = math.nan

    @property
    def n_columns(self) -> int:
        return self.layout.n_columns

    def coefficients_raw(self) -> np.ndarray:
        """MLR coefficients ``[intercept, slopes...]`` in original column units."""
        if self.spec.kind != "MLR":
            raise TypeError("raw coefficients exist only for MLR models")
        s = self.scaler
        b = self.params["coef"] * s.target_scale / s.scale
        b0 = s.target_mean + s.target_scale * self.params["intercept"][0] - float(b @ s.mean)
        return np.concatenate([[b0], b])


def _mlr_columns(X: np.ndarray, layout: ColumnLayout) -> list[int]:
    """Columns entering the least-squares system.

    Redundant columns are left out; in each one-hot block, levels absent
    from the training rows and the first present level are dropped.
    """
    skip = set(layout.redundant)
    for block in layout.blocks:
        present = [j for j in block if X[:, j].any()]
        skip.update(j for j in block if j not in present)
        if present:
            skip.add(present[0])
    return [j for j in range(layout.n_columns) if j not in skip]


def fit(
    spec: ModelSpec,
    X: np.ndarray,
    y: np.ndarray,
    period: tuple[date, date] | None = None,
    layout: ColumnLayout | None = None,
    workers: int = 1,
) -> TrainedModel:
    """Fit ``spec`` on design matrix ``X`` and target ``y``.

    Without a ``layout`` every column is treated as numeric; pass
    ``Dataset.layout`` for encoded feature matrices.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or len(X) != len(y):
        raise ModelInputError(f"X must be (n, p) and y (n,); got {X.shape} and {y.shape}")
    if len(y) == 0:
        raise ModelInputError("cannot fit on zero rows")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise ModelInputError("X and y must be finite")
    if layout is None:
        layout = ColumnLayout.all_numeric(X.shape[1])
    if layout.n_columns != X.shape[1]:
        raise ModelInputError(f"layout expects {layout.n_columns} columns, X has {X.shape[1]}")

    scaler = Scaler.from_training(X, y, layout)
    t = scaler.transform_target(y)
    loss = math.nan

    if spec.kind == "MLR":
        Z = scaler.transform(X)
        cols = _mlr_columns(X, layout)
        sol = solve_ols(with_intercept(Z[:, cols]), t)
        coef = np.zeros(layout.n_columns)
        coef[cols] = sol[1:]
        params = {"intercept": _freeze(sol[:1]), "coef": _freeze(coef)}
        r = sol[0] + Z @ coef - t
        loss = float(r @ r) / len(t)
    elif spec.kind == "RF":
        r = spec.rf
        trees = forest.fit_forest(
            X, y, r.n_trees, spec.mtry_for(X.shape[1]), r.min_leaf, r.bootstrap, spec.seed, workers
        )
        params = {"trees": tuple(trees), "y_min": float(y.min()), "y_max": float(y.max())}
    else:
        a = spec.ann
        rng = np.random.default_rng(spec.seed)
        weights, loss = neural.train(
            scaler.transform(X), t, a.hidden_units, a.epochs, a.learning_rate, rng
        )
        params = {k: _freeze(v) for k, v in weights.items()}

    start, end = period if period is not None else (None, None)
    return TrainedModel(spec, layout, scaler, params, start, end, len(y), loss)


def predict(model: TrainedModel, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Predictions in kWh and in standardized-target units."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != model.n_columns:
        got = X.shape[1] if X.ndim == 2 else X.shape
        raise ModelInputError(f"expected {model.n_columns} columns, received {got}")
    kind = model.spec.kind
    s = model.scaler
    if kind == "MLR":
        t = model.params["intercept"][0] + s.transform(X) @ model.params["coef"]
        return s.inverse_target(t), t
    if kind == "RF":
        p = model.params
        kwh = forest.predict_forest(list(p["trees"]), X, p["y_min"], p["y_max"])
        return kwh, s.transform_target(kwh)
    t = neural.forward(model.params, s.transform(X))
    return s.inverse_target(t), t


def _layout_to_dict(layout: ColumnLayout) -> dict:
    return {
        "n_columns": layout.n_columns,
        "numeric": list(layout.numeric),
        "blocks": [list(b) for b in layout.blocks],
        "binary": list(layout.binary),
        "redundant": list(layout.redundant),
    }


def _layout_from_dict(d: dict) -> ColumnLayout:
    return ColumnLayout(
        d["n_columns"],
        tuple(d["numeric"]),
        tuple(tuple(b) for b in d["blocks"]),
        tuple(d["binary"]),
        tuple(d["redundant"]),
    )


def model_to_dict(model: TrainedModel) -> dict:
    p = model.params
    if model.spec.kind == "RF":
        params = {"trees": [t.to_dict() for t in p["trees"]], "y_min": p["y_min"], "y_max": p["y_max"]}
    else:
        params = {k: v.tolist() for k, v in p.items()}
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_FORMAT_VERSION,
        "spec": model.spec.to_dict(),
        "layout": _layout_to_dict(model.layout),
        "scaler": model.scaler.to_dict(),
        "train_start": model.train_start.isoformat() if model.train_start else None,
        "train_end": model.train_end.isoformat() if model.train_end else None,
        "n_train": model.n_train,
        "train_loss": None if math.isnan(model.train_loss) else model.train_loss,
        "parameters": params,
    }


def model_from_dict(d: dict) -> TrainedModel:
    if d.get("format") != MODEL_FORMAT:
        raise ValueError("not a serialized baseline model")
    if d.get("version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {d.get('version')}")
    spec = ModelSpec.from_dict(d["spec"])
    raw = d["parameters"]
    if spec.kind == "RF":
        params = {
            "trees": tuple(forest.Tree.from_dict(t) for t in raw["trees"]),
            "y_min": float(raw["y_min"]),
            "y_max": float(raw["y_max"]),
        }
    else:
        params = {k: _freeze(np.asarray(v, dtype=float)) for k, v in raw.items()}
    as_date = lambda s: date.fromisoformat(s) if s else None  # noqa: E731
    return TrainedModel(
        spec=spec,
        layout=_layout_from_dict(d["layout"]),
        scaler=Scaler.from_dict(d["scaler"]),
        params=params,
        train_start=as_date(d["train_start"]),
        train_end=as_date(d["train_end"]),
        n_train=int(d["n_train"]),
        train_loss=math.nan if d["train_loss"] is None else float(d["train_loss"]),
    )


def save_model(model: TrainedModel, out: TextIO) -> None:
    json.dump(model_to_dict(model), out, indent=1, sort_keys=True)


def load_model(source: TextIO) -> TrainedModel:
    return model_from_dict(json.load(source))


