"""Common training / prediction contract for the three classifiers.

Columns are put into sorted-name order before fitting, so a model is
unaffected by the column order of its training data and the seeded
initialisation is tied to feature names rather than positions.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..dataset import Dataset
from ..errors import ArityMismatch, DegenerateLabels, EmptySubset, InputError, NonFiniteValue
from .forest import fit_forest, forest_votes, predict_forest
from .mlp import fit_mlp, predict_mlp
from .smo import fit_smo, predict_smo

MODEL_FORMAT = 1

KINDS = ("mlp", "random_forest", "smo")
KIND_ALIASES = {"rf": "random_forest", "forest": "random_forest", "svm": "smo"}

DEFAULTS = {
    "random_forest": {"n_trees": 100, "max_features": "sqrt", "max_depth": None,
                      "min_samples_split": 2, "bootstrap": True},
    "mlp": {"hidden": None, "learning_rate": 0.3, "momentum": 0.2, "epochs": 500,
            "batch_size": 16},
    "smo": {"C": 1.0, "tol": 1e-3, "max_iter": 100_000},
}


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("FRSFS_THREADS", "1")))
    except ValueError:
        return 1


def _check_params(kind, p):
    if kind == "random_forest":
        ok = p["n_trees"] >= 1 and p["min_samples_split"] >= 2 and \
            (p["max_depth"] is None or p["max_depth"] >= 0)
    elif kind == "mlp":
        ok = 0 < p["learning_rate"] <= 10 and 0 <= p["momentum"] < 1 and p["epochs"] >= 1 \
            and p["batch_size"] >= 1 and (p["hidden"] is None or p["hidden"] >= 1)
    else:
        ok = p["C"] > 0 and p["tol"] > 0 and p["max_iter"] >= 1
    if not ok:
        raise InputError(f"hyperparameters out of range for {kind}: {p}")


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        kind = KIND_ALIASES.get(self.kind, self.kind)
        if kind not in KINDS:
            raise InputError(f"unknown classifier {self.kind!r}")
        unknown = set(self.params) - set(DEFAULTS[kind])
        if unknown:
            raise InputError(f"unknown {kind} hyperparameters: {sorted(unknown)}")
        merged = {**DEFAULTS[kind], **self.params}
        _check_params(kind, merged)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", merged)

    def to_dict(self):
        return {"kind": self.kind, "params": dict(self.params), "seed": self.seed}


@dataclass(frozen=True, eq=False)
class Model:
    kind: str
    params: dict
    feature_names: tuple[str, ...]
    classes: tuple[str, ...]
    state: dict
    seed: int = 0

    @property
    def _order(self):
        return np.argsort(np.array(self.feature_names, dtype=object), kind="stable")

    def codes(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != len(self.feature_names):
            raise ArityMismatch(f"model expects {len(self.feature_names)} features, got {X.shape[1]}")
        if not np.all(np.isfinite(X)):
            raise NonFiniteValue("prediction input contains non-finite values")
        Xc = X[:, self._order]
        k = len(self.classes)
        if self.kind == "random_forest":
            return predict_forest(self.state, Xc, k)
        if self.kind == "smo":
            return predict_smo(self.state, Xc, k)
        return predict_mlp(self.state, Xc, k)

    def predict_rows(self, X) -> np.ndarray:
        return np.array(self.classes, dtype=object)[self.codes(X)]

    def predict_dataset(self, ds: Dataset) -> np.ndarray:
        return self.predict_rows(ds.X[:, ds.index_of(self.feature_names)])

    def feature_importance(self) -> dict[str, float]:
        if self.kind != "random_forest":
            raise InputError("feature importance is only defined for random forests")
        sorted_names = [self.feature_names[i] for i in self._order]
        return dict(zip(sorted_names, map(float, self.state["importance"])))

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "kind": self.kind,
            "params": self.params,
            "seed": self.seed,
            "feature_names": list(self.feature_names),
            "classes": list(self.classes),
            "state": _to_jsonable(self.state),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Model":
        if doc.get("format") != MODEL_FORMAT:
            raise InputError(f"unsupported model format {doc.get('format')!r}")
        return cls(doc["kind"], doc["params"], tuple(doc["feature_names"]), tuple(doc["classes"]),
                   _from_jsonable(doc["state"]), doc.get("seed", 0))


def _to_jsonable(obj):
    if isinstance(obj, np.ndarray):
        return {"__array__": obj.tolist(), "dtype": str(obj.dtype)}
    if isinstance(obj, dict):
        return {k: _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _from_jsonable(obj):
    if isinstance(obj, dict):
        if "__array__" in obj:
            return np.array(obj["__array__"], dtype=obj["dtype"])
        return {k: _from_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_from_jsonable(v) for v in obj]
    return obj


def save_model(model: Model, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model.to_dict(), fh)


def load_model(path) -> Model:
    with open(path, encoding="utf-8") as fh:
        return Model.from_dict(json.load(fh))


def train(spec: ClassifierSpec, ds: Dataset, features: Sequence[str] | None = None,
          n_jobs: int | None = None) -> Model:
    """Fit ``spec`` on ``ds`` restricted to ``features`` (all when None)."""
    features = tuple(ds.feature_names if features is None else features)
    if not features:
        raise EmptySubset("cannot train on an empty feature subset")
    classes = ds.classes
    if len(classes) < 2:
        raise DegenerateLabels(f"{ds.name}: training needs at least two labels")
    X = ds.X[:, ds.index_of(features)]
    if not np.all(np.isfinite(X)):
        raise NonFiniteValue("training data contains non-finite values")
    lookup = {c: i for i, c in enumerate(classes)}
    y = np.array([lookup[v] for v in ds.labels], dtype=np.int64)
    model = Model(spec.kind, dict(spec.params), features, classes, {}, spec.seed)
    Xc = np.ascontiguousarray(X[:, model._order])
    k = len(classes)
    if spec.kind == "random_forest":
        state = fit_forest(Xc, y, k, spec.params, spec.seed, n_jobs or default_jobs())
    elif spec.kind == "smo":
        state = fit_smo(Xc, y, k, spec.params)
    else:
        state = fit_mlp(Xc, y, k, spec.params, spec.seed)
    return Model(spec.kind, dict(spec.params), features, classes, state, spec.seed)


def predict(model: Model, row) -> str:
    """Label for a single row of normalised feature values."""
    row = np.asarray(row, dtype=np.float64)
    if row.ndim != 1:
        raise ArityMismatch("predict expects a single row")
    return str(model.predict_rows(row[None, :])[0])


__all__ = ["ClassifierSpec", "Model", "train", "predict", "save_model", "load_model",
           "DEFAULTS", "KINDS", "forest_votes"]
