"""Comparison selectors: information gain ranking, correlation-based feature
subset (CFS) and decision tree + wrapper elimination (DW)."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .classifiers import ClassifierSpec, train
from .crossval import cross_val_predict
from .dataset import Dataset, NormalizedDataset, normalize
from .errors import DegenerateLabels, InputError


@dataclass(frozen=True)
class RankedFeatures:
    ranking: tuple[tuple[str, float], ...]
    method: str
    selected: tuple[str, ...] = ()
    dataset: str = ""
    universe: tuple[str, ...] = ()

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.ranking)

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "method": self.method,
            "selected": list(self.selected),
            "ranking": [{"feature": n, "score": s} for n, s in self.ranking],
            "universe": list(self.universe),
        }


def _rank(names, scores):
    order = sorted(range(len(names)), key=lambda i: (-scores[i], i))
    return tuple((names[i], float(scores[i])) for i in order)


def _require_labels(ds):
    if len(ds.classes) < 2:
        raise DegenerateLabels(f"{ds.name}: needs at least two distinct labels")


def discretize(ds: Dataset, bins: int = 10) -> np.ndarray:
    """Integer codes per column; continuous columns are cut into equal-width bins."""
    if bins < 1:
        raise InputError("bins must be positive")
    out = np.empty(ds.X.shape, dtype=np.int64)
    for j, f in enumerate(ds.features):
        v = ds.X[:, j]
        if f.kind == "continuous":
            lo, hi = v.min(), v.max()
            if hi == lo:
                out[:, j] = 0
            else:
                out[:, j] = np.minimum(((v - lo) / (hi - lo) * bins).astype(np.int64), bins - 1)
        else:
            out[:, j] = np.unique(v, return_inverse=True)[1].reshape(-1)
    return out


def _codes(values) -> np.ndarray:
    return np.unique(np.asarray(values), return_inverse=True)[1].reshape(-1)


def entropy(codes) -> float:
    """Shannon entropy in bits of a discrete sample."""
    counts = np.bincount(_codes(codes))
    p = counts[counts > 0] / counts.sum()
    return float(-np.sum(p * np.log2(p)))


def conditional_entropy(y, x) -> float:
    """H(y | x) in bits."""
    yc, xc = _codes(y), _codes(x)
    n = len(yc)
    total = 0.0
    for v in np.unique(xc):
        mask = xc == v
        total += mask.sum() / n * entropy(yc[mask])
    return total


def info_gain(y, x) -> float:
    return max(0.0, entropy(y) - conditional_entropy(y, x))


def symmetrical_uncertainty(x, y) -> float:
    hx, hy = entropy(x), entropy(y)
    if hx + hy == 0:
        return 0.0
    return 2.0 * info_gain(y, x) / (hx + hy)


def info_gain_rank(ds: Dataset, bins: int = 10, threshold: str | float = "mean") -> RankedFeatures:
    """Rank by H(label) - H(label | feature).

    ``threshold="mean"`` keeps features scoring strictly above the mean
    score; a number keeps features scoring strictly above it.
    """
    _require_labels(ds)
    codes = discretize(ds, bins)
    scores = [info_gain(ds.labels, codes[:, j]) for j in range(ds.d)]
    cut = float(np.mean(scores)) if threshold == "mean" else float(threshold)
    ranking = _rank(ds.feature_names, scores)
    selected = tuple(n for n, s in ranking if s > cut)
    return RankedFeatures(ranking, "ig", selected, ds.name, ds.feature_names)


def cfs_merit(subset, r_cf, r_ff) -> float:
    """k * mean(feature-class) / sqrt(k + k(k-1) * mean(feature-feature))."""
    subset = list(subset)
    k = len(subset)
    if k == 0:
        return 0.0
    num = float(np.sum(r_cf[subset]))
    pair = float(np.sum(r_ff[np.ix_(subset, subset)]) - np.trace(r_ff[np.ix_(subset, subset)]))
    den = math.sqrt(k + pair)
    return num / den if den > 0 else 0.0


def cfs_correlations(ds: Dataset, bins: int = 10):
    codes = discretize(ds, bins)
    d = ds.d
    r_cf = np.array([symmetrical_uncertainty(codes[:, j], ds.labels) for j in range(d)])
    r_ff = np.eye(d)
    for i in range(d):
        for j in range(i + 1, d):
            r_ff[i, j] = r_ff[j, i] = symmetrical_uncertainty(codes[:, i], codes[:, j])
    return r_cf, r_ff


def cfs_select(ds: Dataset, bins: int = 10, max_stale: int = 5) -> RankedFeatures:
    """Best-first forward search over subsets maximising the CFS merit.

    Stops after ``max_stale`` consecutive expansions that fail to improve
    the best merit. ``ranking`` lists each feature's class correlation.
    """
    _require_labels(ds)
    if ds.d < 2:
        raise InputError("CFS needs at least two features")
    r_cf, r_ff = cfs_correlations(ds, bins)
    best, best_merit = (), 0.0
    heap = [(-0.0, (), ())]
    seen = {()}
    stale = 0
    while heap and stale < max_stale:
        _, _, subset = heapq.heappop(heap)
        improved = False
        for f in range(ds.d):
            if f in subset:
                continue
            child = tuple(sorted(subset + (f,)))
            if child in seen:
                continue
            seen.add(child)
            merit = cfs_merit(child, r_cf, r_ff)
            heapq.heappush(heap, (-merit, child, child))
            if merit > best_merit + 1e-12:
                best, best_merit, improved = child, merit, True
        stale = 0 if improved else stale + 1
    names = ds.feature_names
    return RankedFeatures(_rank(names, list(r_cf)), "cfs", tuple(names[j] for j in best),
                          ds.name, names)


def tree_importance(ds: NormalizedDataset, seed: int = 0) -> tuple[tuple[str, float], ...]:
    """Total impurity decrease per feature in one unpruned CART tree."""
    spec = ClassifierSpec("random_forest", {"n_trees": 1, "bootstrap": False,
                                            "max_features": "all"}, seed)
    imp = train(spec, ds).feature_importance()
    return _rank(ds.feature_names, [imp[n] for n in ds.feature_names])


def cv_accuracy(spec: ClassifierSpec, ds: Dataset, features, k: int = 3, seed: int = 0) -> float:
    def fit_predict(tr, te):
        return train(spec, tr, features).predict_dataset(te)

    pred = cross_val_predict(fit_predict, ds, k, seed)
    return float(np.mean(pred == ds.labels))


def dw_select(ds: Dataset, evaluator: ClassifierSpec | None = None, delta: float = 0.005,
              k: int = 3, seed: int = 0) -> RankedFeatures:
    """Decision-tree ranking followed by wrapper backward elimination.

    The lowest-ranked surviving feature is dropped while the cross-validated
    accuracy stays within ``delta`` of the all-features accuracy
    (improvements count as no drop). ``delta >= 1`` accepts every removal.
    """
    _require_labels(ds)
    nds = ds if isinstance(ds, NormalizedDataset) else normalize(ds)
    evaluator = evaluator or ClassifierSpec("random_forest", seed=seed)
    ranking = tree_importance(nds, seed)
    current = [n for n, _ in ranking]
    reference = cv_accuracy(evaluator, nds, current, k, seed)
    while len(current) > 1:
        candidate = current[:-1]
        acc = cv_accuracy(evaluator, nds, candidate, k, seed)
        drop = max(0.0, reference - acc)
        if drop < delta or delta >= 1.0:
            current = candidate
        else:
            break
    kept = set(current)
    selected = tuple(n for n in ds.feature_names if n in kept)
    return RankedFeatures(ranking, "dw", selected, ds.name, ds.feature_names)
