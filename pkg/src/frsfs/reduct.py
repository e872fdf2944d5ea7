"""Dependency degree and reduct search on top of lower memberships.

The lower membership of a sample only depends on samples carrying a
different label (an identical label gives implicator value 1), and
identical (row, label) patterns share one membership. The search engine
therefore works on deduplicated patterns, one cross-label block at a time,
and keeps running sums of per-feature similarities so that adding or
removing a feature costs one pass over each block.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numba import njit

from .dataset import NormalizedDataset
from .errors import DegenerateLabels, EmptySubset, TooManyFeatures
from .fuzzy import EPS

MODES = ("quickreduct", "core", "exhaustive")


@njit(cache=True)
def _block_minima(S, xa, xb, sign, offset, rl, row_min, col_min):
    # relation = max(0, S + sign * sim - offset); keep min of (rl - relation)
    ga, gb = S.shape
    for i in range(ga):
        a = xa[i]
        for j in range(gb):
            s = S[i, j]
            if sign != 0.0:
                d = a - xb[j]
                sim = 1.0 - d * d
                if sim < 0.0:
                    sim = 0.0
                s += sign * sim
            r = s - offset
            if r < 0.0:
                r = 0.0
            v = rl - r
            if v < row_min[i]:
                row_min[i] = v
            if v < col_min[j]:
                col_min[j] = v


@njit(cache=True)
def _block_accumulate(S, xa, xb, sign):
    ga, gb = S.shape
    for i in range(ga):
        a = xa[i]
        for j in range(gb):
            d = a - xb[j]
            sim = 1.0 - d * d
            if sim < 0.0:
                sim = 0.0
            S[i, j] += sign * sim


class DependencyEngine:
    """Lower memberships and dependency degrees for one normalised dataset."""

    def __init__(self, ds: NormalizedDataset):
        self.ds = ds
        self.n = ds.n
        self.names = ds.feature_names
        key = np.column_stack([ds.label_codes.astype(np.float64), ds.X])
        uniq, inverse = np.unique(key, axis=0, return_inverse=True)
        self.inverse = inverse.reshape(-1)
        k = len(ds.classes)
        codes = uniq[:, 0].astype(np.int64)
        self.patterns = np.ascontiguousarray(uniq[:, 1:])
        self.groups = [np.flatnonzero(codes == c) for c in range(k)]
        scaled = np.arange(k) / (k - 1) if k > 1 else np.zeros(1)
        self.blocks = []
        for a, b in itertools.combinations(range(k), 2):
            if len(self.groups[a]) and len(self.groups[b]):
                rl = max(0.0, 1.0 - (scaled[a] - scaled[b]) ** 2)
                self.blocks.append((a, b, rl))
        self._cols = [np.ascontiguousarray(self.patterns[:, j]) for j in range(self.patterns.shape[1])]

    def empty_sums(self):
        return [np.zeros((len(self.groups[a]), len(self.groups[b]))) for a, b, _ in self.blocks]

    def sums(self, subset_idx: Sequence[int]):
        S = self.empty_sums()
        for j in subset_idx:
            self.accumulate(S, j, 1.0)
        return S

    def accumulate(self, S, j: int, sign: float = 1.0) -> None:
        col = self._cols[j]
        for blk, (a, b, _) in zip(S, self.blocks):
            _block_accumulate(blk, col[self.groups[a]], col[self.groups[b]], sign)

    def pattern_lower(self, S, k: int, j: int | None = None, sign: float = 1.0) -> np.ndarray:
        """Per-pattern lower membership for the subset summed in ``S`` (size k),
        optionally with feature ``j`` added (sign=+1) or removed (sign=-1)."""
        mins = np.full(len(self.patterns), np.inf)
        if j is None:
            sgn, col, k_eff = 0.0, self._cols[0] if self._cols else np.zeros(len(self.patterns)), k
        else:
            sgn, col, k_eff = sign, self._cols[j], k + int(sign)
        offset = float(k_eff - 1)
        for blk, (a, b, rl) in zip(S, self.blocks):
            ga, gb = self.groups[a], self.groups[b]
            row_min = np.full(len(ga), np.inf)
            col_min = np.full(len(gb), np.inf)
            _block_minima(blk, col[ga], col[gb], sgn, offset, rl, row_min, col_min)
            np.minimum.at(mins, ga, row_min)
            np.minimum.at(mins, gb, col_min)
        return np.minimum(1.0, 1.0 + mins)

    def sample_lower(self, S, k, j=None, sign=1.0) -> np.ndarray:
        return self.pattern_lower(S, k, j, sign)[self.inverse]

    def gamma_from(self, S, k, j=None, sign=1.0) -> float:
        return math.fsum(self.sample_lower(S, k, j, sign)) / self.n

    def index(self, subset: Sequence[str]) -> list[int]:
        return self.ds.index_of(subset)

    def gamma(self, subset: Sequence[str]) -> float:
        idx = self.index(subset)
        return self.gamma_from(self.sums(idx), len(idx))

    def lower(self, subset: Sequence[str]) -> np.ndarray:
        idx = self.index(subset)
        return self.sample_lower(self.sums(idx), len(idx))


def _require_subset(subset):
    subset = tuple(subset)
    if not subset:
        raise EmptySubset("feature subset must be nonempty")
    return subset


def _require_labels(ds):
    if len(ds.classes) < 2:
        raise DegenerateLabels(f"{ds.name}: needs at least two distinct labels")


def dependency_degree(ds: NormalizedDataset, subset: Sequence[str]) -> float:
    """Mean lower membership over all samples."""
    return DependencyEngine(ds).gamma(_require_subset(subset))


def positive_samples(ds: NormalizedDataset, subset: Sequence[str]) -> np.ndarray:
    """Indices whose lower membership exceeds EPS."""
    mu = DependencyEngine(ds).lower(_require_subset(subset))
    return np.flatnonzero(mu > EPS)


@dataclass(frozen=True)
class Reduct:
    selected: tuple[str, ...]
    gamma: float
    gamma_full: float
    trace: tuple[tuple[str, float], ...] = ()
    mode: str = "quickreduct"
    dataset: str = ""
    universe: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "mode": self.mode,
            "selected": list(self.selected),
            "gamma": self.gamma,
            "gamma_full": self.gamma_full,
            "trace": [{"feature": f, "gamma": g} for f, g in self.trace],
            "universe": list(self.universe),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> "Reduct":
        return cls(
            selected=tuple(doc["selected"]),
            gamma=float(doc.get("gamma", float("nan"))),
            gamma_full=float(doc.get("gamma_full", float("nan"))),
            trace=tuple((t["feature"], float(t["gamma"])) for t in doc.get("trace", [])),
            mode=doc.get("mode", doc.get("method", "quickreduct")),
            dataset=doc.get("dataset", ""),
            universe=tuple(doc.get("universe", ())),
        )


def quickreduct(ds: NormalizedDataset, stop_on_plateau: bool = False) -> Reduct:
    """Greedy forward search for a subset matching the full dependency degree.

    Each step adds the feature giving the largest dependency degree, the
    earliest feature winning ties. A step that cannot raise the degree
    still adds the best candidate unless ``stop_on_plateau`` is set, so
    jointly informative features (XOR-like) are not missed.
    """
    _require_labels(ds)
    eng = DependencyEngine(ds)
    d = ds.d
    gamma_full = eng.gamma_from(eng.sums(range(d)), d)
    S, chosen = eng.empty_sums(), []
    g = eng.gamma_from(S, 0)
    trace = []
    while len(chosen) < d and g < gamma_full - EPS:
        best_j, best_g = None, -np.inf
        for j in range(d):
            if j in chosen:
                continue
            gj = eng.gamma_from(S, len(chosen), j, 1.0)
            if gj > best_g + 1e-12:
                best_j, best_g = j, gj
        if stop_on_plateau and best_g <= g + EPS:
            break
        eng.accumulate(S, best_j, 1.0)
        chosen.append(best_j)
        g = best_g
        trace.append((ds.feature_names[best_j], g))
    return Reduct(tuple(ds.feature_names[j] for j in chosen), g, gamma_full, tuple(trace),
                  "quickreduct", ds.name, ds.feature_names)


def core_features(ds: NormalizedDataset) -> tuple[str, ...]:
    """Features whose removal demotes some sample's lower membership to <= EPS."""
    _require_labels(ds)
    eng = DependencyEngine(ds)
    d = ds.d
    S = eng.sums(range(d))
    base = int(np.count_nonzero(eng.sample_lower(S, d) > EPS))
    core = []
    for j in range(d):
        mu = eng.sample_lower(S, d, j, -1.0)
        if np.count_nonzero(mu > EPS) < base:
            core.append(ds.feature_names[j])
    return tuple(core)


def core_reduct(ds: NormalizedDataset) -> Reduct:
    eng = DependencyEngine(ds)
    core = core_features(ds)
    gamma = eng.gamma(core) if core else eng.gamma_from(eng.empty_sums(), 0)
    return Reduct(core, gamma, eng.gamma(ds.feature_names), (), "core", ds.name,
                  ds.feature_names)


def exhaustive_reduct(ds: NormalizedDataset, max_features: int = 14) -> Reduct:
    """Smallest subset reaching the full dependency degree (first in
    lexicographic feature order among equals). Exponential; for tests."""
    if max_features > 14 or ds.d > max_features:
        raise TooManyFeatures(f"{ds.d} features exceeds limit {min(max_features, 14)}")
    eng = DependencyEngine(ds)
    d = ds.d
    gamma_full = eng.gamma_from(eng.sums(range(d)), d)
    for size in range(d + 1):
        for combo in itertools.combinations(range(d), size):
            g = eng.gamma_from(eng.sums(combo), size)
            if g >= gamma_full - EPS:
                names = tuple(ds.feature_names[j] for j in combo)
                return Reduct(names, g, gamma_full, (), "exhaustive", ds.name, ds.feature_names)
    raise AssertionError("full feature set always qualifies")
