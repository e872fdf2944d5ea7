"""Crisp and fuzzy rough-set primitives.

Everything here works on plain numpy arrays and scalars. The operators
validate that their inputs lie in [0, 1]; the matrix builders trust the
:class:`~frsfs.dataset.NormalizedDataset` invariant instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .dataset import Dataset, NormalizedDataset
from .errors import (
    ArityMismatch,
    DimensionMismatch,
    EmptyInput,
    EmptySubset,
    NonDiscreteFeature,
    OutOfRange,
)

# Threshold for "greater than zero" on memberships and dependency degrees.
EPS = 1e-9


class _LabelsSentinel:
    def __repr__(self):
        return "LABELS"


LABELS = _LabelsSentinel()


def _unit(*values):
    out = []
    for v in values:
        a = np.asarray(v, dtype=np.float64)
        if np.any(np.isnan(a)) or np.any(a < 0.0) or np.any(a > 1.0):
            raise OutOfRange(f"value outside [0, 1]: {v!r}")
        out.append(a)
    return out


def _scalar(a):
    return float(a) if np.ndim(a) == 0 else a


def per_feature_similarity(x, y):
    """max(0, 1 - (x - y)^2) for normalised values x, y."""
    x, y = _unit(x, y)
    return _scalar(np.maximum(0.0, 1.0 - (x - y) ** 2))


def lukasiewicz_tnorm(x, y):
    """max(0, x + y - 1), evaluated as lo - (1 - hi) so that t(x, 1) is
    exactly x and argument order cannot change the rounding."""
    x, y = _unit(x, y)
    lo, hi = np.minimum(x, y), np.maximum(x, y)
    return _scalar(np.maximum(0.0, lo - (1.0 - hi)))


def implicator(q, s):
    """Lukasiewicz implicator min(1, 1 - q + s)."""
    q, s = _unit(q, s)
    return _scalar(np.minimum(1.0, 1.0 - q + s))


def tnorm_fold(values: Sequence[float]) -> float:
    """Left fold of the Lukasiewicz t-norm over a nonempty sequence."""
    values = list(values)
    if not values:
        raise EmptyInput("tnorm_fold needs at least one value")
    _unit(values)
    return float(reduce(lambda acc, v: max(0.0, acc + v - 1.0), values[1:], float(values[0])))


def tnorm_closed_form(values: Sequence[float]) -> float:
    """Equivalent of :func:`tnorm_fold`: max(0, sum(v) - (k - 1))."""
    values = list(values)
    if not values:
        raise EmptyInput("tnorm_closed_form needs at least one value")
    _unit(values)
    return max(0.0, float(np.sum(values)) - (len(values) - 1))


def crisp_relation(a, b) -> int:
    """1 when rows agree on every feature, else 0."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ArityMismatch(f"rows of arity {a.shape} and {b.shape}")
    return int(np.array_equal(a, b))


@dataclass(frozen=True)
class CrispPartition:
    classes: tuple[tuple[int, ...], ...]
    lower: tuple[int, ...]  # indices into ``classes``
    upper: tuple[int, ...]

    def lower_samples(self) -> set[int]:
        return {i for c in self.lower for i in self.classes[c]}

    def upper_samples(self) -> set[int]:
        return {i for c in self.upper for i in self.classes[c]}


def crisp_approximations(ds: Dataset | np.ndarray, decision) -> CrispPartition:
    """Equivalence classes of identical rows and their approximation sets.

    ``decision`` is either a per-sample sequence of values or a callable on
    the sample index; a sample is inside the boundary when its value is <= 0.
    """
    if isinstance(ds, Dataset):
        cont = [f.name for f in ds.features if f.kind == "continuous"]
        if cont:
            raise NonDiscreteFeature(f"continuous features: {', '.join(cont)}")
        X = ds.X
    else:
        X = np.asarray(ds, dtype=np.float64)
        if not np.all(np.floor(X) == X):
            raise NonDiscreteFeature("rows must hold discrete codes")
    n = X.shape[0]
    f = decision if callable(decision) else (lambda i, _v=np.asarray(decision): _v[i])
    inside = np.array([f(i) <= 0 for i in range(n)], dtype=bool)
    _, first, inverse = np.unique(X, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.reshape(-1)
    order = np.argsort(first, kind="stable")  # classes by first appearance
    classes = tuple(tuple(np.flatnonzero(inverse == k).tolist()) for k in order)
    lower = tuple(c for c, members in enumerate(classes) if all(inside[i] for i in members))
    upper = tuple(c for c, members in enumerate(classes) if any(inside[i] for i in members))
    return CrispPartition(classes, lower, upper)


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    values: np.ndarray
    subset: tuple[str, ...]
    over_labels: bool = False

    @property
    def n(self) -> int:
        return self.values.shape[0]


def similarity_block(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Fuzzy relation between rows of A and rows of B (columns = features).

    Uses the closed form of the t-norm fold, so an empty column set yields
    the all-ones relation.
    """
    k = A.shape[1]
    total = np.zeros((A.shape[0], B.shape[0]))
    for j in range(k):
        total += np.maximum(0.0, 1.0 - (A[:, j, None] - B[None, :, j]) ** 2)
    return np.maximum(0.0, total - (k - 1))


def relation_matrix(ds: NormalizedDataset, subset) -> SimilarityMatrix:
    """Pairwise fuzzy similarity over ``subset`` (feature names) or LABELS."""
    if subset is LABELS:
        v = ds.label_values[:, None]
        return SimilarityMatrix(similarity_block(v, v), (), over_labels=True)
    subset = tuple(subset)
    if not subset:
        raise EmptySubset("relation_matrix needs at least one feature")
    A = ds.X[:, ds.index_of(subset)]
    return SimilarityMatrix(similarity_block(A, A), subset)


@dataclass(frozen=True, eq=False)
class MembershipVector:
    mu_lower: np.ndarray
    mu_upper: np.ndarray
    subset: tuple[str, ...]


def memberships(r_f: SimilarityMatrix, r_l: SimilarityMatrix) -> MembershipVector:
    """Lower (inf of implicator) and upper (sup of t-norm) memberships.

    The sample itself is excluded; with a single sample the empty sup is 0
    and the empty inf is 1.
    """
    F, L = r_f.values, r_l.values
    if F.shape != L.shape or F.shape[0] != F.shape[1]:
        raise DimensionMismatch(f"relation shapes {F.shape} and {L.shape}")
    n = F.shape[0]
    if n == 1:
        return MembershipVector(np.ones(1), np.zeros(1), r_f.subset)
    off = ~np.eye(n, dtype=bool)
    t = np.where(off, np.maximum(0.0, F + L - 1.0), -np.inf)
    imp = np.where(off, np.minimum(1.0, 1.0 - F + L), np.inf)
    return MembershipVector(imp.min(axis=1), t.max(axis=1), r_f.subset)


def dataset_memberships(ds: NormalizedDataset, subset: Sequence[str]) -> MembershipVector:
    return memberships(relation_matrix(ds, subset), relation_matrix(ds, LABELS))
