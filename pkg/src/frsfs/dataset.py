"""Tabular dataset model, CSV/ARFF loaders, [0, 1] normalisation and
cross-dataset feature alignment."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.io import arff

from .errors import (
    EmptyFile,
    InputError,
    MalformedHeader,
    MissingValue,
    RaggedRow,
    UnknownFeatureInAlias,
    UnknownLabelColumn,
    UnsupportedAttributeType,
)

KINDS = ("binary", "categorical", "discrete", "continuous")

FEATURE_CLASSES = {
    1: "address-bar",
    2: "abnormal",
    3: "html-javascript",
    4: "domain",
}

MISSING_TOKENS = frozenset({"", "?", "na", "nan", "null"})


@dataclass(frozen=True)
class FeatureDescriptor:
    name: str
    kind: str
    feature_class: int | None = None
    observed_min: float = 0.0
    observed_max: float = 0.0
    # code domain for binary/categorical features, ascending
    codes: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown feature kind {self.kind!r}")
        if self.feature_class is not None and self.feature_class not in FEATURE_CLASSES:
            raise InputError(f"feature class must be 1-4, got {self.feature_class}")
        if self.observed_min > self.observed_max:
            raise InputError(f"{self.name}: observed_min > observed_max")
        if self.kind == "binary" and self.codes is not None and len(self.codes) > 2:
            raise InputError(f"{self.name}: binary feature with {len(self.codes)} codes")


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable samples x features table plus one decision column."""

    name: str
    features: tuple[FeatureDescriptor, ...]
    X: np.ndarray
    labels: np.ndarray
    label_name: str = "label"

    def __post_init__(self):
        X = np.array(self.X, dtype=np.float64, copy=True)
        if X.ndim == 1:
            X = X.reshape(-1, len(self.features))
        labels = np.array([str(v) for v in self.labels], dtype=object)
        object.__setattr__(self, "features", tuple(self.features))
        if X.shape[0] == 0:
            raise EmptyFile(f"{self.name}: dataset has no samples")
        if X.shape[1] != len(self.features):
            raise RaggedRow(0, len(self.features), X.shape[1])
        if labels.shape[0] != X.shape[0]:
            raise InputError(f"{self.name}: {labels.shape[0]} labels for {X.shape[0]} rows")
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            raise InputError(f"{self.name}: duplicate feature names")
        bad = np.argwhere(~np.isfinite(X))
        if len(bad):
            r, c = bad[0]
            raise MissingValue(int(r), names[c])
        X.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.features)

    @property
    def classes(self) -> tuple[str, ...]:
        return sort_labels(set(self.labels))

    def index_of(self, names: Iterable[str]) -> list[int]:
        lookup = {f.name: i for i, f in enumerate(self.features)}
        try:
            return [lookup[name] for name in names]
        except KeyError as exc:
            raise InputError(f"{self.name}: unknown feature {exc.args[0]!r}") from None

    def select(self, names: Sequence[str]) -> "Dataset":
        idx = self.index_of(names)
        return replace(self, features=tuple(self.features[i] for i in idx), X=self.X[:, idx])

    def take(self, rows) -> "Dataset":
        rows = np.asarray(rows)
        return replace(self, X=self.X[rows], labels=self.labels[rows])

    def rename(self, mapping: Mapping[str, str]) -> "Dataset":
        feats = tuple(replace(f, name=mapping.get(f.name, f.name)) for f in self.features)
        return replace(self, features=feats)

    def relabel(self, mapping: Mapping[str, str]) -> "Dataset":
        return replace(self, labels=np.array([mapping.get(v, v) for v in self.labels], dtype=object))

    def same_values(self, other: "Dataset") -> bool:
        return (
            self.features == other.features
            and self.X.shape == other.X.shape
            and bool(np.array_equal(self.X, other.X))
            and list(self.labels) == list(other.labels)
        )


@dataclass(frozen=True, eq=False)
class NormalizedDataset(Dataset):
    """Dataset whose feature values all lie in [0, 1].

    ``label_codes`` are 0..k-1 in :func:`sort_labels` order of ``classes``;
    ``label_values`` spreads them evenly over [0, 1].
    """

    label_codes: np.ndarray = field(default=None)

    def __post_init__(self):
        super().__post_init__()
        if self.X.size and (self.X.min() < 0.0 or self.X.max() > 1.0):
            raise InputError(f"{self.name}: normalised values outside [0, 1]")
        codes = self.label_codes
        if codes is None:
            lookup = {c: i for i, c in enumerate(self.classes)}
            codes = np.array([lookup[v] for v in self.labels], dtype=np.int64)
        codes = np.asarray(codes, dtype=np.int64).copy()
        codes.setflags(write=False)
        object.__setattr__(self, "label_codes", codes)

    def take(self, rows) -> "NormalizedDataset":
        rows = np.asarray(rows)
        return replace(self, X=self.X[rows], labels=self.labels[rows], label_codes=None)

    def relabel(self, mapping: Mapping[str, str]) -> "NormalizedDataset":
        labels = np.array([mapping.get(v, v) for v in self.labels], dtype=object)
        return replace(self, labels=labels, label_codes=None)

    @property
    def label_values(self) -> np.ndarray:
        k = len(self.classes)
        if k < 2:
            return np.zeros(self.n)
        return self.label_codes / (k - 1)


def sort_labels(values: Iterable[str]) -> tuple[str, ...]:
    """Numeric order when every label parses as a number, else lexicographic."""
    values = list(values)
    try:
        return tuple(sorted(values, key=lambda v: (float(v), v)))
    except ValueError:
        return tuple(sorted(values))


def _is_integral(values: np.ndarray) -> bool:
    return bool(np.all(np.floor(values) == values))


def infer_kind(values: np.ndarray, max_categories: int = 10) -> str:
    uniq = np.unique(values)
    if _is_integral(uniq):
        if len(uniq) <= 2:
            return "binary"
        consecutive = np.all(np.diff(uniq) == 1)
        if len(uniq) <= max_categories and consecutive:
            return "categorical"
        return "discrete"
    return "continuous"


def describe(name: str, values: np.ndarray, kind: str | None = None,
             feature_class: int | None = None, codes=None) -> FeatureDescriptor:
    kind = kind or infer_kind(values)
    lo, hi = float(values.min()), float(values.max())
    if kind in ("binary", "categorical"):
        observed = np.unique(values)
        if codes is None:
            codes = observed
        codes = tuple(sorted(set(float(c) for c in codes) | set(observed.tolist())))
        if kind == "binary" and len(codes) > 2:
            kind = "categorical"
    else:
        codes = None
    return FeatureDescriptor(name, kind, feature_class, lo, hi, codes)


def from_arrays(X, labels, names: Sequence[str] | None = None, name: str = "data",
                kinds: Mapping[str, str] | None = None, label_name: str = "label") -> Dataset:
    """Build a Dataset from an n x d array and n labels, inferring kinds."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.size == 0:
        raise EmptyFile(f"{name}: dataset has no samples")
    names = list(names) if names is not None else [f"f{j}" for j in range(X.shape[1])]
    kinds = dict(kinds or {})
    feats = tuple(describe(nm, X[:, j], kinds.get(nm)) for j, nm in enumerate(names))
    return Dataset(name, feats, X, np.asarray(labels), label_name)


def _parse_float(token: str, row: int, col: str) -> float:
    if token.strip().lower() in MISSING_TOKENS:
        raise MissingValue(row, col)
    try:
        value = float(token)
    except ValueError:
        raise InputError(f"non-numeric value {token!r} at row {row}, column {col!r}") from None
    if not math.isfinite(value):
        raise MissingValue(row, col)
    return value


def load_csv(path, label_column: str, schema_hints: Mapping[str, str] | None = None,
             drop_columns: Sequence[str] = (), name: str | None = None) -> Dataset:
    """Read a headed CSV file; every non-label column must be numeric."""
    path = Path(path)
    schema_hints = dict(schema_hints or {})
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or not any(h.strip() for h in header):
            raise EmptyFile(f"{path}: no header row")
        header = [h.strip() for h in header]
        if label_column not in header:
            raise UnknownLabelColumn(f"{path}: label column {label_column!r} not in header")
        keep = [i for i, h in enumerate(header) if h != label_column and h not in drop_columns]
        li = header.index(label_column)
        rows, labels = [], []
        for rno, rec in enumerate(reader, start=1):
            if not rec or (len(rec) == 1 and not rec[0].strip()):
                continue
            if len(rec) != len(header):
                raise RaggedRow(rno, len(header), len(rec))
            lab = rec[li].strip()
            if lab.lower() in MISSING_TOKENS:
                raise MissingValue(rno, label_column)
            rows.append([_parse_float(rec[i], rno, header[i]) for i in keep])
            labels.append(lab)
    if not rows:
        raise EmptyFile(f"{path}: no data rows")
    X = np.array(rows, dtype=np.float64).reshape(len(rows), len(keep))
    feats = tuple(describe(header[i], X[:, j], schema_hints.get(header[i]))
                  for j, i in enumerate(keep))
    return Dataset(name or path.stem, feats, X, np.array(labels, dtype=object), label_column)


def _fmt(v: float) -> str:
    return str(int(v)) if float(v).is_integer() and abs(v) < 2 ** 53 else repr(float(v))


def write_csv(ds: Dataset, path) -> None:
    """Write ``ds`` to a path or an open text stream."""
    if hasattr(path, "write"):
        _write_rows(ds, path)
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        _write_rows(ds, fh)


def _write_rows(ds: Dataset, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(list(ds.feature_names) + [ds.label_name])
    for row, lab in zip(ds.X, ds.labels):
        w.writerow([_fmt(v) for v in row] + [lab])


def load_arff(path, label_column: str | None = None, name: str | None = None) -> Dataset:
    """Read an ARFF file with numeric and nominal attributes.

    The label is ``label_column`` if given, else an attribute called
    ``Result`` or ``class`` (any case), else the last attribute.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8-sig")
    if not text.strip():
        raise EmptyFile(f"{path}: empty file")
    try:
        data, meta = arff.loadarff(path)
    except NotImplementedError as exc:
        raise UnsupportedAttributeType(f"{path}: {exc}") from None
    except (arff.ParseArffError, ValueError, IndexError) as exc:
        msg = str(exc)
        if "string" in msg.lower() or "date" in msg.lower():
            raise UnsupportedAttributeType(f"{path}: {msg}") from None
        raise MalformedHeader(f"{path}: {msg}") from None
    names = list(meta.names())
    if not names:
        raise MalformedHeader(f"{path}: no @attribute declarations")
    for nm in names:
        if meta[nm][0] not in ("numeric", "nominal"):
            raise UnsupportedAttributeType(f"{path}: attribute {nm!r} has type {meta[nm][0]}")
    if label_column is None:
        special = [nm for nm in names if nm.lower() in ("result", "class")]
        label_column = special[0] if special else names[-1]
    elif label_column not in names:
        raise UnknownLabelColumn(f"{path}: no attribute {label_column!r}")
    if len(data) == 0:
        raise EmptyFile(f"{path}: no @data rows")

    def nominal_strings(nm):
        return [v.decode() if isinstance(v, bytes) else str(v) for v in data[nm]]

    labels = nominal_strings(label_column) if meta[label_column][0] == "nominal" \
        else [_fmt(v) for v in data[label_column]]
    for r, lab in enumerate(labels, start=1):
        if lab == "?" or lab == "nan":
            raise MissingValue(r, label_column)

    feats, cols = [], []
    for nm in names:
        if nm == label_column:
            continue
        kind, declared = meta[nm]
        if kind == "numeric":
            col = np.asarray(data[nm], dtype=np.float64)
            bad = np.flatnonzero(~np.isfinite(col))
            if len(bad):
                raise MissingValue(int(bad[0]) + 1, nm)
            feats.append(describe(nm, col))
        else:
            declared = [str(v).strip() for v in declared]
            raw = nominal_strings(nm)
            try:
                codes = [float(v) for v in declared]
                lookup = dict(zip(declared, codes))
            except ValueError:
                codes = [float(i) for i in range(len(declared))]
                lookup = dict(zip(declared, codes))
            col = np.empty(len(raw))
            for r, v in enumerate(raw):
                if v not in lookup:
                    raise MissingValue(r + 1, nm)
                col[r] = lookup[v]
            kind = "binary" if len(declared) <= 2 else "categorical"
            feats.append(describe(nm, col, kind, codes=codes))
        cols.append(col)
    X = np.column_stack(cols) if cols else np.empty((len(labels), 0))
    return Dataset(name or path.stem, tuple(feats), X, np.array(labels, dtype=object), label_column)


def load(path, label_column: str | None = None, schema_hints=None,
         drop_columns: Sequence[str] = (), name: str | None = None) -> Dataset:
    """Dispatch on file suffix (.arff vs anything else as CSV)."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"{path}: no such file")
    if path.suffix.lower() == ".arff":
        ds = load_arff(path, label_column, name=name)
        if drop_columns:
            ds = ds.select([f for f in ds.feature_names if f not in drop_columns])
        return ds
    if label_column is None:
        raise UnknownLabelColumn(f"{path}: a label column is required for CSV input")
    return load_csv(path, label_column, schema_hints, drop_columns, name)


def _spaced(values: np.ndarray, codes: Sequence[float]) -> tuple[np.ndarray, tuple[float, ...]]:
    k = len(codes)
    if k < 2:
        return np.zeros_like(values), (0.0,)
    targets = np.arange(k) / (k - 1)
    pos = np.searchsorted(np.asarray(codes), values)
    return targets[pos], tuple(float(t) for t in targets)


def normalize(ds: Dataset) -> NormalizedDataset:
    """Map every feature into [0, 1].

    Binary/categorical codes go to evenly spaced points in ascending code
    order; other kinds are min-max scaled. Constant features become 0.
    """
    cols, feats = [], []
    for j, f in enumerate(ds.features):
        v = ds.X[:, j]
        if v.min() == v.max():
            out, codes = np.zeros_like(v), ((0.0,) if f.codes is not None else None)
        elif f.kind in ("binary", "categorical") and f.codes is not None:
            out, codes = _spaced(v, f.codes)
        else:
            lo, hi = v.min(), v.max()
            out = np.zeros_like(v) if hi == lo else (v - lo) / (hi - lo)
            # guard the endpoints against rounding
            out = np.clip(out, 0.0, 1.0)
            codes = None
        cols.append(out)
        feats.append(replace(f, observed_min=float(out.min()), observed_max=float(out.max()),
                             codes=codes))
    X = np.column_stack(cols) if cols else np.empty((ds.n, 0))
    return NormalizedDataset(ds.name, tuple(feats), X, ds.labels, ds.label_name)


@dataclass(frozen=True)
class AliasMap:
    """(canonical name, alias name) pairs declaring semantic identity.

    Each alias resolves to exactly one canonical name. Several aliases
    may share a canonical name; a canonical name is never itself an alias
    of a different name.
    """

    pairs: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        pairs = tuple((str(a).strip(), str(b).strip()) for a, b in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        target: dict[str, str] = {}
        for canon, alias in pairs:
            if target.get(alias, canon) != canon:
                raise InputError(f"alias {alias!r} maps to both {target[alias]!r} and {canon!r}")
            target[alias] = canon
        for canon, alias in pairs:
            if canon in target and target[canon] != canon:
                raise InputError(f"{canon!r} is both a canonical name and an alias")

    @property
    def mapping(self) -> dict[str, str]:
        return {alias: canon for canon, alias in self.pairs}

    def canonical(self, name: str) -> str:
        return self.mapping.get(name, name)

    def names(self) -> set[str]:
        return {n for pair in self.pairs for n in pair}

    def check_known(self, universes: Iterable[Iterable[str]]) -> None:
        known = set().union(*[set(u) for u in universes])
        for canon, alias in self.pairs:
            if canon not in known and alias not in known:
                raise UnknownFeatureInAlias(f"alias pair ({canon}, {alias}) names no known feature")

    @classmethod
    def from_csv(cls, path) -> "AliasMap":
        pairs = []
        with open(path, newline="", encoding="utf-8-sig") as fh:
            for rec in csv.reader(fh):
                if not rec or rec[0].startswith("#"):
                    continue
                if len(rec) != 2:
                    raise InputError(f"{path}: alias rows need exactly two names")
                if (rec[0].strip(), rec[1].strip()) == ("name_a", "name_b"):
                    continue
                pairs.append((rec[0], rec[1]))
        return cls(tuple(pairs))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["name_a", "name_b"])
            w.writerows(self.pairs)


def align(datasets: Sequence[Dataset], aliases: AliasMap | None = None) -> tuple[str, ...]:
    """Canonical feature names present, directly or via alias, in every dataset.

    Order follows the first dataset's columns.
    """
    aliases = aliases or AliasMap()
    if not datasets:
        return ()
    aliases.check_known(ds.feature_names for ds in datasets)
    universes = [[aliases.canonical(n) for n in ds.feature_names] for ds in datasets]
    common = set(universes[0]).intersection(*universes[1:])
    seen, out = set(), []
    for name in universes[0]:
        if name in common and name not in seen:
            seen.add(name)
            out.append(name)
    return tuple(out)


def shared_members(datasets: Sequence[Dataset], aliases: AliasMap | None = None) -> dict[str, list[str]]:
    """Per dataset, the raw feature names whose canonical name is shared by all."""
    aliases = aliases or AliasMap()
    common = set(align(datasets, aliases))
    return {ds.name: [n for n in ds.feature_names if aliases.canonical(n) in common]
            for ds in datasets}
