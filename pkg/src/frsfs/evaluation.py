"""Selector x classifier x dataset evaluation with phishing as the positive class."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import benchmarks
from .baselines import cfs_select, dw_select, info_gain_rank
from .classifiers import ClassifierSpec, train
from .crossval import stratified_folds
from .dataset import AliasMap, Dataset, normalize
from .errors import ComputationError, DegenerateLabels, FeatureUniverseMismatch, InputError
from .fuzzy import EPS
from .reduct import Reduct, core_reduct, quickreduct

log = logging.getLogger(__name__)

SELECTORS = ("frs", "frs-core", "ig", "cfs", "dw", "all-features", "universal")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise InputError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def swapped(self) -> "ConfusionCounts":
        """Counts with the roles of the two classes exchanged."""
        return ConfusionCounts(self.tn, self.fn, self.tp, self.fp)

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(self.tp + other.tp, self.fp + other.fp,
                               self.tn + other.tn, self.fn + other.fn)

    def to_dict(self):
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


def precision(c: ConfusionCounts) -> float:
    den = c.tp + c.fp
    return c.tp / den if den else 0.0


def recall(c: ConfusionCounts) -> float:
    den = c.tp + c.fn
    return c.tp / den if den else 0.0


def f_measure(c: ConfusionCounts) -> float:
    p, r = precision(c), recall(c)
    return 2 * p * r / (p + r) if p + r else 0.0


def confusion(truth: Iterable[str], pred: Iterable[str], positive: set[str]) -> ConfusionCounts:
    t = np.array([v in positive for v in truth], dtype=bool)
    p = np.array([v in positive for v in pred], dtype=bool)
    return ConfusionCounts(int(np.sum(t & p)), int(np.sum(~t & p)),
                           int(np.sum(~t & ~p)), int(np.sum(t & ~p)))


def positive_labels(positive: str | Sequence[str], suspicious: str | None = None,
                    suspicious_as_phishing: bool = True) -> set[str]:
    pos = {positive} if isinstance(positive, str) else set(positive)
    if suspicious is not None and suspicious_as_phishing:
        pos.add(suspicious)
    return pos


def guess_positive(ds: Dataset) -> str:
    """Phishing label for datasets without a preset."""
    classes = set(ds.classes)
    for cand in ("phishing", "phishy", "Phishing"):
        if cand in classes:
            return cand
    if classes == {"-1", "1"} or classes == {"-1", "0", "1"}:
        return "-1"
    if classes == {"0", "1"}:
        return "1"
    raise InputError(f"{ds.name}: cannot tell which label is phishing; pass it explicitly")


# -- selectors --------------------------------------------------------------

@dataclass
class SelectorOptions:
    bins: int = 10
    ig_threshold: str | float = "mean"
    delta: float = 0.005
    dw_folds: int = 3
    dw_evaluator: ClassifierSpec | None = None
    universal: Sequence[str] = benchmarks.UNIVERSAL_FEATURES
    aliases: AliasMap | None = None
    seed: int = 0

    def to_dict(self):
        return {
            "bins": self.bins, "ig_threshold": self.ig_threshold, "delta": self.delta,
            "dw_folds": self.dw_folds,
            "dw_evaluator": self.dw_evaluator.to_dict() if self.dw_evaluator else None,
            "universal": list(self.universal), "epsilon": EPS, "seed": self.seed,
        }


def select(name: str, ds: Dataset, opts: SelectorOptions | None = None):
    """Run selector ``name`` on ``ds``; returns (selected names, detail dict)."""
    opts = opts or SelectorOptions()
    if name == "frs":
        r = quickreduct(normalize(ds))
        return r.selected, r.to_dict()
    if name == "frs-core":
        r = core_reduct(normalize(ds))
        return r.selected, r.to_dict()
    if name == "ig":
        r = info_gain_rank(ds, opts.bins, opts.ig_threshold)
        return r.selected, r.to_dict()
    if name == "cfs":
        r = cfs_select(ds, opts.bins)
        return r.selected, r.to_dict()
    if name == "dw":
        r = dw_select(ds, opts.dw_evaluator, opts.delta, opts.dw_folds, opts.seed)
        return r.selected, r.to_dict()
    if name == "all-features":
        return ds.feature_names, {"dataset": ds.name, "method": name,
                                  "selected": list(ds.feature_names)}
    if name == "universal":
        aliases = opts.aliases if opts.aliases is not None else benchmarks.default_aliases()
        wanted = set(opts.universal)
        chosen = tuple(n for n in ds.feature_names if aliases.canonical(n) in wanted)
        return chosen, {"dataset": ds.name, "method": name, "selected": list(chosen),
                        "canonical": list(opts.universal)}
    raise InputError(f"unknown selector {name!r}; choose from {', '.join(SELECTORS)}")


# -- protocol ---------------------------------------------------------------

def _classifier_name(entry) -> str:
    if isinstance(entry, ClassifierSpec):
        return entry.kind
    return getattr(entry, "name", type(entry).__name__)


def _fit(entry, ds: Dataset, features, n_jobs):
    if isinstance(entry, ClassifierSpec):
        return train(entry, ds, features, n_jobs=n_jobs)
    return entry.fit(ds, features)


def _map_features(selected, eval_ds: Dataset, train_ds: Dataset, aliases: AliasMap | None):
    aliases = aliases or AliasMap()
    train_names = set(train_ds.feature_names)
    by_canon: dict[str, list[str]] = {}
    for n in train_ds.feature_names:
        by_canon.setdefault(aliases.canonical(n), []).append(n)
    out = []
    for f in selected:
        if f in train_names:
            out.append(f)
            continue
        cands = by_canon.get(aliases.canonical(f), [])
        if len(cands) != 1:
            raise FeatureUniverseMismatch(
                f"selected feature {f!r} has {len(cands)} counterparts in {train_ds.name}")
        out.append(cands[0])
    if len(set(out)) != len(out):
        raise FeatureUniverseMismatch("several selected features map to one training feature")
    return out


@dataclass
class EvalReport:
    protocol: str
    cells: list = field(default_factory=list)
    selections: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)
    universal: list | None = None

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "cells": self.cells,
            "selections": self.selections,
            "metadata": self.metadata,
            "universal": self.universal,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, doc) -> "EvalReport":
        return cls(doc["protocol"], doc["cells"], doc["selections"], doc["metadata"],
                   doc.get("universal"))

    def cell(self, dataset: str, selector: str, classifier: str) -> dict:
        for c in self.cells:
            if (c["dataset"], c["selector"], c["classifier"]) == (dataset, selector, classifier):
                return c
        raise KeyError((dataset, selector, classifier))

    def csv_rows(self):
        yield ["dataset", "selector", "classifier", "n_features", "tp", "fp", "tn", "fn",
               "precision", "recall", "f_measure"]
        for c in self.cells:
            k = c["counts"]
            yield [c["dataset"], c["selector"], c["classifier"], c["n_features"],
                   k["tp"], k["fp"], k["tn"], k["fn"],
                   repr(c["precision"]), repr(c["recall"]), repr(c["f_measure"])]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            csv.writer(fh, lineterminator="\n").writerows(self.csv_rows())

    def write_bar_data(self, path) -> None:
        """(category, value) pairs grouped like the F-measure bar chart."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["category", "value"])
            for c in self.cells:
                w.writerow([f"{c['dataset']}/{c['classifier']}/{c['selector']}",
                            repr(c["f_measure"])])


def merge_reports(reports: Sequence[EvalReport]) -> EvalReport:
    protocols = sorted({r.protocol for r in reports})
    out = EvalReport("+".join(protocols))
    for r in reports:
        out.cells.extend(r.cells)
        for ds_name, sel in r.selections.items():
            out.selections[ds_name] = sel
        out.metadata.setdefault("datasets", {}).update(
            {ds_name: r.metadata for ds_name in r.selections})
        out.universal = out.universal or r.universal
    return out


def _cell(ds_name, selector, classifier, features, counts: ConfusionCounts):
    p, r, f = precision(counts), recall(counts), f_measure(counts)
    return {
        "dataset": ds_name, "selector": selector, "classifier": classifier,
        "features": list(features), "n_features": len(features),
        "counts": counts.to_dict(), "precision": p, "recall": r, "f_measure": f,
        "zero_division": (counts.tp + counts.fp == 0) or (counts.tp + counts.fn == 0),
    }


def run_protocol(train_ds: Dataset | None, eval_ds: Dataset, selectors: Sequence,
                 classifiers: Sequence, positive: str | Sequence[str] | None = None,
                 suspicious: str | None = None, suspicious_as_phishing: bool = True,
                 k: int = 10, seed: int = 0, options: SelectorOptions | None = None,
                 aliases: AliasMap | None = None, n_jobs: int | None = None) -> EvalReport:
    """Select on ``eval_ds``, train on ``train_ds`` (or k-fold CV on ``eval_ds``
    when it is None) and score each selector x classifier cell.

    ``selectors`` holds selector names or ``(name, callable(ds) -> names)``
    pairs; ``classifiers`` holds :class:`ClassifierSpec` objects or objects
    with ``name`` and ``fit(ds, features) -> model`` (model exposing
    ``predict_dataset``).
    """
    options = options or SelectorOptions(seed=seed)
    if len(eval_ds.classes) < 2:
        raise DegenerateLabels(f"{eval_ds.name}: evaluation needs two labels")
    if positive is None:
        positive = guess_positive(eval_ds)
    pos = positive_labels(positive, suspicious, suspicious_as_phishing)
    if not pos & set(eval_ds.classes):
        raise InputError(f"{eval_ds.name}: positive label(s) {sorted(pos)} not among {eval_ds.classes}")
    protocol = "out-of-sample" if train_ds is not None else f"cv-{k}"
    report = EvalReport(protocol)
    report.metadata = {
        "dataset": eval_ds.name,
        "train_dataset": train_ds.name if train_ds is not None else None,
        "seed": seed, "folds": None if train_ds is not None else k,
        "positive_labels": sorted(pos), "suspicious": suspicious,
        "suspicious_as_phishing": suspicious_as_phishing,
        "selector_options": options.to_dict(),
        "classifiers": [c.to_dict() if isinstance(c, ClassifierSpec) else {"name": _classifier_name(c)}
                        for c in classifiers],
    }
    norm_eval = normalize(eval_ds)
    norm_train = normalize(train_ds) if train_ds is not None else None
    folds = stratified_folds(eval_ds.labels, k, seed) if train_ds is None else None
    report.selections[eval_ds.name] = {}
    if any(s == "universal" for s in selectors):
        report.universal = list(options.universal)

    for sel in selectors:
        if isinstance(sel, str):
            sel_name, chosen, detail = sel, *select(sel, eval_ds, options)
        else:
            sel_name, fn = sel
            chosen = tuple(fn(eval_ds))
            detail = {"dataset": eval_ds.name, "method": sel_name, "selected": list(chosen)}
        chosen = tuple(chosen)
        report.selections[eval_ds.name][sel_name] = detail
        if not chosen:
            raise ComputationError(f"selector {sel_name!r} chose no features on {eval_ds.name}")
        log.info("%s: %s selected %d features", eval_ds.name, sel_name, len(chosen))
        for clf in classifiers:
            name = _classifier_name(clf)
            if norm_train is not None:
                train_feats = _map_features(chosen, eval_ds, norm_train, aliases)
                sub_train = norm_train.select(train_feats).rename(dict(zip(train_feats, chosen)))
                model = _fit(clf, sub_train, chosen, n_jobs)
                pred = model.predict_dataset(norm_eval)
                counts = confusion(norm_eval.labels, pred, pos)
            else:
                counts = ConfusionCounts()
                for f in range(k):
                    te = np.flatnonzero(folds == f)
                    tr = np.flatnonzero(folds != f)
                    model = _fit(clf, norm_eval.take(tr), chosen, n_jobs)
                    pred = model.predict_dataset(norm_eval.take(te))
                    counts = counts + confusion(norm_eval.labels[te], pred, pos)
            report.cells.append(_cell(eval_ds.name, sel_name, name, chosen, counts))
    return report


# -- universal features -----------------------------------------------------

def _as_reduct(r) -> Reduct:
    if isinstance(r, Reduct):
        return r
    if isinstance(r, dict):
        return Reduct.from_dict(r)
    return Reduct(tuple(r), float("nan"), float("nan"))


def universal_features(reducts: Sequence, aliases: AliasMap | None = None,
                       check_aliases: bool = True) -> tuple[str, ...]:
    """Sorted canonical names selected in every reduct.

    A reduct whose selection covers its whole recorded universe carries no
    selection signal and does not restrict the result, unless every reduct
    is like that. ``check_aliases`` rejects alias pairs naming no feature
    seen in any reduct.
    """
    if len(reducts) < 2:
        raise InputError("universal features need at least two reducts")
    aliases = aliases or AliasMap()
    rs = [_as_reduct(r) for r in reducts]
    if check_aliases:
        aliases.check_known([set(r.selected) | set(r.universe) for r in rs])
    canon = [{aliases.canonical(n) for n in r.selected} for r in rs]
    saturated = [bool(r.universe) and set(r.selected) == set(r.universe) for r in rs]
    constraining = [c for c, s in zip(canon, saturated) if not s] or canon
    return tuple(sorted(set.intersection(*constraining)))


def overlap(selected: Iterable[str], reference: Iterable[str]) -> dict:
    s, ref = set(selected), set(reference)
    return {
        "common": sorted(s & ref),
        "only_selected": sorted(s - ref),
        "only_reference": sorted(ref - s),
        "jaccard": len(s & ref) / len(s | ref) if s | ref else 1.0,
    }
