"""Deterministic stratified k-fold assignment."""

from __future__ import annotations

import numpy as np

from .errors import InputError


def stratified_folds(labels, k: int = 10, seed: int = 0) -> np.ndarray:
    """Fold id (0..k-1) per sample; a pure function of (seed, labels, k).

    Each class is shuffled with its own stream and dealt round-robin, the
    starting fold rotating between classes so fold sizes stay balanced.
    """
    labels = np.asarray(labels)
    if k < 2:
        raise InputError("need at least 2 folds")
    if k > len(labels):
        raise InputError(f"{k} folds for {len(labels)} samples")
    folds = np.empty(len(labels), dtype=np.int64)
    offset = 0
    classes = sorted(set(labels.tolist()))
    children = np.random.SeedSequence(seed).spawn(len(classes))
    for cls, child in zip(classes, children):
        members = np.flatnonzero(labels == cls)
        members = members[np.random.default_rng(child).permutation(len(members))]
        folds[members] = (np.arange(len(members)) + offset) % k
        offset = (offset + len(members)) % k
    return folds


def cross_val_predict(fit_predict, ds, k: int = 10, seed: int = 0) -> np.ndarray:
    """Out-of-fold predictions; ``fit_predict(train_ds, test_ds)`` returns labels."""
    folds = stratified_folds(ds.labels, k, seed)
    pred = np.empty(ds.n, dtype=object)
    for f in range(k):
        test = np.flatnonzero(folds == f)
        train = np.flatnonzero(folds != f)
        pred[test] = fit_predict(ds.take(train), ds.take(test))
    return pred
