"""Random forest of Gini CART trees (bootstrap + random feature subsets)."""

from __future__ import annotations

import math

import numpy as np
from joblib import Parallel, delayed
from numba import njit


@njit(cache=True, nogil=True)
def _gini(counts, total):
    if total == 0:
        return 0.0
    s = 0.0
    for c in counts:
        p = c / total
        s += p * p
    return 1.0 - s


@njit(cache=True, nogil=True)
def _gini_rest(counts, lc, total):
    if total == 0:
        return 0.0
    s = 0.0
    for c in range(counts.shape[0]):
        p = (counts[c] - lc[c]) / total
        s += p * p
    return 1.0 - s


@njit(cache=True, nogil=True)
def _build_tree(X, y, n_classes, idx, max_features, max_depth, min_samples_split, seed):
    np.random.seed(seed)
    n, d = X.shape
    cap = 2 * len(idx) + 1
    feature = np.full(cap, -1, np.int64)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, np.int64)
    right = np.full(cap, -1, np.int64)
    leaf_class = np.zeros(cap, np.int64)
    importance = np.zeros(d)

    # stack of (node, start, end, depth)
    st_node = np.zeros(cap, np.int64)
    st_start = np.zeros(cap, np.int64)
    st_end = np.zeros(cap, np.int64)
    st_depth = np.zeros(cap, np.int64)
    top = 0
    st_node[0] = 0
    st_start[0] = 0
    st_end[0] = len(idx)
    st_depth[0] = 0
    top = 1
    n_nodes = 1
    feats = np.arange(d)
    counts = np.zeros(n_classes)
    lc = np.zeros(n_classes)

    while top > 0:
        top -= 1
        node = st_node[top]
        start = st_start[top]
        end = st_end[top]
        depth = st_depth[top]
        m = end - start
        counts[:] = 0.0
        for t in range(start, end):
            counts[y[idx[t]]] += 1.0
        best_c = 0
        for c in range(n_classes):
            if counts[c] > counts[best_c]:
                best_c = c
        leaf_class[node] = best_c
        parent_gini = _gini(counts, m)
        if parent_gini <= 0.0 or m < min_samples_split or (max_depth >= 0 and depth >= max_depth):
            continue

        # random feature order; inspect at least max_features non-constant ones
        for t in range(d - 1, 0, -1):
            s = np.random.randint(0, t + 1)
            tmp = feats[t]
            feats[t] = feats[s]
            feats[s] = tmp
        best_gain = -1.0
        best_f = -1
        best_thr = 0.0
        visited = 0
        node_idx = idx[start:end]
        for fi in range(d):
            if visited >= max_features:
                break
            f = feats[fi]
            vals = X[node_idx, f]
            order = np.argsort(vals, kind="mergesort")
            sv = vals[order]
            if sv[0] == sv[m - 1]:
                continue
            visited += 1
            lc[:] = 0.0
            for t in range(m - 1):
                lc[y[node_idx[order[t]]]] += 1.0
                if sv[t] == sv[t + 1]:
                    continue
                nl = t + 1
                nr = m - nl
                gl = _gini(lc, nl)
                gr = _gini_rest(counts, lc, nr)
                gain = parent_gini - (nl * gl + nr * gr) / m
                if gain > best_gain + 1e-15:
                    best_gain = gain
                    best_f = f
                    thr = 0.5 * (sv[t] + sv[t + 1])
                    if thr >= sv[t + 1]:
                        thr = sv[t]
                    best_thr = thr
        if best_f < 0:
            continue

        # partition idx[start:end] around the threshold
        i = start
        j = end - 1
        while i <= j:
            if X[idx[i], best_f] <= best_thr:
                i += 1
            else:
                tmp = idx[i]
                idx[i] = idx[j]
                idx[j] = tmp
                j -= 1
        importance[best_f] += m * best_gain
        feature[node] = best_f
        threshold[node] = best_thr
        left[node] = n_nodes
        right[node] = n_nodes + 1
        st_node[top] = n_nodes
        st_start[top] = start
        st_end[top] = i
        st_depth[top] = depth + 1
        top += 1
        st_node[top] = n_nodes + 1
        st_start[top] = i
        st_end[top] = end
        st_depth[top] = depth + 1
        top += 1
        n_nodes += 2

    return (feature[:n_nodes].copy(), threshold[:n_nodes].copy(), left[:n_nodes].copy(),
            right[:n_nodes].copy(), leaf_class[:n_nodes].copy(), importance)


@njit(cache=True, nogil=True)
def _apply_tree(X, feature, threshold, left, right, leaf_class):
    out = np.empty(X.shape[0], np.int64)
    for r in range(X.shape[0]):
        node = 0
        while feature[node] >= 0:
            if X[r, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[r] = leaf_class[node]
    return out


def _resolve_max_features(max_features, d):
    if max_features in (None, "all"):
        return d
    if max_features == "sqrt":
        return max(1, int(math.ceil(math.sqrt(d))))
    if max_features == "log2":
        return max(1, int(math.log2(d)) + 1)
    return max(1, min(d, int(max_features)))


def _fit_one(X, y, n_classes, params, seed):
    rng = np.random.default_rng(seed)
    n = X.shape[0]
    if params["bootstrap"]:
        idx = rng.integers(0, n, n).astype(np.int64)
    else:
        idx = np.arange(n, dtype=np.int64)
    inner_seed = int(rng.integers(0, 2**31 - 1))
    depth = params["max_depth"]
    return _build_tree(X, y, n_classes, idx, _resolve_max_features(params["max_features"], X.shape[1]),
                       -1 if depth is None else int(depth), int(params["min_samples_split"]),
                       inner_seed)


def fit_forest(X, y, n_classes, params, seed, n_jobs=1):
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.int64)
    seeds = np.random.SeedSequence(seed).generate_state(params["n_trees"], dtype=np.uint32)
    if n_jobs == 1:
        trees = [_fit_one(X, y, n_classes, params, int(s)) for s in seeds]
    else:
        trees = Parallel(n_jobs=n_jobs, prefer="threads")(
            delayed(_fit_one)(X, y, n_classes, params, int(s)) for s in seeds)
    importance = np.sum([t[5] for t in trees], axis=0) / X.shape[0]
    return {
        "trees": [
            {"feature": t[0], "threshold": t[1], "left": t[2], "right": t[3], "leaf_class": t[4]}
            for t in trees
        ],
        "importance": importance,
    }


def forest_votes(state, X, n_classes):
    X = np.ascontiguousarray(X, dtype=np.float64)
    votes = np.zeros((X.shape[0], n_classes), dtype=np.int64)
    rows = np.arange(X.shape[0])
    for t in state["trees"]:
        pred = _apply_tree(X, np.asarray(t["feature"], np.int64), np.asarray(t["threshold"], np.float64),
                           np.asarray(t["left"], np.int64), np.asarray(t["right"], np.int64),
                           np.asarray(t["leaf_class"], np.int64))
        votes[rows, pred] += 1
    return votes


def predict_forest(state, X, n_classes):
    # argmax picks the lowest class code on tied votes
    return forest_votes(state, X, n_classes).argmax(axis=1)
