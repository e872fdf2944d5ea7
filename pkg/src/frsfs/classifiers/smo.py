"""Linear-kernel SVM trained by sequential minimal optimisation.

Working-pair selection follows the maximal-violating-pair rule with
second-order choice of the second index (Fan, Chen & Lin 2005). Training
stops when the KKT gap ``m(alpha) - M(alpha)`` falls below ``tol``.
"""

from __future__ import annotations

import logging

import numpy as np

log = logging.getLogger(__name__)

TAU = 1e-12


def smo_binary(X, y, C=1.0, tol=1e-3, max_iter=100_000):
    """Solve the dual soft-margin problem for labels y in {-1, +1}.

    Returns ``(alpha, w, b, n_iter)`` with decision function ``X @ w + b``.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = X.shape[0]
    alpha = np.zeros(n)
    G = -np.ones(n)  # gradient of 0.5 a'Qa - e'a
    diag = np.einsum("ij,ij->i", X, X)
    it = 0
    while it < max_iter:
        yG = -y * G
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y < 0) & (alpha < C)) | ((y > 0) & (alpha > 0))
        if not up.any() or not low.any():
            break
        cand = np.where(up, yG, -np.inf)
        i = int(np.argmax(cand))
        m = cand[i]
        M = np.min(np.where(low, yG, np.inf))
        if m - M < tol:
            break
        Ki = X @ X[i]
        b_t = m - yG
        a_t = diag[i] + diag - 2.0 * Ki
        a_t = np.where(a_t > 0, a_t, TAU)
        score = np.where(low & (b_t > 0), -(b_t * b_t) / a_t, np.inf)
        j = int(np.argmin(score))
        Kj = X @ X[j]

        old_ai, old_aj = alpha[i], alpha[j]
        quad = max(diag[i] + diag[j] - 2.0 * Ki[j], TAU)
        if y[i] != y[j]:
            delta = (-G[i] - G[j]) / quad
            diff = old_ai - old_aj
            ai, aj = old_ai + delta, old_aj + delta
            if diff > 0:
                if aj < 0:
                    aj, ai = 0.0, diff
            elif ai < 0:
                ai, aj = 0.0, -diff
            if diff > 0:
                if ai > C:
                    ai, aj = C, C - diff
            elif aj > C:
                aj, ai = C, C + diff
        else:
            delta = (G[i] - G[j]) / quad
            total = old_ai + old_aj
            ai, aj = old_ai - delta, old_aj + delta
            if total > C:
                if ai > C:
                    ai, aj = C, total - C
            elif aj < 0:
                aj, ai = 0.0, total
            if total > C:
                if aj > C:
                    aj, ai = C, total - C
            elif ai < 0:
                ai, aj = 0.0, total
        alpha[i], alpha[j] = ai, aj
        dai, daj = ai - old_ai, aj - old_aj
        G += y * (y[i] * Ki * dai + y[j] * Kj * daj)
        it += 1
    else:
        log.warning("SMO hit max_iter=%d before reaching tol=%g", max_iter, tol)

    yG = y * G
    free = (alpha > 0) & (alpha < C)
    if free.any():
        rho = float(np.mean(yG[free]))
    else:
        ub, lb = np.inf, -np.inf
        at_c = alpha >= C
        at_0 = alpha <= 0
        # bounds on rho from the bound-constrained samples
        mask_ub = (at_c & (y < 0)) | (at_0 & (y > 0))
        mask_lb = (at_c & (y > 0)) | (at_0 & (y < 0))
        if mask_ub.any():
            ub = float(np.min(yG[mask_ub]))
        if mask_lb.any():
            lb = float(np.max(yG[mask_lb]))
        rho = 0.5 * (ub + lb) if np.isfinite(ub) and np.isfinite(lb) else (ub if np.isfinite(ub) else lb)
    w = (alpha * y) @ X
    return alpha, w, -rho, it


def kkt_residuals(X, y, alpha, w, b, C):
    """Per-sample KKT violation of the soft-margin conditions."""
    margin = y * (np.asarray(X) @ w + b)
    res = np.where(alpha <= 0, np.maximum(0.0, 1.0 - margin),
                   np.where(alpha >= C, np.maximum(0.0, margin - 1.0), np.abs(margin - 1.0)))
    return res


def fit_smo(X, y, n_classes, params):
    """One binary machine for two classes, one-vs-rest otherwise."""
    C, tol, max_iter = float(params["C"]), float(params["tol"]), int(params["max_iter"])
    machines = []
    targets = [1] if n_classes == 2 else range(n_classes)
    for c in targets:
        yy = np.where(y == c, 1.0, -1.0)
        alpha, w, b, _ = smo_binary(X, yy, C, tol, max_iter)
        machines.append({"class": int(c), "w": w, "b": float(b), "alpha": alpha})
    return {"machines": machines}


def smo_decision(state, X):
    X = np.asarray(X, dtype=np.float64)
    return np.column_stack([X @ np.asarray(m["w"]) + m["b"] for m in state["machines"]])


def predict_smo(state, X, n_classes):
    scores = smo_decision(state, X)
    if n_classes == 2:
        return (scores[:, 0] > 0).astype(np.int64)
    return scores.argmax(axis=1)
