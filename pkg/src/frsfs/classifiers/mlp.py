"""One-hidden-layer sigmoid perceptron trained by momentum SGD on squared error."""

from __future__ import annotations

import numpy as np


def sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def init_params(n_in, n_hidden, n_out, rng, scale=0.05):
    return {
        "W1": rng.uniform(-scale, scale, (n_in, n_hidden)),
        "b1": rng.uniform(-scale, scale, n_hidden),
        "W2": rng.uniform(-scale, scale, (n_hidden, n_out)),
        "b2": rng.uniform(-scale, scale, n_out),
    }


def forward(params, X):
    H = sigmoid(X @ params["W1"] + params["b1"])
    O = sigmoid(H @ params["W2"] + params["b2"])
    return H, O


def loss_and_grad(params, X, T):
    """Mean over rows of 0.5 * ||output - target||^2, and its gradient."""
    n = X.shape[0]
    H, O = forward(params, X)
    E = O - T
    loss = 0.5 * float(np.sum(E * E)) / n
    d_out = E * O * (1.0 - O) / n
    d_hid = (d_out @ params["W2"].T) * H * (1.0 - H)
    grads = {
        "W2": H.T @ d_out,
        "b2": d_out.sum(axis=0),
        "W1": X.T @ d_hid,
        "b1": d_hid.sum(axis=0),
    }
    return loss, grads


def hidden_units(n_features, n_classes):
    return max(1, -(-(n_features + n_classes) // 2))


def fit_mlp(X, y, n_classes, params, seed):
    rng = np.random.default_rng(seed)
    X = np.asarray(X, dtype=np.float64)
    n, d = X.shape
    hidden = params["hidden"] or hidden_units(d, n_classes)
    T = np.eye(n_classes)[y]
    theta = init_params(d, hidden, n_classes, rng)
    velocity = {k: np.zeros_like(v) for k, v in theta.items()}
    lr, mom, bs = float(params["learning_rate"]), float(params["momentum"]), int(params["batch_size"])
    for _ in range(int(params["epochs"])):
        order = rng.permutation(n)
        for start in range(0, n, bs):
            rows = order[start:start + bs]
            _, grads = loss_and_grad(theta, X[rows], T[rows])
            for k in theta:
                velocity[k] = mom * velocity[k] - lr * grads[k]
                theta[k] += velocity[k]
    return theta


def predict_mlp(state, X, n_classes):
    _, O = forward({k: np.asarray(v) for k, v in state.items()}, np.asarray(X, dtype=np.float64))
    return O.argmax(axis=1)
