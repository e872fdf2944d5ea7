import math
import os
from pathlib import Path

import numpy as np
import pytest

from frsfs.dataset import from_arrays, normalize

FIXTURES = Path(__file__).parent / "fixtures"


def make_ds(X, labels, names=None, name="t"):
    return from_arrays(X, labels, names, name)


def random_normalized(rng, n_max=50, d_max=10, n_classes=2, grid=None):
    """Random dataset with values already in [0, 1] (optionally on a grid)."""
    n = int(rng.integers(2, n_max + 1))
    d = int(rng.integers(1, d_max + 1))
    if grid:
        X = rng.integers(0, grid + 1, size=(n, d)) / grid
    else:
        X = rng.random((n, d))
    y = rng.integers(0, n_classes, size=n)
    y[0], y[-1] = 0, 1
    return normalize(make_ds(X, [f"c{v}" for v in y]))


# -- oracles: scalar loops straight from the definitions ------------------

def oracle_relation(rows_a, rows_b):
    """Lukasiewicz fold of max(0, 1 - (x - y)^2), applied step by step."""
    acc = 1.0
    for x, y in zip(rows_a, rows_b):
        acc = max(0.0, acc + max(0.0, 1.0 - (x - y) ** 2) - 1.0)
    return acc


def oracle_memberships(X, label_values, cols):
    n = len(X)
    lower, upper = [], []
    for m in range(n):
        lo, up = 1.0, 0.0
        for k in range(n):
            if k == m:
                continue
            rf = oracle_relation([X[m][j] for j in cols], [X[k][j] for j in cols])
            rl = 1.0 if label_values[m] == label_values[k] else \
                max(0.0, 1.0 - (label_values[m] - label_values[k]) ** 2)
            lo = min(lo, min(1.0, 1.0 - rf + rl))
            up = max(up, max(0.0, rf + rl - 1.0))
        lower.append(lo)
        upper.append(up)
    return lower, upper


def oracle_gamma(nds, names):
    cols = nds.index_of(names)
    lower, _ = oracle_memberships(nds.X.tolist(), nds.label_values.tolist(), cols)
    return math.fsum(lower) / nds.n


def benchmark_dir():
    d = os.environ.get("FRSFS_DATA_DIR")
    return Path(d) if d else None


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def toy_path():
    return FIXTURES / "toy.csv"


def separable(n=200, d=2, margin=0.5, seed=0):
    """Two classes on either side of a hyperplane with a gap of ``margin``
    in feature 0 (values in [0, 1])."""
    r = np.random.default_rng(seed)
    X = r.random((n, d))
    y = r.integers(0, 2, n)
    half = margin / 2
    X[:, 0] = np.where(y == 1, 0.5 + half + r.random(n) * (0.5 - half),
                       r.random(n) * (0.5 - half))
    return make_ds(X, np.where(y == 1, "phish", "legit"), name="margin")


# -- acceptance report ----------------------------------------------------

ACCEPTANCE: list[str] = []


def record(number, title, status, detail=""):
    line = f"criterion {number} [{status}] {title}" + (f": {detail}" if detail else "")
    ACCEPTANCE.append(line)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
