"""Acceptance criteria. Each test records one PASS/FAIL/SKIPPED line,
printed again in the terminal summary."""
import json
import math
import time

import numpy as np
import pytest

from conftest import FIXTURES, benchmark_dir, oracle_memberships, random_normalized, record, separable
from frsfs import benchmarks
from frsfs.classifiers import ClassifierSpec, train
from frsfs.classifiers.mlp import init_params, loss_and_grad
from frsfs.classifiers.smo import kkt_residuals, smo_binary
from frsfs.cli import main
from frsfs.dataset import load_csv, normalize
from frsfs.evaluation import confusion, f_measure, overlap, run_protocol
from frsfs.fuzzy import (
    EPS,
    dataset_memberships,
    implicator,
    lukasiewicz_tnorm,
    per_feature_similarity,
    relation_matrix,
    tnorm_closed_form,
    tnorm_fold,
)
from frsfs.reduct import dependency_degree, exhaustive_reduct, quickreduct

TOL = 1e-12
CASES = 10_000
NINE = {"UrlLen", "PrefSuff", "HaveSubDomain", "Favicon", "ReqUrl",
        "UrlAnchor", "LinksInTags", "SFH", "Submit2Email"}


def verdict(number, title, failures, detail=""):
    status = "FAIL" if failures else "PASS"
    msg = "; ".join(failures) if failures else detail
    record(number, title, status, msg)
    assert not failures, msg


def unit_samples(rng, shape):
    """Uniform draws with a quarter snapped to a coarse grid to hit 0, 1 and ties."""
    u = rng.random(shape)
    snap = rng.random(shape) < 0.25
    return np.where(snap, np.round(u * 4) / 4, u)


def test_criterion_1_formula_suite():
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    fails = []

    x, y, z = (unit_samples(rng, CASES) for _ in range(3))
    T = lukasiewicz_tnorm
    if not np.array_equal(T(x, y), T(y, x)):
        fails.append("t-norm commutativity")
    if np.max(np.abs(T(T(x, y), z) - T(x, T(y, z)))) > TOL:
        fails.append("t-norm associativity")
    lo, hi = np.minimum(y, z), np.maximum(y, z)
    if np.any(T(x, lo) > T(x, hi) + TOL):
        fails.append("t-norm monotonicity")
    if not np.array_equal(T(x, np.ones(CASES)), x):
        fails.append("t-norm identity")
    if np.any(T(x, np.zeros(CASES)) != 0.0):
        fails.append("t-norm zero")

    q, s, s2 = (unit_samples(rng, CASES) for _ in range(3))
    I = implicator
    v = I(q, s)
    if np.any((v < 0) | (v > 1)):
        fails.append("implicator range")
    if np.any(I(np.zeros(CASES), s) != 1.0) or np.any(I(q, np.ones(CASES)) != 1.0):
        fails.append("implicator boundary")
    if np.max(np.abs(I(np.ones(CASES), s) - s)) > TOL:
        fails.append("implicator neutrality")
    if np.any(v[q <= s] != 1.0):
        fails.append("implicator ordering")
    if np.any(I(q, np.minimum(s, s2)) > I(q, np.maximum(s, s2)) + TOL):
        fails.append("implicator monotone in consequent")
    if np.any(I(np.maximum(q, s2), s) > I(np.minimum(q, s2), s) + TOL):
        fails.append("implicator antitone in antecedent")
    # residuation: T(a, q) <= s exactly when a <= I(q, s)
    a = unit_samples(rng, CASES)
    left = T(a, q) <= s + TOL
    right = a <= I(q, s) + TOL
    if np.any(left != right):
        fails.append("residuation")

    worst = 0.0
    lengths = rng.integers(1, 21, CASES)
    for k in lengths:
        vals = unit_samples(rng, int(k))
        if rng.random() < 0.5:  # push sums near the k-1 threshold
            vals = 1.0 - vals / k
        worst = max(worst, abs(tnorm_fold(vals) - tnorm_closed_form(vals)))
    if worst > TOL:
        fails.append(f"fold vs closed form off by {worst:.2e}")

    sxy, syx = per_feature_similarity(x, y), per_feature_similarity(y, x)
    if not np.array_equal(sxy, syx):
        fails.append("similarity symmetry")
    if np.any(per_feature_similarity(x, x) != 1.0):
        fails.append("similarity diagonal")
    if np.any((sxy < 0) | (sxy > 1)):
        fails.append("similarity range")
    for _ in range(20):
        nds = random_normalized(rng, 50, 10)
        R = relation_matrix(nds, nds.feature_names).values
        if not np.array_equal(R, R.T) or np.any(np.diag(R) != 1.0):
            fails.append("relation matrix symmetry/diagonal")
            break

    elapsed = time.perf_counter() - t0
    if elapsed >= 5.0:
        fails.append(f"runtime {elapsed:.2f}s >= 5s")
    verdict(1, "formula suite", fails, f"{CASES} cases per property in {elapsed:.2f}s")


def test_criterion_2_hand_oracle():
    nds = normalize(load_csv(FIXTURES / "toy.csv", "label"))
    mv = dataset_memberships(nds, ["f"])
    fails = []
    # worked by hand: s1 vs s2 gives I(0, 0) = 1, s1 vs s3 gives I(0.75, 1) = 1
    hand_lower, hand_upper = [1.0, 0.25, 0.25], [0.75, 0.0, 0.75]
    if abs(mv.mu_lower[0] - 1.0) > TOL or abs(mv.mu_upper[0] - 0.75) > TOL:
        fails.append(f"s1 got ({mv.mu_lower[0]}, {mv.mu_upper[0]})")
    if np.max(np.abs(mv.mu_lower - hand_lower)) > TOL or np.max(np.abs(mv.mu_upper - hand_upper)) > TOL:
        fails.append("hand vector mismatch")
    lo, up = oracle_memberships(nds.X.tolist(), nds.label_values.tolist(), [0])
    if np.max(np.abs(mv.mu_lower - lo)) > TOL or np.max(np.abs(mv.mu_upper - up)) > TOL:
        fails.append("brute-force vector mismatch")
    if abs(dependency_degree(nds, ["f"]) - 0.5) > TOL:
        fails.append("dependency degree")
    verdict(2, "hand-oracle fixture", fails,
            f"mu_L={mv.mu_lower.tolist()} mu_U={mv.mu_upper.tolist()}")


def test_criterion_3_monotonicity():
    rng = np.random.default_rng(3)
    fails, pairs = [], 0
    i = 0
    while i < 200:
        nds = random_normalized(rng, 50, 10, n_classes=int(rng.integers(2, 4)),
                                grid=int(rng.choice([0, 0, 2, 4])) or None)
        if nds.d < 2:  # no proper subsets to compare
            continue
        i += 1
        for _ in range(3):
            perm = list(rng.permutation(nds.feature_names))
            k2 = int(rng.integers(2, nds.d + 1))
            k1 = int(rng.integers(1, k2))
            b1, b2 = perm[:k1], perm[:k2]
            m1, m2 = dataset_memberships(nds, b1), dataset_memberships(nds, b2)
            g1, g2 = dependency_degree(nds, b1), dependency_degree(nds, b2)
            pairs += 1
            if g1 > g2 + TOL:
                fails.append(f"dataset {i}: gamma {g1} > {g2}")
            if np.any(m1.mu_lower > m2.mu_lower + TOL):
                fails.append(f"dataset {i}: mu_L decreased")
            if np.any(m1.mu_upper < m2.mu_upper - TOL):
                fails.append(f"dataset {i}: mu_U increased")
    verdict(3, "monotonicity", fails[:5], f"{pairs} subset pairs over 200 datasets")


def test_criterion_4_oracle_equivalence():
    rng = np.random.default_rng(4)
    t0 = time.perf_counter()
    fails, sizes = [], []
    for i in range(50):
        nds = random_normalized(rng, 30, 12, n_classes=int(rng.integers(2, 4)),
                                grid=int(rng.choice([0, 1, 2, 3])) or None)
        ex, qr = exhaustive_reduct(nds), quickreduct(nds)
        if ex.gamma >= ex.gamma_full - EPS and qr.gamma < qr.gamma_full - EPS:
            fails.append(f"instance {i}: greedy gamma {qr.gamma} < {qr.gamma_full}")
        if len(ex.selected) > len(qr.selected):
            fails.append(f"instance {i}: exhaustive {len(ex.selected)} > greedy {len(qr.selected)}")
        sizes.append(len(qr.selected) - len(ex.selected))
    elapsed = time.perf_counter() - t0
    if elapsed >= 120:
        fails.append(f"runtime {elapsed:.1f}s >= 120s")
    verdict(4, "oracle equivalence", fails,
            f"50 instances, greedy larger on {sum(s > 0 for s in sizes)}, {elapsed:.1f}s")


def _benchmarks(keys):
    root = benchmark_dir()
    paths = {k: benchmarks.find_benchmark(root, k) for k in keys}
    missing = [k for k, p in paths.items() if p is None]
    return paths, missing


def test_criterion_5_reduct_counts():
    title = "reduct counts on public datasets"
    paths, missing = _benchmarks(("uci1", "mendeley", "uci2"))
    if missing:
        record(5, title, "SKIPPED", f"datasets not found ({', '.join(missing)}); set FRSFS_DATA_DIR")
        pytest.skip("benchmark datasets unavailable")
    expected = {"uci1": (24, 4), "mendeley": (30, 5), "uci2": (9, 0)}
    fails, notes = [], []
    for key, (target, tol) in expected.items():
        ds = benchmarks.load_benchmark(paths[key], key)
        red = quickreduct(normalize(ds))
        n = len(red.selected)
        ov = overlap(red.selected, benchmarks.REFERENCE_REDUCTS[key])
        notes.append(f"{key} {n} selected, {len(ov['common'])} shared with reference "
                     f"(jaccard {ov['jaccard']:.2f})")
        if abs(n - target) > tol:
            fails.append(f"{key}: {n} selected, expected {target}+-{tol}")
    detail = "; ".join(notes)
    if fails:
        fails.append(detail)
    verdict(5, title, fails, detail)


def test_criterion_6_universal_intersection(tmp_path):
    files = [str(FIXTURES / f"table4_{k}.json") for k in ("uci1", "mendeley", "uci2")]
    fails = []
    t0 = time.perf_counter()
    outs = []
    for i in range(2):
        out = tmp_path / f"u{i}.json"
        if main(["intersect", *files, "--out", str(out)]) != 0:
            fails.append("intersect exited non-zero")
        outs.append(out.read_bytes() if out.exists() else b"")
    elapsed = (time.perf_counter() - t0) / 2
    got = set(json.loads(outs[0])["universal"]) if outs[0] else set()
    if got != NINE:
        fails.append(f"got {sorted(got)}")
    if outs[0] != outs[1]:
        fails.append("output differs between runs")
    if elapsed >= 1.0:
        fails.append(f"runtime {elapsed:.2f}s >= 1s")
    verdict(6, "universal intersection", fails, f"{len(got)} features in {elapsed * 1000:.0f} ms")


def test_criterion_7_detection_quality():
    title = "detection quality (10-fold CV)"
    paths, missing = _benchmarks(("uci1", "mendeley"))
    if missing:
        record(7, title, "SKIPPED", f"datasets not found ({', '.join(missing)}); set FRSFS_DATA_DIR")
        pytest.skip("benchmark datasets unavailable")
    t0 = time.perf_counter()
    rf = [ClassifierSpec("random_forest", seed=0)]
    fails, notes = [], []
    for key, selectors in (("uci1", ["frs", "universal"]), ("mendeley", ["universal"])):
        ds = benchmarks.load_benchmark(paths[key], key)
        rep = run_protocol(None, ds, selectors, rf, positive=benchmarks.PRESETS[key].positive, k=10)
        for cell in rep.cells:
            f = cell["f_measure"]
            floor = 0.90 if cell["selector"] == "frs" else 0.88
            notes.append(f"{key}/{cell['selector']} F={f:.3f}")
            if f < floor:
                fails.append(f"{key}/{cell['selector']} F={f:.3f} < {floor}")
    elapsed = time.perf_counter() - t0
    if elapsed >= 600:
        fails.append(f"runtime {elapsed:.0f}s >= 600s")
    verdict(7, title, fails, ", ".join(notes) + f" in {elapsed:.0f}s")


def _grad_check_worst():
    r = np.random.default_rng(0)
    X = r.random((6, 3))
    T = np.eye(2)[r.integers(0, 2, 6)]
    params = init_params(3, 4, 2, r, scale=1.0)
    _, grads = loss_and_grad(params, X, T)
    h, worst = 1e-6, 0.0
    for key, value in params.items():
        flat = value.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            up, _ = loss_and_grad(params, X, T)
            flat[i] = orig - h
            down, _ = loss_and_grad(params, X, T)
            flat[i] = orig
            num = (up - down) / (2 * h)
            ana = grads[key].reshape(-1)[i]
            worst = max(worst, abs(num - ana) / max(abs(num), abs(ana), 1e-8))
    return worst


def test_criterion_8_classifier_sanity():
    fails, notes = [], []
    tr = normalize(separable(300, 2, 0.5, seed=11))
    te = normalize(separable(300, 2, 0.5, seed=12))
    for kind in ("random_forest", "mlp", "smo"):
        spec = ClassifierSpec(kind, seed=7)
        a = train(spec, tr, n_jobs=1)
        f = f_measure(confusion(te.labels, a.predict_dataset(te), {"phish"}))
        notes.append(f"{kind} F={f:.3f}")
        if f < 0.95:
            fails.append(f"{kind} F={f:.3f} < 0.95")
        b = train(spec, tr, n_jobs=1)
        c = train(spec, tr, n_jobs=3)
        dumps = [json.dumps(m.to_dict(), sort_keys=True) for m in (a, b, c)]
        if dumps[0] != dumps[1]:
            fails.append(f"{kind} differs across runs")
        if dumps[0] != dumps[2]:
            fails.append(f"{kind} differs across thread counts")

    worst = _grad_check_worst()
    notes.append(f"grad rel err {worst:.1e}")
    if not worst <= 1e-5:
        fails.append(f"mlp gradient check {worst:.2e}")

    rng = np.random.default_rng(8)
    X = rng.random((200, 3))
    y = np.where(X[:, 0] + X[:, 1] + 0.2 * rng.standard_normal(200) > 1, 1.0, -1.0)
    alpha, w, b, _ = smo_binary(X, y, C=1.0, tol=1e-3)
    kkt = float(np.max(kkt_residuals(X, y, alpha, w, b, 1.0)[alpha > 0]))
    notes.append(f"KKT {kkt:.1e}")
    if not kkt <= 1e-3:
        fails.append(f"smo KKT residual {kkt:.2e}")
    if not math.isclose(float(np.dot(alpha, y)), 0.0, abs_tol=1e-9):
        fails.append("smo equality constraint")
    verdict(8, "classifier sanity", fails, ", ".join(notes))
