import json

import numpy as np
import pytest

from conftest import make_ds, separable
from frsfs.classifiers import ClassifierSpec, Model, load_model, predict, save_model, train
from frsfs.classifiers.mlp import forward, hidden_units, init_params, loss_and_grad
from frsfs.classifiers.smo import kkt_residuals, smo_binary
from frsfs.dataset import normalize
from frsfs.errors import ArityMismatch, DegenerateLabels, EmptySubset, InputError, NonFiniteValue
from frsfs.evaluation import confusion, f_measure

KINDS = ["random_forest", "mlp", "smo"]


def fmeasure(truth, pred, positive="phish"):
    return f_measure(confusion(truth, pred, {positive}))


@pytest.fixture(scope="module")
def margin_sets():
    return normalize(separable(300, 2, 0.5, seed=11)), normalize(separable(300, 2, 0.5, seed=12))


@pytest.mark.parametrize("kind", KINDS)
def test_margin_set(kind, margin_sets):
    tr, te = margin_sets
    m = train(ClassifierSpec(kind, seed=5), tr)
    assert fmeasure(tr.labels, m.predict_dataset(tr)) >= 0.99
    assert fmeasure(te.labels, m.predict_dataset(te)) >= 0.95


@pytest.mark.parametrize("kind", KINDS)
def test_constant_features_predict_majority(kind):
    ds = make_ds(np.ones((12, 2)), ["a"] * 8 + ["b"] * 4)
    m = train(ClassifierSpec(kind, {"epochs": 50} if kind == "mlp" else {}, seed=1), ds)
    assert set(m.predict_dataset(ds)) == {"a"}


@pytest.mark.parametrize("kind", KINDS)
def test_deterministic(kind, margin_sets):
    tr, te = margin_sets
    spec = ClassifierSpec(kind, seed=42)
    a, b = train(spec, tr), train(spec, tr)
    assert list(a.predict_dataset(te)) == list(b.predict_dataset(te))
    assert save_json(a) == save_json(b)


def save_json(model):
    return json.dumps(model.to_dict(), sort_keys=True)


def test_forest_thread_count_invariant(rng):
    X = rng.random((250, 6))
    y = np.where(X[:, 0] + 0.3 * rng.standard_normal(250) > 0.5, "phish", "legit")
    ds = make_ds(X, y)
    spec = ClassifierSpec("random_forest", {"n_trees": 24}, seed=9)
    one, four = train(spec, ds, n_jobs=1), train(spec, ds, n_jobs=4)
    assert save_json(one) == save_json(four)


@pytest.mark.parametrize("kind", KINDS)
def test_feature_order_invariance(kind, rng):
    X = rng.random((120, 4))
    y = np.where(X[:, 1] - X[:, 3] > 0, "phish", "legit")
    ds = make_ds(X, y, names=["w", "x", "y", "z"])
    perm = ["z", "x", "w", "y"]
    spec = ClassifierSpec(kind, {"epochs": 60} if kind == "mlp" else {}, seed=3)
    a = train(spec, ds)
    b = train(spec, ds.select(perm))
    probe = rng.random((50, 4))
    pa = a.predict_rows(probe)
    pb = b.predict_rows(probe[:, ds.index_of(perm)])
    assert list(pa) == list(pb)


@pytest.mark.parametrize("kind", KINDS)
def test_predict_contract(kind, margin_sets):
    tr, _ = margin_sets
    m = train(ClassifierSpec(kind, seed=0), tr)
    for i in range(5):
        assert predict(m, tr.X[i]) == tr.labels[i]
        assert predict(m, tr.X[i]) in m.classes
    with pytest.raises(ArityMismatch):
        predict(m, [0.5])
    with pytest.raises(NonFiniteValue):
        predict(m, [np.nan, 0.5])


def test_training_errors():
    ds = make_ds([[0.1], [0.2]], ["a", "a"])
    with pytest.raises(DegenerateLabels):
        train(ClassifierSpec("smo"), ds)
    with pytest.raises(EmptySubset):
        train(ClassifierSpec("smo"), make_ds([[0.1], [0.2]], ["a", "b"]), [])


def test_spec_validation():
    assert ClassifierSpec("rf").kind == "random_forest"
    assert ClassifierSpec("random_forest").params["n_trees"] == 100
    assert ClassifierSpec("mlp").params["learning_rate"] == 0.3
    with pytest.raises(InputError):
        ClassifierSpec("knn")
    with pytest.raises(InputError):
        ClassifierSpec("smo", {"C": -1.0})
    with pytest.raises(InputError):
        ClassifierSpec("mlp", {"lr": 0.1})


@pytest.mark.parametrize("kind", KINDS)
def test_save_load(kind, margin_sets, tmp_path):
    tr, te = margin_sets
    m = train(ClassifierSpec(kind, {"n_trees": 5} if kind == "random_forest" else {}, seed=2), tr)
    save_model(m, tmp_path / "m.json")
    back = load_model(tmp_path / "m.json")
    assert isinstance(back, Model)
    assert list(back.predict_dataset(te)) == list(m.predict_dataset(te))


def test_three_class_models(rng):
    # three corner clusters: each class is linearly separable from the rest
    centres = np.array([[0.15, 0.15], [0.85, 0.15], [0.5, 0.85]])
    c = rng.integers(0, 3, 180)
    X = np.clip(centres[c] + 0.08 * rng.standard_normal((180, 2)), 0, 1)
    ds = make_ds(X, np.array(["-1", "0", "1"])[c])
    for kind in KINDS:
        m = train(ClassifierSpec(kind, seed=1), ds)
        acc = np.mean(m.predict_dataset(ds) == ds.labels)
        assert acc >= 0.95, kind


class TestStump:
    def brute_force(self, X, y):
        best = (np.inf, None, None)
        n = len(y)
        for f in range(X.shape[1]):
            vals = np.unique(X[:, f])
            for lo, hi in zip(vals[:-1], vals[1:]):
                thr = (lo + hi) / 2
                mask = X[:, f] <= thr
                w = 0.0
                for part in (y[mask], y[~mask]):
                    p = np.bincount(part, minlength=2) / len(part)
                    w += len(part) / n * (1 - np.sum(p * p))
                if w < best[0] - 1e-15:
                    best = (w, f, thr)
        return best

    def test_depth_one_single_tree(self, rng):
        for _ in range(5):
            X = rng.random((40, 3))
            y = (X[:, 1] + 0.3 * rng.random(40) > 0.6).astype(int)
            ds = make_ds(X, np.where(y == 1, "b", "a"), names=["a0", "a1", "a2"])
            spec = ClassifierSpec("random_forest", {"n_trees": 1, "max_depth": 1,
                                                    "bootstrap": False, "max_features": "all"})
            tree = train(spec, ds).state["trees"][0]
            _, f, thr = self.brute_force(X, y)
            assert tree["feature"][0] == f
            assert tree["threshold"][0] == pytest.approx(thr, abs=1e-12)
            assert len(tree["feature"]) == 3


class TestSmo:
    def test_kkt_at_convergence(self, rng):
        X = rng.random((200, 3))
        y = np.where(X[:, 0] + X[:, 1] + 0.2 * rng.standard_normal(200) > 1, 1.0, -1.0)
        alpha, w, b, _ = smo_binary(X, y, C=1.0, tol=1e-3)
        sv = alpha > 0
        assert sv.any()
        assert np.max(kkt_residuals(X, y, alpha, w, b, 1.0)[sv]) <= 1e-3
        assert abs(np.dot(alpha, y)) <= 1e-9
        assert np.all((alpha >= 0) & (alpha <= 1.0))

    def test_separable_weights(self):
        X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
        y = np.array([-1.0, -1.0, 1.0, 1.0])
        alpha, w, b, _ = smo_binary(X, y, C=10.0, tol=1e-6)
        # max-margin separator of x0: w = (2, 0), b = -1
        assert w == pytest.approx([2.0, 0.0], abs=1e-5)
        assert b == pytest.approx(-1.0, abs=1e-5)


class TestMlp:
    def test_gradient_check(self):
        r = np.random.default_rng(0)
        X = r.random((5, 3))
        T = np.eye(2)[r.integers(0, 2, 5)]
        params = init_params(3, 4, 2, r, scale=1.0)
        _, grads = loss_and_grad(params, X, T)
        h = 1e-6
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
                rel = abs(num - ana) / max(abs(num), abs(ana), 1e-8)
                assert rel <= 1e-5, (key, i, num, ana)

    def test_shapes(self):
        assert hidden_units(30, 2) == 16
        assert hidden_units(9, 3) == 6
        p = init_params(3, 4, 2, np.random.default_rng(0))
        H, O = forward(p, np.zeros((7, 3)))
        assert H.shape == (7, 4) and O.shape == (7, 2)
        assert all(np.all(np.abs(v) <= 0.05) for v in p.values())
