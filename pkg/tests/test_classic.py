import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import brute_knn, central_diff, rel_error
from sleepbench import classic, serialize
from sleepbench.classic import (
    GaussianNB,
    LinearSVM,
    LogisticRegression,
    TrainConfig,
    best_split,
    gini,
    hinge_loss_grad,
    logreg_loss_grad,
    predict,
    train_dtree,
    train_gnb,
    train_knn,
    train_logreg,
    train_svm,
)
from sleepbench.errors import ContractError, DimensionError, DivergenceError, ParameterError
from sleepbench.tensor import Rng

SEPARABLE_X = np.array([[-1.0], [-2.0], [1.0], [2.0]])
SEPARABLE_Y = np.array([0, 0, 1, 1])


def random_problem(seed, n=20, d=3):
    rng = Rng(seed)
    X = rng.normal((n, d))
    y = (X @ rng.normal(d) + 0.5 * rng.normal(n) > 0).astype(int)
    if y.min() == y.max():
        y[0] = 1 - y[0]
    return X, y


class TestLogisticRegression:
    def test_zero_weights_predict_one(self):
        model = LogisticRegression(np.zeros(3), 0.0)
        x = Rng(0).normal((5, 3))
        np.testing.assert_array_equal(model.predict_proba(x), 0.5)
        np.testing.assert_array_equal(predict(model, x), 1)

    def test_separable(self):
        model = train_logreg(SEPARABLE_X, SEPARABLE_Y, TrainConfig(learning_rate=0.5, epochs=500))
        np.testing.assert_array_equal(model.predict(SEPARABLE_X), SEPARABLE_Y)

    @pytest.mark.parametrize("seed", range(10))
    def test_gradient(self, seed):
        X, y = random_problem(seed, n=6, d=3)
        rng = Rng(seed + 100)
        w, b = rng.normal(3), np.array([rng.normal(1)[0]])
        l2 = 0.1
        _, gw, gb = logreg_loss_grad(w, b[0], X, y, l2)
        num_w = central_diff(lambda: logreg_loss_grad(w, b[0], X, y, l2)[0], w)
        num_b = central_diff(lambda: logreg_loss_grad(w, b[0], X, y, l2)[0], b)
        assert rel_error(gw, num_w) <= 1e-4
        assert rel_error([gb], num_b) <= 1e-4

    def test_divergence(self):
        X = np.array([[1e200], [-1e200]])
        with pytest.raises(DivergenceError, match="learning rate"):
            train_logreg(X, [1, 0], TrainConfig(learning_rate=1e200, epochs=5))


class TestSVM:
    def test_zero_weights_hinge_is_one(self):
        X, y = random_problem(1)
        loss, _, _ = hinge_loss_grad(np.zeros(3), 0.0, X, y, l2=0.0)
        assert loss == 1.0

    def test_separable(self):
        model = train_svm(SEPARABLE_X, SEPARABLE_Y)
        np.testing.assert_array_equal(model.predict(SEPARABLE_X), SEPARABLE_Y)

    def test_zero_score_is_class_one(self):
        assert LinearSVM(np.zeros(2), 0.0).predict([[3.0, -1.0]])[0] == 1

    @pytest.mark.parametrize("seed", range(10))
    def test_subgradient_away_from_kinks(self, seed):
        X, y = random_problem(seed, n=8, d=3)
        rng = Rng(seed + 7)
        w, b = rng.normal(3), np.array([0.1])
        margins = (2 * y - 1) * (X @ w + b[0])
        assert np.min(np.abs(margins - 1.0)) > 1e-3
        l2 = 0.05
        _, gw, gb = hinge_loss_grad(w, b[0], X, y, l2)
        num_w = central_diff(lambda: hinge_loss_grad(w, b[0], X, y, l2)[0], w)
        num_b = central_diff(lambda: hinge_loss_grad(w, b[0], X, y, l2)[0], b)
        assert rel_error(gw, num_w) <= 1e-4
        assert rel_error([gb], num_b) <= 1e-4


class TestDecisionTree:
    def test_pure_node_is_leaf(self):
        model = train_dtree(np.arange(6.0)[:, None], np.ones(6, dtype=int))
        assert model.root.is_leaf and model.root.label == 1 and model.root.impurity == 0.0

    def test_balanced_gini(self):
        assert gini([0, 0, 0, 1, 1, 1]) == 0.5

    def test_simple_threshold(self):
        X = np.array([[1.0], [2.0], [3.0], [4.0]])
        model = train_dtree(X, [0, 0, 1, 1], TrainConfig(min_leaf=1))
        assert model.root.threshold == 2.5
        np.testing.assert_array_equal(model.predict(X), [0, 0, 1, 1])

    def test_tie_break_lowest_feature_then_threshold(self):
        X = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
        j, thr, _ = best_split(X, np.array([0, 1, 0, 1]))
        assert j == 0
        assert thr == 0.5

    @pytest.mark.parametrize("seed", range(10))
    def test_validity(self, seed):
        X, y = random_problem(seed, n=40, d=3)
        cfg = TrainConfig(max_depth=4, min_leaf=2)
        model = train_dtree(X, y, cfg)
        assert model.depth() <= 4

        def check(node, rows, lo, hi):
            if node.is_leaf:
                labels = y[rows]
                assert node.label == int(2 * labels.sum() >= labels.size)
                assert labels.size >= cfg.min_leaf
                return
            assert node.left is not None and node.right is not None
            j, t = node.feature, node.threshold
            assert lo[j] < t < hi[j]
            left = rows[X[rows, j] <= t]
            right = rows[X[rows, j] > t]
            check(node.left, left, lo, {**hi, j: min(hi[j], t)})
            check(node.right, right, {**lo, j: max(lo[j], t)}, hi)

        inf = {j: math.inf for j in range(3)}
        check(model.root, np.arange(40), {j: -math.inf for j in range(3)}, inf)


class TestKNN:
    def test_self_query(self):
        X, y = random_problem(2)
        model = train_knn(X, y, TrainConfig(k=1))
        np.testing.assert_array_equal(predict(model, X), y)

    def test_k3_example(self):
        X = np.array([[0, 0], [0.1, 0], [5, 5], [5.1, 5]])
        model = train_knn(X, [0, 0, 1, 1], TrainConfig(k=3))
        assert model.predict([[0.05, 0.0]])[0] == 0

    def test_even_tie_uses_nearest(self):
        X = np.array([[0.0], [1.0]])
        model = train_knn(X, [1, 0], TrainConfig(k=2))
        assert model.predict([[0.9]])[0] == 0
        assert model.predict([[0.1]])[0] == 1

    def test_k_too_large(self):
        with pytest.raises(ParameterError):
            train_knn(np.zeros((3, 1)), [0, 1, 0], TrainConfig(k=4))

    def test_row_order_invariance(self):
        X, y = random_problem(5, n=30)
        q = Rng(1).normal((10, 3))
        perm = Rng(2).permutation(30)
        a = train_knn(X, y, TrainConfig(k=5)).predict(q)
        b = train_knn(X[perm], y[perm], TrainConfig(k=5)).predict(q)
        np.testing.assert_array_equal(a, b)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**31), st.integers(2, 50), st.integers(1, 5), st.integers(1, 10))
    def test_matches_brute_force(self, seed, n, d, k):
        k = min(k, n)
        rng = Rng(seed)
        X, q = rng.normal((n, d)), rng.normal((4, d))
        y = rng.integers(0, 2, n)
        got = train_knn(X, y, TrainConfig(k=k)).predict(q)
        assert list(got) == [brute_knn(X, y, row, k) for row in q]


class TestGaussianNB:
    def test_symmetric_tie_goes_to_zero(self):
        X = np.array([[-2.0], [0.0], [0.0], [2.0]])
        model = train_gnb(X, [0, 0, 1, 1])
        np.testing.assert_array_equal(model.means[:, 0], [-1.0, 1.0])
        lp = model.log_posteriors([[0.0]])
        assert lp[0, 0] == lp[0, 1]
        assert model.predict([[0.0]])[0] == 0

    def test_hand_computed_log_densities(self):
        model = GaussianNB(np.array([[0.0, 1.0], [2.0, -1.0]]),
                           np.array([[1.0, 4.0], [0.25, 1.0]]),
                           np.array([0.4, 0.6]))
        q = [1.5, 0.0]

        def log_normal(x, m, v):
            return -0.5 * math.log(2 * math.pi * v) - (x - m) ** 2 / (2 * v)

        c0 = math.log(0.4) + log_normal(1.5, 0, 1) + log_normal(0, 1, 4)
        c1 = math.log(0.6) + log_normal(1.5, 2, 0.25) + log_normal(0, -1, 1)
        np.testing.assert_allclose(model.log_posteriors([q])[0], [c0, c1], rtol=1e-12)
        assert model.predict([q])[0] == int(c1 > c0)

    def test_priors(self):
        X = Rng(0).normal((10, 2))
        model = train_gnb(X, [0] * 3 + [1] * 7)
        np.testing.assert_allclose(model.priors, [0.3, 0.7])

    def test_variance_floor(self):
        X = np.column_stack([np.zeros(6), np.arange(6.0)])
        model = train_gnb(X, [0, 0, 0, 1, 1, 1])
        assert np.all(model.variances >= classic.VARIANCE_FLOOR)

    def test_row_order_invariance(self):
        X, y = random_problem(9, n=30)
        q = Rng(1).normal((10, 3))
        perm = Rng(2).permutation(30)
        np.testing.assert_array_equal(train_gnb(X, y).predict(q),
                                      train_gnb(X[perm], y[perm]).predict(q))


class TestUniformContract:
    KINDS = ("logreg", "dtree", "knn", "gnb", "svm")

    @pytest.mark.parametrize("kind", KINDS)
    def test_deterministic(self, kind):
        X, y = random_problem(4, n=30)
        a = classic.train(kind, X, y, TrainConfig(k=3))
        b = classic.train(kind, X, y, TrainConfig(k=3))
        assert serialize.dumps(a) == serialize.dumps(b)

    @pytest.mark.parametrize("kind", ("logreg", "svm"))
    def test_gradient_models_row_order(self, kind):
        X, y = random_problem(4, n=30)
        perm = Rng(5).permutation(30)
        a = classic.train(kind, X, y)
        b = classic.train(kind, X[perm], y[perm])
        np.testing.assert_allclose(a.weights, b.weights, rtol=1e-10, atol=1e-12)

    @pytest.mark.parametrize("kind", KINDS)
    def test_dimension_mismatch(self, kind):
        X, y = random_problem(4, n=30)
        model = classic.train(kind, X, y, TrainConfig(k=3))
        with pytest.raises(DimensionError):
            predict(model, np.zeros((2, 4)))

    def test_empty_batch(self):
        with pytest.raises(ContractError):
            predict(LogisticRegression(np.zeros(2), 0.0), np.zeros((0, 2)))

    @pytest.mark.parametrize("kind", KINDS)
    def test_save_load(self, kind, tmp_path):
        X, y = random_problem(6, n=30)
        model = classic.train(kind, X, y, TrainConfig(k=3))
        serialize.save(model, tmp_path / "m.json")
        loaded = serialize.load(tmp_path / "m.json")
        assert loaded.kind == kind
        q = Rng(0).normal((15, 3))
        np.testing.assert_array_equal(loaded.predict(q), model.predict(q))

    def test_config_validation(self):
        with pytest.raises(ParameterError):
            TrainConfig(learning_rate=0)
        with pytest.raises(ParameterError):
            TrainConfig(k=0)
