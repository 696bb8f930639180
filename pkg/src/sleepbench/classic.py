"""Traditional binary classifiers: logistic regression, CART tree, k-NN,
Gaussian naive Bayes and a linear SVM.

All trainers take a normalized feature matrix ``X`` of shape (n, d) and labels
``y`` in {0, 1}. Gradient-trained models use full-batch gradient descent
from zero-initialized weights, so training is deterministic and independent
of row order.

Tie rules: logistic probability exactly 0.5 -> class 1; SVM score exactly 0 ->
class 1; k-NN vote tie -> class of the single nearest neighbour; naive Bayes
posterior tie -> class 0; tree leaf with equal class counts -> class 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ContractError, DimensionError, DivergenceError, ParameterError
from .tensor import as_array

VARIANCE_FLOOR = 1e-9
GINI_TOL = 1e-12


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 300
    l2: float = 1e-3
    k: int = 1
    max_depth: int = 5
    min_leaf: int = 2
    seed: int = 0

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ParameterError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.epochs < 0:
            raise ParameterError(f"epochs must be nonnegative, got {self.epochs}")
        if self.l2 < 0:
            raise ParameterError(f"l2 must be nonnegative, got {self.l2}")
        for name in ("k", "max_depth", "min_leaf"):
            if getattr(self, name) < 1:
                raise ParameterError(f"{name} must be a positive integer")


def _check_training_data(X, y):
    X = as_array(X, rank=2)
    y = np.asarray(y)
    if y.shape != (X.shape[0],):
        raise DimensionError(f"labels shape {y.shape} does not match X shape {X.shape}")
    if not np.all((y == 0) | (y == 1)):
        raise ParameterError("labels must be 0 or 1")
    return X, y.astype(np.int64)


def _check_query(X, d):
    X = as_array(X, rank=(1, 2))
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != d:
        raise DimensionError(f"model expects {d} features, got shape {X.shape}")
    return X


# --- logistic regression -------------------------------------------------------


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logreg_loss_grad(w, b, X, y, l2):
    """Mean negative log-likelihood plus ``l2/2 * |w|^2`` and its gradient."""
    z = X @ w + b
    # log(1 + e^z) - y z, computed without overflow
    loss = np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * (w @ w)
    r = (sigmoid(z) - y) / X.shape[0]
    return loss, X.T @ r + l2 * w, r.sum()


@dataclass
class LogisticRegression:
    weights: np.ndarray
    bias: float
    kind = "logreg"

    @property
    def d(self):
        return self.weights.shape[0]

    def predict_proba(self, X):
        X = _check_query(X, self.d)
        return sigmoid(X @ self.weights + self.bias)

    def predict(self, X):
        return (self.predict_proba(X) >= 0.5).astype(np.int64)

    def to_dict(self):
        return {"weights": self.weights.tolist(), "bias": self.bias}

    @classmethod
    def from_dict(cls, params):
        return cls(np.asarray(params["weights"], dtype=np.float64), float(params["bias"]))


def train_logreg(X, y, cfg: TrainConfig | None = None) -> LogisticRegression:
    cfg = cfg or TrainConfig()
    X, y = _check_training_data(X, y)
    w = np.zeros(X.shape[1])
    b = 0.0
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(cfg.epochs):
            loss, gw, gb = logreg_loss_grad(w, b, X, y, cfg.l2)
            if not np.isfinite(loss):
                raise DivergenceError(epoch, cfg.learning_rate, loss)
            w = w - cfg.learning_rate * gw
            b = b - cfg.learning_rate * gb
    if not (np.all(np.isfinite(w)) and np.isfinite(b)):
        raise DivergenceError(cfg.epochs, cfg.learning_rate)
    return LogisticRegression(w, float(b))


# --- linear SVM -----------------------------------------------------------------


def hinge_loss_grad(w, b, X, y, l2):
    """L2-regularized mean hinge loss and a subgradient; ``y`` in {0, 1}.

    At margin exactly 1 the zero subgradient is used for that sample.
    """
    s = 2.0 * y - 1.0
    margins = s * (X @ w + b)
    active = margins < 1.0
    loss = 0.5 * l2 * (w @ w) + np.mean(np.maximum(0.0, 1.0 - margins))
    coef = np.where(active, -s, 0.0) / X.shape[0]
    return loss, X.T @ coef + l2 * w, coef.sum()


@dataclass
class LinearSVM:
    weights: np.ndarray
    bias: float
    kind = "svm"

    @property
    def d(self):
        return self.weights.shape[0]

    def decision_function(self, X):
        X = _check_query(X, self.d)
        return X @ self.weights + self.bias

    def predict(self, X):
        return (self.decision_function(X) >= 0.0).astype(np.int64)

    def to_dict(self):
        return {"weights": self.weights.tolist(), "bias": self.bias}

    @classmethod
    def from_dict(cls, params):
        return cls(np.asarray(params["weights"], dtype=np.float64), float(params["bias"]))


def train_svm(X, y, cfg: TrainConfig | None = None) -> LinearSVM:
    cfg = cfg or TrainConfig()
    X, y = _check_training_data(X, y)
    w = np.zeros(X.shape[1])
    b = 0.0
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(cfg.epochs):
            loss, gw, gb = hinge_loss_grad(w, b, X, y, cfg.l2)
            if not np.isfinite(loss):
                raise DivergenceError(epoch, cfg.learning_rate, loss)
            w = w - cfg.learning_rate * gw
            b = b - cfg.learning_rate * gb
    return LinearSVM(w, float(b))


# --- decision tree ----------------------------------------------------------------


def gini(labels) -> float:
    labels = np.asarray(labels)
    if labels.size == 0:
        return 0.0
    p1 = labels.mean()
    return 1.0 - p1 ** 2 - (1.0 - p1) ** 2


@dataclass
class Node:
    """Tree node; a leaf when ``feature`` is None. Rows with
    ``x[feature] <= threshold`` go left."""

    label: int
    n: int
    impurity: float
    feature: int | None = None
    threshold: float | None = None
    left: "Node | None" = None
    right: "Node | None" = None

    @property
    def is_leaf(self):
        return self.feature is None

    def to_dict(self):
        out = {"label": self.label, "n": self.n, "impurity": self.impurity}
        if not self.is_leaf:
            out.update(feature=self.feature, threshold=self.threshold,
                       left=self.left.to_dict(), right=self.right.to_dict())
        return out

    @classmethod
    def from_dict(cls, d):
        if "feature" not in d:
            return cls(int(d["label"]), int(d["n"]), float(d["impurity"]))
        return cls(int(d["label"]), int(d["n"]), float(d["impurity"]),
                   int(d["feature"]), float(d["threshold"]),
                   cls.from_dict(d["left"]), cls.from_dict(d["right"]))


def best_split(X, y, min_leaf: int = 1):
    """Exhaustive CART split search.

    Candidate thresholds are midpoints between consecutive distinct sorted
    values of each feature. Returns ``(feature, threshold, weighted_gini)``
    minimizing weighted Gini impurity, ties broken by lowest feature index
    then lowest threshold; ``None`` if no admissible split exists.
    """
    n = X.shape[0]
    best = None
    for j in range(X.shape[1]):
        order = np.argsort(X[:, j], kind="stable")
        xs, ys = X[order, j], y[order]
        ones_left = np.cumsum(ys)[:-1]
        n_left = np.arange(1, n)
        n_right = n - n_left
        ones_right = ys.sum() - ones_left
        p_l = ones_left / n_left
        p_r = ones_right / n_right
        g_l = 1.0 - p_l ** 2 - (1.0 - p_l) ** 2
        g_r = 1.0 - p_r ** 2 - (1.0 - p_r) ** 2
        weighted = (n_left * g_l + n_right * g_r) / n
        ok = (xs[1:] > xs[:-1]) & (n_left >= min_leaf) & (n_right >= min_leaf)
        for i in np.flatnonzero(ok):
            if best is None or weighted[i] < best[2] - GINI_TOL:
                best = (j, 0.5 * (xs[i] + xs[i + 1]), float(weighted[i]))
    return best


def _majority(y) -> int:
    return int(2 * y.sum() >= y.size)


def _grow(X, y, depth, cfg):
    node = Node(_majority(y), int(y.size), gini(y))
    if node.impurity == 0.0 or depth >= cfg.max_depth or y.size < 2 * cfg.min_leaf:
        return node
    split = best_split(X, y, cfg.min_leaf)
    if split is None or split[2] >= node.impurity - GINI_TOL:
        return node
    j, thr, _ = split
    go_left = X[:, j] <= thr
    node.feature, node.threshold = j, float(thr)
    node.left = _grow(X[go_left], y[go_left], depth + 1, cfg)
    node.right = _grow(X[~go_left], y[~go_left], depth + 1, cfg)
    return node


@dataclass
class DecisionTree:
    root: Node
    d: int
    kind = "dtree"

    def _leaf(self, x):
        node = self.root
        while not node.is_leaf:
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node

    def predict(self, X):
        X = _check_query(X, self.d)
        return np.array([self._leaf(x).label for x in X], dtype=np.int64)

    def depth(self) -> int:
        def walk(node):
            return 0 if node.is_leaf else 1 + max(walk(node.left), walk(node.right))
        return walk(self.root)

    def to_dict(self):
        return {"d": self.d, "root": self.root.to_dict()}

    @classmethod
    def from_dict(cls, params):
        return cls(Node.from_dict(params["root"]), int(params["d"]))


def train_dtree(X, y, cfg: TrainConfig | None = None) -> DecisionTree:
    cfg = cfg or TrainConfig()
    X, y = _check_training_data(X, y)
    return DecisionTree(_grow(X, y, 0, cfg), X.shape[1])


# --- k-nearest neighbours ------------------------------------------------------------


@dataclass
class KNearestNeighbors:
    X: np.ndarray
    y: np.ndarray
    k: int
    kind = "knn"

    @property
    def d(self):
        return self.X.shape[1]

    def predict(self, X):
        X = _check_query(X, self.d)
        dist = np.sqrt(((X[:, None, :] - self.X[None, :, :]) ** 2).sum(axis=2))
        # stable sort: equal distances resolve to the lower training index
        nearest = np.argsort(dist, axis=1, kind="stable")[:, : self.k]
        votes = self.y[nearest]
        ones = votes.sum(axis=1)
        out = (2 * ones > self.k).astype(np.int64)
        tied = 2 * ones == self.k
        out[tied] = votes[tied, 0]
        return out

    def to_dict(self):
        return {"X": self.X.tolist(), "y": self.y.tolist(), "k": self.k}

    @classmethod
    def from_dict(cls, params):
        return cls(np.asarray(params["X"], dtype=np.float64),
                   np.asarray(params["y"], dtype=np.int64), int(params["k"]))


def train_knn(X, y, cfg: TrainConfig | None = None) -> KNearestNeighbors:
    cfg = cfg or TrainConfig()
    X, y = _check_training_data(X, y)
    if cfg.k > X.shape[0]:
        raise ParameterError(f"k={cfg.k} exceeds the {X.shape[0]} training rows")
    return KNearestNeighbors(X.copy(), y.copy(), cfg.k)


# --- Gaussian naive Bayes --------------------------------------------------------------


@dataclass
class GaussianNB:
    means: np.ndarray  # (2, d)
    variances: np.ndarray  # (2, d)
    priors: np.ndarray  # (2,)
    kind = "gnb"

    @property
    def d(self):
        return self.means.shape[1]

    def log_posteriors(self, X):
        """Unnormalized log posteriors, shape (n, 2)."""
        X = _check_query(X, self.d)
        out = np.empty((X.shape[0], 2))
        for c in (0, 1):
            var = self.variances[c]
            ll = -0.5 * np.log(2 * np.pi * var) - (X - self.means[c]) ** 2 / (2 * var)
            out[:, c] = np.log(self.priors[c]) + ll.sum(axis=1)
        return out

    def predict(self, X):
        lp = self.log_posteriors(X)
        return (lp[:, 1] > lp[:, 0]).astype(np.int64)

    def to_dict(self):
        return {"means": self.means.tolist(), "variances": self.variances.tolist(),
                "priors": self.priors.tolist()}

    @classmethod
    def from_dict(cls, params):
        return cls(*(np.asarray(params[k], dtype=np.float64)
                     for k in ("means", "variances", "priors")))


def train_gnb(X, y, cfg: TrainConfig | None = None) -> GaussianNB:
    X, y = _check_training_data(X, y)
    if y.min() == y.max():
        raise ParameterError("naive Bayes needs both classes in the training data")
    means = np.stack([X[y == c].mean(axis=0) for c in (0, 1)])
    variances = np.stack([X[y == c].var(axis=0) for c in (0, 1)])
    priors = np.array([np.mean(y == 0), np.mean(y == 1)])
    return GaussianNB(means, np.maximum(variances, VARIANCE_FLOOR), priors)


ClassicModel = Union[LogisticRegression, DecisionTree, KNearestNeighbors, GaussianNB, LinearSVM]

TRAINERS = {
    "logreg": train_logreg,
    "dtree": train_dtree,
    "knn": train_knn,
    "gnb": train_gnb,
    "svm": train_svm,
}
MODEL_TYPES = {
    "logreg": LogisticRegression,
    "dtree": DecisionTree,
    "knn": KNearestNeighbors,
    "gnb": GaussianNB,
    "svm": LinearSVM,
}


def train(kind: str, X, y, cfg: TrainConfig | None = None) -> ClassicModel:
    try:
        trainer = TRAINERS[kind]
    except KeyError:
        raise ParameterError(f"unknown classifier kind {kind!r}") from None
    return trainer(X, y, cfg)


def predict(model: ClassicModel, X) -> np.ndarray:
    """Uniform inference entry point: one label in {0, 1} per row."""
    if np.asarray(X).size == 0:
        raise ContractError("cannot predict on an empty batch")
    return model.predict(X)

