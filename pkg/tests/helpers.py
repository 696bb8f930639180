"""Independent oracles shared by the test modules."""
import numpy as np


def central_diff(f, x, eps=1e-5):
    """Numerical gradient of scalar ``f`` w.r.t. array ``x`` (perturbed in place)."""
    grad = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        orig = x[idx]
        x[idx] = orig + eps
        hi = f()
        x[idx] = orig - eps
        lo = f()
        x[idx] = orig
        grad[idx] = (hi - lo) / (2 * eps)
    return grad


def rel_error(analytic, numeric, floor=1e-6):
    """Max elementwise |a - n| / max(|a|, |n|, floor)."""
    a = np.asarray(analytic, dtype=float)
    n = np.asarray(numeric, dtype=float)
    denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
    return float(np.max(np.abs(a - n) / denom))


def brute_knn(X, y, q, k):
    """Sort all distances with Python's sort; majority vote, tie -> nearest."""
    dists = sorted((float(np.sqrt(sum((a - b) ** 2 for a, b in zip(row, q)))), i)
                   for i, row in enumerate(X))
    top = [int(y[i]) for _, i in dists[:k]]
    ones = sum(top)
    if 2 * ones > k:
        return 1
    if 2 * ones < k:
        return 0
    return top[0]


def brute_root_split(x, y):
    """Enumerate every midpoint threshold on a single feature by counting."""
    values = sorted(set(x))
    best = None
    n = len(y)
    for lo, hi in zip(values, values[1:]):
        thr = (lo + hi) / 2
        left = [lab for v, lab in zip(x, y) if v <= thr]
        right = [lab for v, lab in zip(x, y) if v > thr]
        def g(part):
            p = sum(part) / len(part)
            return 1 - p * p - (1 - p) * (1 - p)
        score = (len(left) * g(left) + len(right) * g(right)) / n
        if best is None or score < best[1] - 1e-12:
            best = (thr, score)
    return best


def metrics_oracle(tp, tn, fp, fn):
    """Second code path for the six metrics, written from the formulas."""
    def div(a, b):
        return a / b if b else 0.0
    total = tp + tn + fp + fn
    precision = div(tp, tp + fp)
    recall = div(tp, tp + fn)
    return {
        "se": div(tp, tp + fn),
        "sp": div(tn, tn + fp),
        "ac": (tp + tn) / total,
        "pr": precision,
        "re": recall,
        "f1": div(2 * precision * recall, precision + recall),
    }
