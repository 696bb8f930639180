"""Random 50-50 train/test split and feature normalization fitted on train."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .dataio import Dataset
from .errors import DegenerateDataError, DimensionError, ParameterError
from .tensor import Rng, as_array

MAX_REDRAWS = 100
METHODS = ("zscore", "minmax")


@dataclass(frozen=True)
class NormStats:
    """Per-feature statistics from the training rows.

    ``stds`` is the population standard deviation. ``constant`` marks columns
    whose spread is zero; those map to all-zeros on transform.
    """

    means: np.ndarray
    stds: np.ndarray
    mins: np.ndarray
    maxs: np.ndarray
    method: str = "zscore"

    @property
    def d(self) -> int:
        return self.means.shape[0]

    @property
    def constant(self) -> np.ndarray:
        return self.stds == 0.0


@dataclass(frozen=True)
class TrainTestSplit:
    train: Dataset
    test: Dataset
    seed: int
    train_indices: np.ndarray
    test_indices: np.ndarray
    stats: NormStats | None = field(default=None)


def _two_classes(labels) -> bool:
    return labels.size > 0 and labels.min() != labels.max()


def split_50_50(data: Dataset, rng: Rng, *, seed: int = 0) -> TrainTestSplit:
    """Shuffle rows and put the first ceil(n/2) into train.

    Draws are repeated (up to 100 times) until both halves contain both
    classes. ``seed`` is recorded on the result for provenance only.
    """
    if data.n < 4:
        raise DegenerateDataError(f"need at least 4 rows to split, got {data.n}")
    if not _two_classes(data.labels):
        raise DegenerateDataError("dataset has a single class")
    n_train = math.ceil(data.n / 2)
    for _ in range(MAX_REDRAWS):
        perm = rng.permutation(data.n)
        tr, te = perm[:n_train], perm[n_train:]
        if _two_classes(data.labels[tr]) and _two_classes(data.labels[te]):
            return TrainTestSplit(data.subset(tr), data.subset(te), seed, tr, te)
    raise DegenerateDataError(
        f"no two-class 50-50 split found in {MAX_REDRAWS} draws (n={data.n})"
    )


def fit_normalizer(train_features, method: str = "zscore") -> NormStats:
    x = as_array(train_features, rank=2)
    if x.shape[0] < 2:
        raise ParameterError("normalizer needs at least 2 training rows")
    if method not in METHODS:
        raise ParameterError(f"unknown normalization {method!r}; use one of {METHODS}")
    means = x.mean(axis=0)
    stds = np.sqrt(((x - means) ** 2).mean(axis=0))
    return NormStats(means, stds, x.min(axis=0), x.max(axis=0), method)


def apply_normalizer(features, stats: NormStats) -> np.ndarray:
    x = as_array(features, rank=2)
    if x.shape[1] != stats.d:
        raise DimensionError(
            f"features have {x.shape[1]} columns but stats cover {stats.d}"
        )
    if stats.method == "zscore":
        shift, scale = stats.means, stats.stds
    else:
        shift, scale = stats.mins, stats.maxs - stats.mins
    safe = np.where(scale == 0.0, 1.0, scale)
    out = (x - shift) / safe
    out[:, scale == 0.0] = 0.0
    return out


def normalize_split(split: TrainTestSplit, method: str = "zscore") -> TrainTestSplit:
    """Fit stats on the train half only and transform both halves."""
    stats = fit_normalizer(split.train.features, method)
    train = replace(split.train, features=apply_normalizer(split.train.features, stats))
    test = replace(split.test, features=apply_normalizer(split.test.features, stats))
    return replace(split, train=train, test=test, stats=stats)


def prepare(data: Dataset, seed: int, method: str = "zscore") -> TrainTestSplit:
    """Split with ``Rng(seed)`` and normalize: the full data-preparation step."""
    return normalize_split(split_50_50(data, Rng(seed), seed=seed), method)
