import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sleepbench.dataio import Dataset, make_fixture, parse_csv
from sleepbench.errors import DegenerateDataError, DimensionError
from sleepbench.preprocess import (
    apply_normalizer,
    fit_normalizer,
    normalize_split,
    prepare,
    split_50_50,
)
from sleepbench.tensor import Rng


def toy(n, seed=0):
    rng = Rng(seed)
    labels = np.arange(n) % 2
    return Dataset("sleep_study", rng.normal((n, 3)), labels, ())


class TestSplit:
    @pytest.mark.parametrize("n,n_train,n_test", [(104, 52, 52), (86, 43, 43),
                                                  (50, 25, 25), (5, 3, 2)])
    def test_sizes(self, n, n_train, n_test):
        split = split_50_50(toy(n), Rng(1))
        assert (split.train.n, split.test.n) == (n_train, n_test)

    def test_deterministic(self):
        a = split_50_50(toy(30), Rng(4))
        b = split_50_50(toy(30), Rng(4))
        np.testing.assert_array_equal(a.train_indices, b.train_indices)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(4, 60), st.integers(0, 2**31))
    def test_partition_and_both_classes(self, n, seed):
        split = split_50_50(toy(n), Rng(seed))
        joined = np.sort(np.concatenate([split.train_indices, split.test_indices]))
        np.testing.assert_array_equal(joined, np.arange(n))
        assert split.train.n == math.ceil(n / 2)
        for half in (split.train, split.test):
            assert set(half.labels) == {0, 1}

    def test_too_small(self):
        with pytest.raises(DegenerateDataError):
            split_50_50(toy(3), Rng(0))

    def test_gives_up_after_redraws(self):
        # one positive row can never land in both halves
        data = Dataset("sleep_study", np.zeros((6, 1)), [1, 0, 0, 0, 0, 0], ())
        with pytest.raises(DegenerateDataError):
            split_50_50(data, Rng(0))


class TestNormalizer:
    def test_column_stats(self):
        stats = fit_normalizer([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]])
        np.testing.assert_allclose(stats.means, [2.0, 5.0])
        np.testing.assert_allclose(stats.stds, [math.sqrt(2 / 3), 0.0])
        assert list(stats.constant) == [False, True]

    def test_two_pass_oracle(self):
        x = Rng(8).normal((10, 3))
        stats = fit_normalizer(x)
        for j in range(3):
            col = list(x[:, j])
            mean = sum(col) / len(col)
            var = sum((v - mean) ** 2 for v in col) / len(col)
            assert stats.means[j] == pytest.approx(mean, abs=1e-12)
            assert stats.stds[j] == pytest.approx(math.sqrt(var), abs=1e-12)

    def test_zscore_of_training_matrix(self):
        x = Rng(2).normal((12, 4)) * 3 + 1
        x[:, 2] = 7.0
        z = apply_normalizer(x, fit_normalizer(x))
        np.testing.assert_allclose(z[:, [0, 1, 3]].mean(axis=0), 0, atol=1e-9)
        np.testing.assert_allclose(z[:, [0, 1, 3]].std(axis=0), 1, atol=1e-9)
        np.testing.assert_array_equal(z[:, 2], 0.0)

    def test_single_test_row(self):
        stats = fit_normalizer([[1.0], [3.0]])
        assert stats.means[0] == 2.0 and stats.stds[0] == 1.0
        np.testing.assert_array_equal(apply_normalizer([[4.0]], stats), [[2.0]])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            apply_normalizer(np.ones((2, 3)), fit_normalizer(np.ones((2, 2))))

    def test_minmax_switch(self):
        stats = fit_normalizer([[0.0], [4.0]], method="minmax")
        np.testing.assert_array_equal(apply_normalizer([[1.0], [4.0]], stats), [[0.25], [1.0]])


class TestNoLeakage:
    def test_stats_come_from_train_rows_only(self):
        data = parse_csv(make_fixture("sleep_cycle", 50, Rng(3)), "sleep_cycle")
        split = split_50_50(data, Rng(5))
        expected = fit_normalizer(data.features[split.train_indices])
        done = normalize_split(split)
        np.testing.assert_array_equal(done.stats.means, expected.means)
        np.testing.assert_array_equal(
            done.test.features, apply_normalizer(data.features[split.test_indices], expected)
        )

    def test_test_rows_do_not_affect_stats(self):
        data = parse_csv(make_fixture("sleep_study", 40, Rng(3)), "sleep_study")
        split = split_50_50(data, Rng(1))
        tampered = data.features.copy()
        tampered[split.test_indices] *= 1000.0
        other = Dataset(data.id, tampered, data.labels, data.schema)
        a = normalize_split(split)
        b = normalize_split(split_50_50(other, Rng(1)))
        np.testing.assert_array_equal(a.stats.means, b.stats.means)
        np.testing.assert_array_equal(a.train.features, b.train.features)

    def test_end_to_end_determinism(self):
        data = parse_csv(make_fixture("sleep_deprivation", 86, Rng(3)), "sleep_deprivation")
        a, b = prepare(data, 11), prepare(data, 11)
        np.testing.assert_array_equal(a.train.features, b.train.features)
        np.testing.assert_array_equal(a.test.features, b.test.features)
