"""Walk through the data side of the benchmark.

Generates a planted-signal Sleep-Study fixture, parses it through the
schema, splits it 50-50 and normalizes with training statistics only.
Run with ``python notebooks/01_data_and_split.py``.
"""
from sleepbench.dataio import SOURCE_ROW_COUNTS, make_fixture, parse_csv
from sleepbench.preprocess import prepare
from sleepbench.tensor import Rng

text = make_fixture("sleep_study", SOURCE_ROW_COUNTS["sleep_study"], Rng(0))
print("First CSV lines:")
print("\n".join(text.splitlines()[:4]))

data = parse_csv(text, "sleep_study")
print(f"\nparsed {data.n} rows x {data.d} features, positives: {int(data.labels.sum())}")

split = prepare(data, seed=0)
print(f"train/test sizes: {split.train.n}/{split.test.n}")
print("train feature means after z-scoring:", split.train.features.mean(axis=0).round(12) + 0.0)
print("test feature means (not forced to zero):", split.test.features.mean(axis=0).round(3))
