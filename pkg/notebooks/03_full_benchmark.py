"""Run the full 3 x 8 grid on fixtures and print both tables.

Equivalent to ``bench fixtures`` followed by ``bench run`` with
notebooks/benchmark.json, but done in-process.
"""
from sleepbench import harness
from sleepbench.dataio import DATASET_IDS

cfg = harness.RunConfig(
    datasets=tuple(harness.DatasetSpec(d, fixture_seed=i, noise=harness.MODERATE_NOISE)
                   for i, d in enumerate(DATASET_IDS)),
    repeats=3,
)
cells = harness.run_benchmark(cfg)
print(harness.emit_table1(cells))
print()
print(harness.emit_table2(cells))
