"""From-scratch classifiers and a benchmark harness for tabular sleep data."""
from .classic import TrainConfig, predict, train
from .convnet import CnnTrainConfig, build_cnn, predict_cnn, train_cnn
from .dataio import Dataset, load_csv, make_fixture, parse_csv
from .harness import RunConfig, emit_table1, emit_table2, run_benchmark
from .metrics import compute_metrics, confusion, evaluate, render_percent
from .preprocess import prepare, split_50_50
from .tensor import Rng

__version__ = "0.1.0"

__all__ = [
    "CnnTrainConfig", "Dataset", "Rng", "RunConfig", "TrainConfig", "build_cnn",
    "compute_metrics", "confusion", "emit_table1", "emit_table2", "evaluate",
    "load_csv", "make_fixture", "parse_csv", "predict", "predict_cnn", "prepare",
    "render_percent", "run_benchmark", "split_50_50", "train", "train_cnn",
]
