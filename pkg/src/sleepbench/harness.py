"""Benchmark grid runner and report tables.

A run trains every configured classifier on every configured dataset,
``repeats`` times. Repeat ``r`` splits the data with seed ``seed + r`` so all
classifiers in a repeat see the same train/test halves; model-side randomness
(CNN initialization and dropout) comes from an Rng keyed on
``(seed, dataset id, classifier id, r)``, so results never depend on the
order or process in which cells execute.

Config files are JSON::

    {
      "seed": 0,
      "repeats": 5,
      "output_dir": "bench-out",
      "formats": ["markdown", "csv", "json"],
      "normalization": "zscore",
      "workers": 1,
      "datasets": [
        {"id": "sleep_study", "path": "SleepStudyData.csv"},
        {"id": "sleep_cycle", "fixture_seed": 7, "rows": 50, "noise": 1.5}
      ],
      "classifiers": ["logreg", "dtree", "knn1", "knn10", "gnb", "svm",
                      "conv1d_1", "conv1d_2"],
      "train": {"learning_rate": 0.1, "epochs": 300, "l2": 0.001,
                "max_depth": 5, "min_leaf": 2},
      "cnn": {"learning_rate": 0.05, "epochs": 300, "dropout_rate": 0.5,
              "channels": [8, 16], "kernel_len": 3, "hidden": 32,
              "preserve_pool_len": 3},
      "overrides": {"svm": {"learning_rate": 0.05}}
    }

Every key is optional except ``datasets``. Relative paths are resolved
against the config file's directory. ``overrides`` maps a classifier id to
fields that replace the ``train`` (or ``cnn``) values for that classifier.
"""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import classic, convnet
from .dataio import DATASET_IDS, SOURCE_ROW_COUNTS, Dataset, load_csv, make_fixture, parse_csv
from .errors import ConfigError, ReportError, SleepBenchError
from .metrics import METRIC_NAMES, MetricsReport, evaluate, render_percent
from .preprocess import METHODS, prepare
from .tensor import Rng

CLASSIFIERS = ("logreg", "dtree", "knn1", "knn10", "gnb", "svm", "conv1d_1", "conv1d_2")
CLASSIFIER_LABELS = {
    "logreg": "Logistic Regression",
    "dtree": "Decision Tree",
    "knn1": "k-NN (k=1)",
    "knn10": "k-NN (k=10)",
    "gnb": "Naive Bayes",
    "svm": "SVM",
    "conv1d_1": "CONV-1D_1",
    "conv1d_2": "CONV-1D_2",
}
DATASET_LABELS = {
    "sleep_study": "Sleep-Study",
    "sleep_deprivation": "Sleep Deprivation",
    "sleep_cycle": "Sleep Cycle Data",
}
TABLE1_ROWS = ("ac", "se", "sp", "f1", "pr", "re")
FORMATS = ("markdown", "csv", "json")
FORMAT_SUFFIX = {"markdown": "md", "csv": "csv", "json": "json"}
UNDEFINED_MARK = "†"
MODERATE_NOISE = 1.5


@dataclass(frozen=True)
class DatasetSpec:
    id: str
    path: str | None = None
    fixture_seed: int | None = None
    rows: int | None = None
    noise: float = 0.0
    jitter: float = 0.3

    def load(self) -> Dataset:
        if self.path is not None:
            return load_csv(self.path, self.id)
        rows = self.rows or SOURCE_ROW_COUNTS[self.id]
        text = make_fixture(self.id, rows, Rng(self.fixture_seed or 0),
                            noise=self.noise, jitter=self.jitter)
        return parse_csv(text, self.id)


@dataclass(frozen=True)
class RunConfig:
    datasets: tuple
    classifiers: tuple = CLASSIFIERS
    train: classic.TrainConfig = field(default_factory=classic.TrainConfig)
    cnn: convnet.CnnTrainConfig = field(default_factory=convnet.CnnTrainConfig)
    overrides: dict = field(default_factory=dict)
    seed: int = 0
    repeats: int = 5
    output_dir: str = "bench-out"
    formats: tuple = FORMATS
    normalization: str = "zscore"
    workers: int = 1

    def __post_init__(self):
        if not self.datasets:
            raise ConfigError("at least one dataset is required")
        if not self.classifiers:
            raise ConfigError("classifier list must not be empty")
        if self.repeats < 1:
            raise ConfigError(f"repeats must be >= 1, got {self.repeats}")
        for fmt in self.formats:
            if fmt not in FORMATS:
                raise ConfigError(f"unknown report format {fmt!r}")
        if self.normalization not in METHODS:
            raise ConfigError(f"unknown normalization {self.normalization!r}")
        for spec in self.datasets:
            if spec.id not in DATASET_IDS:
                raise ConfigError(f"unknown dataset id {spec.id!r}")
        for clf in self.classifiers:
            if clf not in CLASSIFIERS:
                raise ConfigError(f"unknown classifier {clf!r}")
            try:
                self.cnn_config(clf) if clf.startswith("conv") else self.train_config(clf)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad settings for {clf}: {exc}") from None

    def train_config(self, clf: str) -> classic.TrainConfig:
        cfg = replace(self.train, seed=self.seed)
        if clf.startswith("knn"):
            cfg = replace(cfg, k=int(clf[3:]))
        return replace(cfg, **self.overrides.get(clf, {}))

    def cnn_config(self, clf: str) -> convnet.CnnTrainConfig:
        return replace(self.cnn, seed=self.seed, **self.overrides.get(clf, {}))


def load_config(path) -> RunConfig:
    """Parse a JSON run config; raises :class:`ConfigError` on any problem."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return config_from_dict(raw, base_dir=path.parent)


def config_from_dict(raw: dict, base_dir=".") -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    base = Path(base_dir)
    try:
        datasets = []
        for d in raw["datasets"]:
            d = dict(d)
            if d.get("path") is not None:
                d["path"] = str(base / d["path"])
            datasets.append(DatasetSpec(**d))
        kwargs = {k: raw[k] for k in ("seed", "repeats", "normalization", "workers")
                  if k in raw}
        if "output_dir" in raw:
            kwargs["output_dir"] = str(base / raw["output_dir"])
        if "classifiers" in raw:
            unknown = set(raw["classifiers"]) - set(CLASSIFIERS)
            if unknown:
                raise ConfigError(f"unknown classifiers {sorted(unknown)}")
            kwargs["classifiers"] = tuple(raw["classifiers"])
        if "formats" in raw:
            kwargs["formats"] = tuple(raw["formats"])
        return RunConfig(
            datasets=tuple(datasets),
            train=classic.TrainConfig(**raw.get("train", {})),
            cnn=convnet.CnnTrainConfig(**raw.get("cnn", {})),
            overrides=dict(raw.get("overrides", {})),
            **kwargs,
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError, SleepBenchError) as exc:
        raise ConfigError(f"invalid config: {exc!r}") from None


@dataclass
class BenchmarkCell:
    dataset: str
    classifier: str
    reports: list = field(default_factory=list)
    error: str | None = None
    loss_histories: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.error is None

    def mean(self, metric: str) -> float:
        return float(np.mean([getattr(r, metric) for r in self.reports]))

    def std(self, metric: str) -> float:
        """Sample standard deviation across repeats (0 for a single repeat)."""
        if len(self.reports) < 2:
            return 0.0
        return float(np.std([getattr(r, metric) for r in self.reports], ddof=1))

    def undefined(self, metric: str) -> bool:
        return any(metric.upper() in r.undefined for r in self.reports)

    def to_dict(self) -> dict:
        out = {"dataset": self.dataset, "classifier": self.classifier, "error": self.error}
        if self.ok:
            out["mean"] = {m: self.mean(m) for m in METRIC_NAMES}
            out["std"] = {m: self.std(m) for m in METRIC_NAMES}
        out["reports"] = [
            dict(r.as_dict(), undefined=sorted(r.undefined)) for r in self.reports
        ]
        return out

    @classmethod
    def from_dict(cls, d) -> "BenchmarkCell":
        reports = [
            MetricsReport(*(float(r[m]) for m in METRIC_NAMES), frozenset(r["undefined"]))
            for r in d["reports"]
        ]
        return cls(d["dataset"], d["classifier"], reports, d.get("error"))


# --- training dispatch ---------------------------------------------------------------


def _fit_classic(kind):
    def fit(X, y, cfg: RunConfig, clf, rng):
        model = classic.train(kind, X, y, cfg.train_config(clf))
        return model, None
    return fit


def _fit_cnn(X, y, cfg: RunConfig, clf, rng):
    cnn_cfg = cfg.cnn_config(clf)
    init_rng, dropout_rng = rng.spawn(2)
    model = convnet.build_cnn(clf, X.shape[1], cnn_cfg, init_rng)
    model = convnet.train_cnn(model, X, y, cnn_cfg, dropout_rng)
    return model, model.loss_history


# classifier id -> fit(X, y, run_config, classifier_id, rng) -> (model, loss history)
FITTERS = {
    "logreg": _fit_classic("logreg"),
    "dtree": _fit_classic("dtree"),
    "knn1": _fit_classic("knn"),
    "knn10": _fit_classic("knn"),
    "gnb": _fit_classic("gnb"),
    "svm": _fit_classic("svm"),
    "conv1d_1": _fit_cnn,
    "conv1d_2": _fit_cnn,
}


def _predict(model, X):
    if isinstance(model, convnet.CnnModel):
        return convnet.predict_cnn(model, X)
    return classic.predict(model, X)


def run_cell(data: Dataset, clf: str, cfg: RunConfig) -> BenchmarkCell:
    """Train and evaluate one classifier on one dataset for every repeat."""
    cell = BenchmarkCell(data.id, clf)
    try:
        fit = FITTERS[clf]
        for r in range(cfg.repeats):
            split = prepare(data, cfg.seed + r, cfg.normalization)
            rng = Rng((cfg.seed, data.id, clf, r))
            model, history = fit(split.train.features, split.train.labels, cfg, clf, rng)
            cell.reports.append(evaluate(_predict(model, split.test.features),
                                         split.test.labels))
            if history is not None:
                cell.loss_histories.append(list(history))
    except (SleepBenchError, ArithmeticError, ValueError, KeyError) as exc:
        cell.error = f"{type(exc).__name__}: {exc}"
        cell.reports = []
        cell.loss_histories = []
    return cell


def _run_cell_job(job):
    return run_cell(*job)


def run_benchmark(cfg: RunConfig) -> list[BenchmarkCell]:
    """Run the (dataset x classifier) grid; failures are recorded per cell."""
    cells: list[BenchmarkCell | None] = []
    jobs = []
    for spec in cfg.datasets:
        try:
            data = spec.load()
        except (SleepBenchError, OSError) as exc:
            msg = f"{type(exc).__name__}: {exc}"
            cells.extend(BenchmarkCell(spec.id, clf, error=msg) for clf in cfg.classifiers)
            continue
        for clf in cfg.classifiers:
            jobs.append((len(cells), (data, clf, cfg)))
            cells.append(None)
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_cell_job, [j for _, j in jobs]))
    else:
        results = [_run_cell_job(j) for _, j in jobs]
    for (slot, _), cell in zip(jobs, results):
        cells[slot] = cell
    return cells


# --- reports -----------------------------------------------------------------------------


def _datasets_in(cells):
    seen = {c.dataset for c in cells}
    return [d for d in DATASET_IDS if d in seen]


def _lookup(cells, dataset, clf):
    for c in cells:
        if c.dataset == dataset and c.classifier == clf:
            return c
    raise ReportError(f"missing cell for classifier {clf!r} on dataset {dataset!r}")


def _markdown(header, rows):
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    lines += ["| " + " | ".join(r) + " |" for r in rows]
    return "\n".join(lines) + "\n"


def _csv(header, rows):
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return out.getvalue()


def _cell_text(cell, metric, mark_undefined=True):
    if not cell.ok:
        return "failed"
    text = render_percent(cell.mean(metric))
    if mark_undefined and cell.undefined(metric):
        text += UNDEFINED_MARK
    return text


def _footnote(cells, fmt):
    if not any(c.ok and c.undefined(m) for c in cells for m in METRIC_NAMES):
        return ""
    note = (f"{UNDEFINED_MARK} zero denominator in at least one repeat; "
            "that repeat contributes 0")
    return f"\n{note}\n" if fmt == "markdown" else ""


def emit_table1(cells, fmt: str = "markdown", classifier: str = "logreg") -> str:
    """Six metrics of one classifier (logistic regression) per dataset."""
    datasets = _datasets_in(cells)
    chosen = [_lookup(cells, d, classifier) for d in datasets]
    if fmt == "json":
        return json.dumps({
            "table": "table1",
            "classifier": classifier,
            "datasets": datasets,
            "cells": [c.to_dict() for c in chosen],
        }, indent=1) + "\n"
    header = [""] + [DATASET_LABELS[d] for d in datasets]
    rows = [[m.upper()] + [_cell_text(c, m) for c in chosen] for m in TABLE1_ROWS]
    if fmt == "markdown":
        return _markdown(header, rows) + _footnote(chosen, fmt)
    if fmt == "csv":
        return _csv(header, rows)
    raise ReportError(f"unknown report format {fmt!r}")


def best_per_dataset(cells) -> dict:
    """Classifier with the highest mean accuracy per dataset (first on ties)."""
    best = {}
    for d in _datasets_in(cells):
        top = None
        for clf in CLASSIFIERS:
            c = next((c for c in cells if c.dataset == d and c.classifier == clf), None)
            if c is not None and c.ok and (top is None or c.mean("ac") > top[1]):
                top = (clf, c.mean("ac"))
        if top is not None:
            best[d] = top[0]
    return best


def emit_table2(cells, fmt: str = "markdown") -> str:
    """Mean accuracy of every classifier on every dataset, best bolded."""
    datasets = _datasets_in(cells)
    present = [clf for clf in CLASSIFIERS if any(c.classifier == clf for c in cells)]
    grid = {clf: [_lookup(cells, d, clf) for d in datasets] for clf in present}
    best = best_per_dataset(cells)
    if fmt == "json":
        return json.dumps({
            "table": "table2",
            "datasets": datasets,
            "classifiers": present,
            "best": best,
            "cells": [c.to_dict() for clf in present for c in grid[clf]],
        }, indent=1) + "\n"
    header = [""] + [DATASET_LABELS[d] for d in datasets]
    rows = []
    for clf in present:
        row = [CLASSIFIER_LABELS[clf]]
        for d, c in zip(datasets, grid[clf]):
            text = _cell_text(c, "ac", mark_undefined=False)
            if fmt == "markdown" and best.get(d) == clf:
                text = f"**{text}**"
            row.append(text)
        rows.append(row)
    if fmt == "markdown":
        return _markdown(header, rows)
    if fmt == "csv":
        return _csv(header, rows)
    raise ReportError(f"unknown report format {fmt!r}")


def cells_to_json(cells) -> str:
    return json.dumps([c.to_dict() for c in cells], indent=1) + "\n"


def cells_from_json(text: str) -> list[BenchmarkCell]:
    return [BenchmarkCell.from_dict(d) for d in json.loads(text)]


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def write_reports(cells, cfg: RunConfig, out_dir=None) -> Path:
    """Write tables, per-cell metrics and CNN loss curves under ``out_dir``."""
    out = Path(out_dir or cfg.output_dir)
    for fmt in cfg.formats:
        suffix = FORMAT_SUFFIX[fmt]
        if any(c.classifier == "logreg" for c in cells):
            _write(out / f"table1.{suffix}", emit_table1(cells, fmt))
        _write(out / f"table2.{suffix}", emit_table2(cells, fmt))
    _write(out / "cells.json", cells_to_json(cells))
    for c in cells:
        stem = f"{c.dataset}__{c.classifier}"
        _write(out / "cells" / f"{stem}.json", json.dumps(c.to_dict(), indent=1) + "\n")
        for r, history in enumerate(c.loss_histories):
            text = "epoch,loss\n" + "".join(f"{i},{v!r}\n" for i, v in enumerate(history))
            _write(out / "losses" / f"{stem}__r{r}.csv", text)
    return out
