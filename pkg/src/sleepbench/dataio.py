"""CSV ingestion for the three sleep datasets and synthetic stand-in fixtures.

Registered schemas
------------------
Header names are matched case-insensitively after trimming whitespace.
Columns present in a file but absent from the schema are ignored, so the full
Kaggle exports (e.g. the 80-column questionnaire) load as long as the
registered columns are there.

``sleep_study``  (target ``Enough``, 5 features)
    Enough (yes_no, target), Hours (numeric), PhoneReach (yes_no),
    PhoneTime (yes_no), Tired (ordinal_1_5), Breakfast (yes_no)

``sleep_deprivation``  (target ``EnoughSleep``, 7 features)
    AgeGroup (numeric code), AnxietyRate (numeric), DepressionRate (numeric),
    Panic (ordinal_1_5), Worry (ordinal_1_5), HealthProblems (yes_no),
    NapDuration (numeric, minutes), EnoughSleep (yes_no, target)

``sleep_cycle``  (target ``Sleep quality``, 6 features)
    Start (clock_time), End (clock_time), Sleep quality (percent, target),
    Time in bed (clock_time), Wake up (ordinal_1_5), Sleep Notes (ignored),
    Heart rate (numeric), Activity (Steps) (numeric)

Cell grammars
-------------
``yes_no``       "yes"/"no", case-insensitive -> 1.0/0.0
``percent``      "72%" or "72" -> 72.0
``clock_time``   "H:MM", "H:MM:SS" or "YYYY-MM-DD HH:MM[:SS]" -> minutes since
                 midnight (seconds contribute fractional minutes)
``ordinal_1_5``  integer 1..5, or a mood icon: ":(" -> 1, ":|" -> 3, ":)" -> 5
``numeric``      any finite decimal number
``ignored``      never parsed

Numeric-like targets are binarized at the column median (label 1 iff value is
strictly above the median). Class 1 is the positive class.
"""
from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    IngestionError,
    ParameterError,
    ParseError,
    SchemaError,
    SingleClassError,
)
from .tensor import Rng, as_array

KINDS = ("numeric", "yes_no", "percent", "clock_time", "ordinal_1_5", "ignored")
ROLES = ("feature", "target", "excluded")
DATASET_IDS = ("sleep_study", "sleep_deprivation", "sleep_cycle")

# Sizes of the published datasets.
SOURCE_ROW_COUNTS = {"sleep_study": 104, "sleep_deprivation": 86, "sleep_cycle": 50}

MOOD_ICONS = {":(": 1.0, ":|": 3.0, ":)": 5.0}


@dataclass(frozen=True)
class ColumnSchema:
    name: str
    kind: str
    role: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown column kind {self.kind!r}")
        if self.role not in ROLES:
            raise ParameterError(f"unknown column role {self.role!r}")
        if self.kind == "ignored" and self.role != "excluded":
            raise ParameterError(f"ignored column {self.name!r} must be excluded")


def _cols(*spec):
    return tuple(ColumnSchema(*s) for s in spec)


SCHEMAS: dict[str, tuple[ColumnSchema, ...]] = {
    "sleep_study": _cols(
        ("Enough", "yes_no", "target"),
        ("Hours", "numeric", "feature"),
        ("PhoneReach", "yes_no", "feature"),
        ("PhoneTime", "yes_no", "feature"),
        ("Tired", "ordinal_1_5", "feature"),
        ("Breakfast", "yes_no", "feature"),
    ),
    "sleep_deprivation": _cols(
        ("AgeGroup", "numeric", "feature"),
        ("AnxietyRate", "numeric", "feature"),
        ("DepressionRate", "numeric", "feature"),
        ("Panic", "ordinal_1_5", "feature"),
        ("Worry", "ordinal_1_5", "feature"),
        ("HealthProblems", "yes_no", "feature"),
        ("NapDuration", "numeric", "feature"),
        ("EnoughSleep", "yes_no", "target"),
    ),
    "sleep_cycle": _cols(
        ("Start", "clock_time", "feature"),
        ("End", "clock_time", "feature"),
        ("Sleep quality", "percent", "target"),
        ("Time in bed", "clock_time", "feature"),
        ("Wake up", "ordinal_1_5", "feature"),
        ("Sleep Notes", "ignored", "excluded"),
        ("Heart rate", "numeric", "feature"),
        ("Activity (Steps)", "numeric", "feature"),
    ),
}


def schema_for(dataset_id: str) -> tuple[ColumnSchema, ...]:
    try:
        return SCHEMAS[dataset_id]
    except KeyError:
        raise ParameterError(
            f"unknown dataset id {dataset_id!r}; expected one of {DATASET_IDS}"
        ) from None


def feature_columns(dataset_id: str) -> list[ColumnSchema]:
    return [c for c in schema_for(dataset_id) if c.role == "feature"]


def target_column(dataset_id: str) -> ColumnSchema:
    (target,) = [c for c in schema_for(dataset_id) if c.role == "target"]
    return target


@dataclass
class Dataset:
    """Encoded feature matrix with binary labels."""

    id: str
    features: np.ndarray
    labels: np.ndarray
    schema: tuple[ColumnSchema, ...]

    def __post_init__(self):
        self.features = as_array(self.features, rank=2)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.labels.shape != (self.features.shape[0],):
            raise ParameterError(
                f"labels shape {self.labels.shape} does not match "
                f"{self.features.shape[0]} feature rows"
            )

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def subset(self, rows) -> "Dataset":
        rows = np.asarray(rows, dtype=np.int64)
        return Dataset(self.id, self.features[rows], self.labels[rows], self.schema)


_NUMBER = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
_CLOCK = re.compile(
    r"^(?:\d{4}-\d{2}-\d{2}[ T])?(?P<h>\d{1,2}):(?P<m>\d{2})(?::(?P<s>\d{2}))?$"
)


def _number(token: str) -> float:
    if not _NUMBER.match(token):
        raise ParseError(f"not a number: {token!r}")
    value = float(token)
    if not math.isfinite(value):
        raise ParseError(f"not a finite number: {token!r}")
    return value


def encode_cell(raw: str, kind: str) -> float:
    """Encode one CSV cell according to its column kind."""
    token = raw.strip()
    if not token:
        raise ParseError("empty cell")
    if kind == "yes_no":
        low = token.lower()
        if low == "yes":
            return 1.0
        if low == "no":
            return 0.0
        raise ParseError(f"expected yes/no, got {token!r}")
    if kind == "percent":
        return _number(token[:-1].strip() if token.endswith("%") else token)
    if kind == "clock_time":
        m = _CLOCK.match(token)
        if not m:
            raise ParseError(f"expected H:MM clock time, got {token!r}")
        minutes, seconds = int(m["m"]), int(m["s"] or 0)
        if minutes > 59 or seconds > 59:
            raise ParseError(f"invalid clock time {token!r}")
        return int(m["h"]) * 60.0 + minutes + seconds / 60.0
    if kind == "ordinal_1_5":
        if token in MOOD_ICONS:
            return MOOD_ICONS[token]
        if token in {"1", "2", "3", "4", "5"}:
            return float(token)
        raise ParseError(f"expected ordinal 1-5 or mood icon, got {token!r}")
    if kind == "numeric":
        return _number(token)
    if kind == "ignored":
        raise ParseError("ignored columns are never encoded")
    raise ParameterError(f"unknown column kind {kind!r}")


def derive_label(column, kind: str) -> np.ndarray:
    """Turn an encoded target column into {0, 1} labels."""
    values = np.asarray(column, dtype=np.float64)
    if values.ndim != 1 or values.size < 2:
        raise ParameterError("target column needs at least 2 values")
    if kind == "yes_no":
        if not np.all((values == 0.0) | (values == 1.0)):
            raise ParameterError("yes_no target must be encoded as 0/1")
        labels = values.astype(np.int64)
    else:
        labels = (values > np.median(values)).astype(np.int64)
    if labels.min() == labels.max():
        raise SingleClassError(
            f"target column yields a single class ({int(labels[0])}) for all "
            f"{labels.size} rows"
        )
    return labels


def parse_csv(text: str, dataset_id: str) -> Dataset:
    """Parse CSV content (header + rows) into a Dataset."""
    schema = schema_for(dataset_id)
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if any(cell.strip() for cell in r)]
    if not rows:
        raise IngestionError(f"{dataset_id}: empty file")
    header = [h.strip().lower() for h in rows[0]]
    positions = {}
    for col in schema:
        key = col.name.strip().lower()
        if key not in header:
            raise SchemaError(f"{dataset_id}: missing column {col.name!r}")
        positions[col.name] = header.index(key)
    body = rows[1:]
    if not body:
        raise IngestionError(f"{dataset_id}: file has a header but no data rows")

    used = [c for c in schema if c.kind != "ignored"]
    encoded = np.empty((len(body), len(used)))
    for i, row in enumerate(body, start=1):
        if len(row) != len(rows[0]):
            raise ParseError(
                f"expected {len(rows[0])} fields, found {len(row)}", row=i
            )
        for j, col in enumerate(used):
            try:
                encoded[i - 1, j] = encode_cell(row[positions[col.name]], col.kind)
            except ParseError as exc:
                raise ParseError(str(exc), row=i, column=col.name) from None

    target = target_column(dataset_id)
    t_idx = used.index(target)
    labels = derive_label(encoded[:, t_idx], target.kind)
    f_idx = [j for j, c in enumerate(used) if c.role == "feature"]
    features = encoded[:, f_idx]
    return Dataset(dataset_id, features, labels, schema)


def load_csv(path, dataset_id: str) -> Dataset:
    """Read a dataset file from disk; see :func:`parse_csv`."""
    with open(Path(path), encoding="utf-8-sig", newline="") as fh:
        return parse_csv(fh.read(), dataset_id)


# --- synthetic fixtures ------------------------------------------------------

_NOTES = ("", "Drank coffee", "Worked out", "Stressful day", "Ate late, drank tea")


def _clip_round(x, lo, hi):
    return np.clip(np.rint(x), lo, hi)


def _hhmm(minutes: float) -> str:
    m = int(round(minutes)) % 1440
    return f"{m // 60}:{m % 60:02d}"


def make_fixture(
    dataset_id: str,
    n: int,
    rng: Rng,
    *,
    noise: float = 0.0,
    jitter: float = 0.3,
) -> str:
    """Synthesize schema-conformant CSV content with a planted linear signal.

    Every row draws a latent factor ``t ~ N(0, 1)``. Each feature is a noisy,
    quantized affine function of ``t`` (``jitter`` is the per-feature noise
    relative to the signal). The target is a threshold on a fixed linear
    combination of the *encoded* feature values plus label noise with
    standard deviation ``noise`` times that score's spread. With
    ``noise=0`` the classes are linearly separable in feature space.
    """
    if dataset_id not in SCHEMAS:
        raise ParameterError(
            f"unknown dataset id {dataset_id!r}; expected one of {DATASET_IDS}"
        )
    if n < 10:
        raise ParameterError(f"fixtures need n >= 10 rows, got {n}")
    if noise < 0 or jitter < 0:
        raise ParameterError("noise and jitter must be nonnegative")

    t = rng.normal(n)
    feats = [c for c in schema_for(dataset_id) if c.role == "feature"]
    e = rng.normal((n, len(feats))) * jitter
    eps = rng.normal(n)

    def lat(j, sign=1.0):
        return sign * t + e[:, j]

    cells: dict[str, list[str]] = {}
    encoded = {}
    if dataset_id == "sleep_study":
        hours = np.round(np.clip(7.0 + 1.2 * lat(0), 3.0, 11.0), 1)
        reach = (lat(1, -1.0) > 0).astype(float)
        ptime = (lat(2, -1.0) > 0).astype(float)
        tired = _clip_round(3.0 - 1.2 * lat(3), 1, 5)
        bfast = (lat(4) > 0).astype(float)
        encoded = {"Hours": hours, "PhoneReach": reach, "PhoneTime": ptime,
                   "Tired": tired, "Breakfast": bfast}
        weights = {"Hours": 1 / 1.2, "PhoneReach": -1.0, "PhoneTime": -1.0,
                   "Tired": -1 / 1.2, "Breakfast": 1.0}
        cells["Hours"] = [f"{h:g}" for h in hours]
        for k in ("PhoneReach", "PhoneTime", "Breakfast"):
            cells[k] = ["Yes" if v else "No" for v in encoded[k]]
        cells["Tired"] = [str(int(v)) for v in tired]
    elif dataset_id == "sleep_deprivation":
        age = (lat(0, -1.0) > 0).astype(float) + 1.0
        anx = _clip_round(8.0 - 4.0 * lat(1), 0, 21)
        dep = _clip_round(7.0 - 4.0 * lat(2), 0, 21)
        panic = _clip_round(2.5 - 1.0 * lat(3), 1, 5)
        worry = _clip_round(3.0 - 1.0 * lat(4), 1, 5)
        health = (lat(5, -1.0) > 0.3).astype(float)
        nap = _clip_round(45.0 - 25.0 * lat(6), 0, 180)
        encoded = {"AgeGroup": age, "AnxietyRate": anx, "DepressionRate": dep,
                   "Panic": panic, "Worry": worry, "HealthProblems": health,
                   "NapDuration": nap}
        weights = {"AgeGroup": -1.0, "AnxietyRate": -1 / 4, "DepressionRate": -1 / 4,
                   "Panic": -1.0, "Worry": -1.0, "HealthProblems": -1.0,
                   "NapDuration": -1 / 25}
        for k in ("AgeGroup", "AnxietyRate", "DepressionRate", "Panic", "Worry",
                  "NapDuration"):
            cells[k] = [str(int(v)) for v in encoded[k]]
        cells["HealthProblems"] = ["Yes" if v else "No" for v in health]
    else:
        start = np.clip(np.rint(22.5 * 60 - 30.0 * lat(0)), 20 * 60, 23 * 60 + 59)
        bed = np.clip(np.rint(7.5 * 60 + 45.0 * lat(2)), 180, 720)
        end = np.clip(np.rint(6.5 * 60 + 30.0 * lat(1)), 4 * 60, 11 * 60)
        wake = np.choose(np.digitize(lat(3), [-0.6, 0.6]), [1.0, 3.0, 5.0])
        heart = _clip_round(62.0 - 6.0 * lat(4), 40, 100)
        steps = _clip_round(6000.0 + 2500.0 * lat(5), 0, 25000)
        encoded = {"Start": start, "End": end, "Time in bed": bed, "Wake up": wake,
                   "Heart rate": heart, "Activity (Steps)": steps}
        weights = {"Start": -1 / 30, "End": 1 / 30, "Time in bed": 1 / 45,
                   "Wake up": 1 / 2, "Heart rate": -1 / 6, "Activity (Steps)": 1 / 2500}
        icon = {1.0: ":(", 3.0: ":|", 5.0: ":)"}
        day0 = np.datetime64("2014-12-29")
        cells["Start"], cells["End"] = [], []
        for i in range(n):
            sday = day0 + np.timedelta64(i, "D")
            s, en = int(start[i]), int(end[i])
            cells["Start"].append(f"{sday} {s // 60:02d}:{s % 60:02d}:00")
            cells["End"].append(
                f"{sday + np.timedelta64(1, 'D')} {en // 60:02d}:{en % 60:02d}:00"
            )
        cells["Time in bed"] = [_hhmm(v) for v in bed]
        cells["Wake up"] = [icon[v] for v in wake]
        cells["Heart rate"] = [str(int(v)) for v in heart]
        cells["Activity (Steps)"] = [str(int(v)) for v in steps]
        cells["Sleep Notes"] = [str(x) for x in rng.choice(list(_NOTES), size=n)]

    score = sum(weights[c.name] * encoded[c.name] for c in feats)
    spread = score.std() or 1.0
    noisy = score + noise * spread * eps
    target = target_column(dataset_id)
    if target.kind == "yes_no":
        threshold = np.median(noisy)
        cells[target.name] = ["Yes" if v > threshold else "No" for v in noisy]
    else:
        z = (noisy - noisy.mean()) / (noisy.std() or 1.0)
        quality = np.clip(np.rint(72.0 + 12.0 * z), 0, 100)
        cells[target.name] = [f"{int(q)}%" for q in quality]

    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    names = [c.name for c in schema_for(dataset_id)]
    writer.writerow(names)
    for i in range(n):
        writer.writerow([cells[name][i] for name in names])
    return out.getvalue()
