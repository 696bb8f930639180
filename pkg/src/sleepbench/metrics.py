"""Confusion counts and the six binary classification metrics.

Class 1 is the positive class. A metric whose denominator is zero evaluates
to 0 and its upper-case name (e.g. ``"PR"``) is added to
``MetricsReport.undefined``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal

import numpy as np

from .errors import ContractError

METRIC_NAMES = ("ac", "se", "sp", "pr", "re", "f1")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        counts = (self.tp, self.tn, self.fp, self.fn)
        if any(c < 0 for c in counts) or sum(counts) < 1:
            raise ContractError(f"invalid confusion counts {counts}")

    @property
    def n(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


@dataclass(frozen=True)
class MetricsReport:
    ac: float
    se: float
    sp: float
    pr: float
    re: float
    f1: float
    undefined: frozenset = field(default_factory=frozenset)

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in METRIC_NAMES}


def confusion(predicted, actual) -> ConfusionCounts:
    p = np.asarray(predicted)
    a = np.asarray(actual)
    if p.ndim != 1 or p.shape != a.shape or p.size == 0:
        raise ContractError(
            f"predicted {p.shape} and actual {a.shape} must be equal nonzero lengths"
        )
    for name, v in (("predicted", p), ("actual", a)):
        if not np.all((v == 0) | (v == 1)):
            raise ContractError(f"{name} labels must be 0 or 1")
    p = p.astype(bool)
    a = a.astype(bool)
    return ConfusionCounts(
        tp=int(np.sum(p & a)),
        tn=int(np.sum(~p & ~a)),
        fp=int(np.sum(p & ~a)),
        fn=int(np.sum(~p & a)),
    )


def _ratio(num, den, name, undefined):
    if den == 0:
        undefined.add(name)
        return 0.0
    return num / den


def compute_metrics(c: ConfusionCounts) -> MetricsReport:
    undefined: set[str] = set()
    se = _ratio(c.tp, c.tp + c.fn, "SE", undefined)
    sp = _ratio(c.tn, c.tn + c.fp, "SP", undefined)
    ac = (c.tp + c.tn) / c.n
    pr = _ratio(c.tp, c.tp + c.fp, "PR", undefined)
    re = _ratio(c.tp, c.tp + c.fn, "RE", undefined)
    if pr + re == 0:
        f1 = 0.0
        undefined.add("F1")
    else:
        f1 = 2 * pr * re / (pr + re)
    return MetricsReport(ac, se, sp, pr, re, f1, frozenset(undefined))


def evaluate(predicted, actual) -> MetricsReport:
    return compute_metrics(confusion(predicted, actual))


def render_percent(x: float) -> str:
    """Format a fraction as a percentage with 2 decimals, rounding half up."""
    value = (Decimal(repr(float(x))) * 100).quantize(
        Decimal("0.01"), rounding=ROUND_HALF_UP
    )
    return f"{value}%"
