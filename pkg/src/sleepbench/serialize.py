"""Versioned JSON text format for trained models.

Every document is an object::

    {"format": "sleepbench-model", "version": 1, "kind": "<kind>", "params": {...}}

``kind`` is one of ``logreg``, ``dtree``, ``knn``, ``gnb``, ``svm``,
``conv1d_1``, ``conv1d_2``. ``params`` holds the model's arrays as nested
lists of floats (written with ``repr`` precision, so loading is exact).
"""
from __future__ import annotations

import json

from .classic import MODEL_TYPES
from .convnet import VARIANTS, CnnModel
from .errors import ContractError

FORMAT = "sleepbench-model"
VERSION = 1


def model_to_dict(model) -> dict:
    return {"format": FORMAT, "version": VERSION, "kind": model.kind,
            "params": model.to_dict()}


def model_from_dict(doc: dict):
    if doc.get("format") != FORMAT:
        raise ContractError(f"not a {FORMAT} document")
    if doc.get("version") != VERSION:
        raise ContractError(f"unsupported model format version {doc.get('version')!r}")
    kind = doc.get("kind")
    if kind in VARIANTS:
        return CnnModel.from_dict(doc["params"])
    if kind in MODEL_TYPES:
        return MODEL_TYPES[kind].from_dict(doc["params"])
    raise ContractError(f"unknown model kind {kind!r}")


def dumps(model) -> str:
    return json.dumps(model_to_dict(model), indent=1)


def loads(text: str):
    return model_from_dict(json.loads(text))


def save(model, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(model))


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
