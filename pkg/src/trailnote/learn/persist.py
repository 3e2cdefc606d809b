"""Versioned model documents: forest and linear models as canonical JSON.

Serialization is key-sorted with compact separators, so identical models
produce identical bytes regardless of how they were assembled.
"""

from __future__ import annotations

import json
from typing import IO

import numpy as np

from ..errors import ConfigError
from .forest import ForestModel
from .linear import LinearModel
from .tree import Tree

MODEL_SCHEMA_VERSION = 1


def model_document(
    model: ForestModel | LinearModel,
    label_aspect: str | None = None,
    feature_kinds: tuple[str, ...] | list[str] | None = None,
    split: dict | None = None,
    evaluation: dict | None = None,
) -> dict:
    doc: dict = {
        "schema_version": MODEL_SCHEMA_VERSION,
        "classes": list(model.classes),
        "feature_names": list(model.feature_names),
        "label_aspect": label_aspect,
        "feature_kinds": list(feature_kinds) if feature_kinds else None,
        "seed": model.seed,
        "split": split,
        "evaluation": evaluation,
    }
    if isinstance(model, ForestModel):
        doc["kind"] = "forest"
        doc["hyperparams"] = {
            "n_trees": model.n_trees,
            "max_features": model.max_features,
            "min_leaf": model.min_leaf,
        }
        doc["trees"] = [t.to_json() for t in model.trees]
    elif isinstance(model, LinearModel):
        doc["kind"] = "linear"
        doc["hyperparams"] = {"l2": model.l2, "epochs": model.epochs, "step": model.step}
        doc["weights"] = model.weights.tolist()
        doc["bias"] = model.bias.tolist()
        doc["mean"] = model.mean.tolist()
        doc["scale"] = model.scale.tolist()
        doc["class_frequency"] = list(model.class_frequency)
    else:
        raise ConfigError(f"cannot persist model of type {type(model).__name__}")
    return doc


def dumps_model(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def save_model(fh: IO[str], model, **metadata) -> None:
    fh.write(dumps_model(model_document(model, **metadata)))


def model_from_document(doc: dict) -> ForestModel | LinearModel:
    version = doc.get("schema_version")
    if version != MODEL_SCHEMA_VERSION:
        raise ConfigError(f"unsupported model schema version {version!r}")
    classes = tuple(doc["classes"])
    names = tuple(doc["feature_names"])
    kind = doc.get("kind")
    if kind == "forest":
        hp = doc["hyperparams"]
        return ForestModel(
            classes=classes,
            feature_names=names,
            trees=tuple(Tree.from_json(t) for t in doc["trees"]),
            n_trees=hp["n_trees"],
            max_features=hp["max_features"],
            min_leaf=hp["min_leaf"],
            seed=doc["seed"],
        )
    if kind == "linear":
        hp = doc["hyperparams"]
        return LinearModel(
            classes=classes,
            feature_names=names,
            weights=np.asarray(doc["weights"], dtype=float),
            bias=np.asarray(doc["bias"], dtype=float),
            mean=np.asarray(doc["mean"], dtype=float),
            scale=np.asarray(doc["scale"], dtype=float),
            class_frequency=tuple(doc["class_frequency"]),
            l2=hp["l2"],
            epochs=hp["epochs"],
            step=hp["step"],
            seed=doc["seed"],
        )
    raise ConfigError(f"unknown model kind {kind!r}")


def load_model(fh: IO[str]) -> tuple[ForestModel | LinearModel, dict]:
    """Returns the rebuilt model and the raw document (for its metadata)."""
    doc = json.load(fh)
    return model_from_document(doc), doc
