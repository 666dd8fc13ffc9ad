"""Model (de)serialization: a versioned, self-describing JSON text format.

Floats go through Python's shortest round-trip repr, so a save/load cycle is
bit-exact on predictions.  The file can embed the feature spec used for
training so prediction refuses mismatched featurization.
"""

from __future__ import annotations

import json
from dataclasses import asdict

import numpy as np

from ..errors import FormatError, InputOutputError
from .forest import ForestConfig, ForestModel
from .gbdt import BoostedEnsemble, GbdtConfig
from .logistic import LogisticConfig, LogisticModel
from .tree import DecisionTreeModel, TreeConfig, TreeNode

FORMAT_NAME = "lyricmeter-model"
FORMAT_VERSION = 1


def _model_params(model) -> dict:
    if isinstance(model, LogisticModel):
        return {
            "weights": model.weights.tolist(),
            "bias": model.bias,
            "mean": model.mean.tolist(),
            "scale": model.scale.tolist(),
        }
    if isinstance(model, DecisionTreeModel):
        return {"root": model.root.to_dict(), "n_features": model.n_features}
    if isinstance(model, ForestModel):
        return {
            "trees": [t.to_dict() for t in model.trees],
            "per_tree_seeds": model.per_tree_seeds,
            "n_features": model.n_features,
            "features_per_split": model.features_per_split,
        }
    if isinstance(model, BoostedEnsemble):
        return {
            "trees": [t.to_dict() for t in model.trees],
            "learning_rate": model.learning_rate,
            "base_score": model.base_score,
            "n_features": model.n_features,
        }
    raise FormatError(f"cannot serialize model of type {type(model).__name__}")


def save_model(model, path: str, feature_spec: dict | None = None, extra: dict | None = None) -> None:
    doc = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "kind": model.kind,
        "config": asdict(model.config),
        "params": _model_params(model),
    }
    if feature_spec is not None:
        doc["feature_spec"] = feature_spec
    if extra:
        doc["extra"] = extra
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")
    except OSError as exc:
        raise InputOutputError(f"cannot write model file: {exc}") from exc


def load_model(path: str):
    """Returns (model, document); document keeps feature_spec/extra fields."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputOutputError(f"cannot read model file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"model file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise FormatError("not a model file")
    if doc.get("version") != FORMAT_VERSION:
        raise FormatError(f"unsupported model format version: {doc.get('version')}")
    kind = doc.get("kind")
    params = doc.get("params", {})
    config = doc.get("config", {})
    try:
        if kind == "logistic":
            model = LogisticModel(
                weights=np.array(params["weights"], dtype=float),
                bias=float(params["bias"]),
                mean=np.array(params["mean"], dtype=float),
                scale=np.array(params["scale"], dtype=float),
                config=LogisticConfig(**config),
            )
        elif kind == "tree":
            model = DecisionTreeModel(
                root=TreeNode.from_dict(params["root"]),
                n_features=int(params["n_features"]),
                config=TreeConfig(**config),
            )
        elif kind == "forest":
            model = ForestModel(
                trees=[TreeNode.from_dict(t) for t in params["trees"]],
                per_tree_seeds=[int(s) for s in params["per_tree_seeds"]],
                n_features=int(params["n_features"]),
                features_per_split=int(params["features_per_split"]),
                config=ForestConfig(**{
                    k: v for k, v in config.items()
                }),
            )
        elif kind == "gbdt":
            model = BoostedEnsemble(
                trees=[TreeNode.from_dict(t) for t in params["trees"]],
                learning_rate=float(params["learning_rate"]),
                base_score=float(params["base_score"]),
                n_features=int(params["n_features"]),
                config=GbdtConfig(**config),
            )
        else:
            raise FormatError(f"unknown model kind: {kind!r}")
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed model parameters: {exc}") from exc
    return model, doc
