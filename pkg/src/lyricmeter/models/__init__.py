"""Binary classifiers with probability outputs and serializable parameters."""

from __future__ import annotations

import numpy as np

from ..errors import UsageError
from .forest import ForestConfig, ForestModel, train_forest
from .gbdt import BoostedEnsemble, GbdtConfig, gbdt_gradients, train_gbdt
from .io import load_model, save_model
from .logistic import (
    LogisticConfig,
    LogisticModel,
    logistic_gradient,
    logistic_loss,
    sigmoid,
    train_logistic,
)
from .tree import (
    DecisionTreeModel,
    TreeConfig,
    TreeNode,
    best_gini_split,
    gini,
    train_tree,
    tree_apply,
)

MODEL_KINDS = ("logistic", "tree", "forest", "gbdt")

_CONFIG_TYPES = {
    "logistic": LogisticConfig,
    "tree": TreeConfig,
    "forest": ForestConfig,
    "gbdt": GbdtConfig,
}

_TRAINERS = {
    "logistic": train_logistic,
    "tree": train_tree,
    "forest": train_forest,
    "gbdt": train_gbdt,
}


def model_config(kind: str, seed: int = 0, **overrides):
    """Build the per-kind training config, applying keyword overrides."""
    if kind not in _CONFIG_TYPES:
        raise UsageError(f"unknown model kind: {kind!r}")
    cls = _CONFIG_TYPES[kind]
    if kind == "forest":
        overrides.setdefault("seed", seed)
    known = {f for f in cls.__dataclass_fields__}
    bad = set(overrides) - known
    if bad:
        raise UsageError(f"unknown {kind} hyperparameters: {sorted(bad)}")
    return cls(**overrides)


def train(kind: str, X: np.ndarray, y: np.ndarray, cfg=None):
    if kind not in _TRAINERS:
        raise UsageError(f"unknown model kind: {kind!r}")
    return _TRAINERS[kind](X, y, cfg)


def predict_proba(model, X: np.ndarray) -> np.ndarray:
    """Probability of the positive (4/4) class for each row."""
    return model.predict_proba(X)


def predict(model, X: np.ndarray, threshold: float = 0.5) -> np.ndarray:
    """0/1 predictions; a probability equal to the threshold goes positive."""
    return (predict_proba(model, X) >= threshold).astype(int)


__all__ = [
    "MODEL_KINDS",
    "BoostedEnsemble",
    "DecisionTreeModel",
    "ForestConfig",
    "ForestModel",
    "GbdtConfig",
    "LogisticConfig",
    "LogisticModel",
    "TreeConfig",
    "TreeNode",
    "best_gini_split",
    "gbdt_gradients",
    "gini",
    "load_model",
    "logistic_gradient",
    "logistic_loss",
    "model_config",
    "predict",
    "predict_proba",
    "save_model",
    "sigmoid",
    "train",
    "train_forest",
    "train_gbdt",
    "train_logistic",
    "train_tree",
    "tree_apply",
]
