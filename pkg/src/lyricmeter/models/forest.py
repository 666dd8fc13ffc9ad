"""Random forest: bagged Gini trees with per-split feature subsampling."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import UsageError
from .tree import TreeConfig, TreeNode, _check_matrix, grow_tree, tree_apply


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    max_depth: int = 8
    min_leaf: int = 5
    # None -> ceil(sqrt(d)); d -> plain bagging over all features
    features_per_split: int | None = None
    bootstrap: bool = True
    seed: int = 0


@dataclass
class ForestModel:
    trees: list[TreeNode]
    per_tree_seeds: list[int]
    n_features: int
    features_per_split: int
    config: ForestConfig = field(default_factory=ForestConfig)

    kind = "forest"

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = _check_matrix(X, self.n_features)
        scores = np.zeros(X.shape[0])
        for tree in self.trees:
            scores += tree_apply(tree, X)
        return scores / len(self.trees)


def train_forest(
    X: np.ndarray, y: np.ndarray, cfg: ForestConfig | None = None
) -> ForestModel:
    cfg = cfg or ForestConfig()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    n, d = X.shape
    if n == 0:
        raise UsageError("cannot train on an empty sample")
    m = cfg.features_per_split or math.ceil(math.sqrt(d))
    if m > d:
        raise UsageError("features_per_split exceeds dimensionality")

    seeds = [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(cfg.seed).spawn(cfg.n_trees)]
    tree_cfg = TreeConfig(max_depth=cfg.max_depth, min_leaf=cfg.min_leaf)
    trees = []
    for seed in seeds:
        rng = np.random.default_rng(seed)
        if cfg.bootstrap:
            idx = rng.integers(n, size=n)
            Xb, yb = X[idx], y[idx]
        else:
            Xb, yb = X, y

        if m == d:
            sampler = None
        else:
            def sampler(n_features, rng=rng):
                return np.sort(rng.choice(n_features, size=m, replace=False))

        trees.append(grow_tree(Xb, yb, tree_cfg, feature_sampler=sampler))
    return ForestModel(
        trees=trees,
        per_tree_seeds=seeds,
        n_features=d,
        features_per_split=m,
        config=cfg,
    )
