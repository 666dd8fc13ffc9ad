"""CART decision tree with Gini impurity, shared by the tree ensembles.

Candidate thresholds are midpoints between consecutive distinct sorted
feature values.  The best split maximizes impurity gain; ties break toward
the lowest feature index, then the lowest threshold.  Samples with value
<= threshold go left.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import UsageError


@dataclass
class TreeNode:
    """Either an internal split (feature/threshold set) or a leaf (score set)."""

    feature: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    score: float | None = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"score": self.score}
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TreeNode":
        if "score" in d:
            return cls(score=float(d["score"]))
        return cls(
            feature=int(d["feature"]),
            threshold=float(d["threshold"]),
            left=cls.from_dict(d["left"]),
            right=cls.from_dict(d["right"]),
        )


@dataclass(frozen=True)
class TreeConfig:
    max_depth: int = 8
    min_leaf: int = 5


def gini(y: np.ndarray) -> float:
    """Gini impurity of a 0/1 label vector."""
    if len(y) == 0:
        return 0.0
    p = float(np.mean(y))
    return 2.0 * p * (1.0 - p)


def best_gini_split(
    X: np.ndarray, y: np.ndarray, min_leaf: int, features: np.ndarray | None = None
) -> tuple[int, float, float] | None:
    """(feature, threshold, gain) of the best Gini split, or None.

    ``features`` restricts the candidate feature indices (given in any order;
    scanned ascending so ties resolve deterministically).
    """
    n = len(y)
    if n < 2 * min_leaf:
        return None
    parent = gini(y)
    if parent == 0.0:
        return None
    if features is None:
        features = np.arange(X.shape[1])
    best: tuple[float, int, float] | None = None  # (gain, feature, threshold)
    total_pos = float(np.sum(y))
    for f in sorted(int(f) for f in features):
        col = X[:, f]
        order = np.argsort(col, kind="stable")
        sv = col[order]
        sy = y[order].astype(float)
        cum_pos = np.cumsum(sy)
        # split after position i (1-based left size)
        left_sizes = np.arange(1, n)
        distinct = sv[1:] != sv[:-1]
        valid = distinct & (left_sizes >= min_leaf) & (n - left_sizes >= min_leaf)
        if not np.any(valid):
            continue
        nl = left_sizes[valid].astype(float)
        nr = n - nl
        pos_l = cum_pos[:-1][valid]
        pos_r = total_pos - pos_l
        gini_l = 2.0 * (pos_l / nl) * (1.0 - pos_l / nl)
        gini_r = 2.0 * (pos_r / nr) * (1.0 - pos_r / nr)
        gains = parent - (nl / n) * gini_l - (nr / n) * gini_r
        thresholds = (sv[:-1][valid] + sv[1:][valid]) / 2.0
        for gain, thr in zip(gains, thresholds):
            cand = (float(gain), f, float(thr))
            if best is None or cand[0] > best[0] or (
                cand[0] == best[0]
                and (cand[1], cand[2]) < (best[1], best[2])
            ):
                best = cand
    if best is None or best[0] <= 0.0:
        return None
    return best[1], best[2], best[0]


def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    cfg: TreeConfig,
    depth: int = 0,
    feature_sampler=None,
) -> TreeNode:
    """Recursively grow a classification tree; leaf score = class-1 fraction.

    ``feature_sampler(n_features)`` optionally returns the candidate feature
    indices for one node (random-forest style subsetting).
    """
    if len(y) == 0:
        raise UsageError("cannot grow a tree on an empty sample")
    leaf = TreeNode(score=float(np.mean(y)))
    if depth >= cfg.max_depth or len(y) < 2 * cfg.min_leaf:
        return leaf
    features = feature_sampler(X.shape[1]) if feature_sampler else None
    split = best_gini_split(X, y, cfg.min_leaf, features)
    if split is None:
        return leaf
    f, thr, _ = split
    mask = X[:, f] <= thr
    node = TreeNode(feature=f, threshold=thr)
    node.left = grow_tree(X[mask], y[mask], cfg, depth + 1, feature_sampler)
    node.right = grow_tree(X[~mask], y[~mask], cfg, depth + 1, feature_sampler)
    return node


def tree_apply(node: TreeNode, X: np.ndarray) -> np.ndarray:
    """Per-row leaf scores for a batch of samples."""
    X = np.asarray(X, dtype=float)
    out = np.empty(X.shape[0], dtype=float)
    _apply(node, X, np.arange(X.shape[0]), out)
    return out


def _apply(node: TreeNode, X: np.ndarray, idx: np.ndarray, out: np.ndarray) -> None:
    if node.is_leaf:
        out[idx] = node.score
        return
    mask = X[idx, node.feature] <= node.threshold
    _apply(node.left, X, idx[mask], out)
    _apply(node.right, X, idx[~mask], out)


@dataclass
class DecisionTreeModel:
    root: TreeNode
    n_features: int
    config: TreeConfig = field(default_factory=TreeConfig)

    kind = "tree"

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = _check_matrix(X, self.n_features)
        return tree_apply(self.root, X)


def _check_matrix(X: np.ndarray, n_features: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.shape[1] != n_features:
        raise UsageError(
            f"expected {n_features} features, got {X.shape[1]}"
        )
    return X


def train_tree(X: np.ndarray, y: np.ndarray, cfg: TreeConfig | None = None) -> DecisionTreeModel:
    cfg = cfg or TreeConfig()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    if len(y) == 0:
        raise UsageError("cannot train on an empty sample")
    root = grow_tree(X, y, cfg)
    return DecisionTreeModel(root=root, n_features=X.shape[1], config=cfg)
