"""Gradient-boosted trees on the regularized logistic objective.

Second-order boosting: per-sample gradient g = p - y and hessian
h = p(1 - p) of the logistic loss, leaf weight w = -G / (H + lambda), and
split gain 0.5 * [G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda)
- (G_L+G_R)^2/(H_L+H_R+lambda)] - gamma.  Splits whose gain is not positive
are rejected, so regularization directly prunes the trees.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateInputError, UsageError
from .logistic import sigmoid
from .tree import TreeNode, _check_matrix, tree_apply


@dataclass(frozen=True)
class GbdtConfig:
    rounds: int = 200
    learning_rate: float = 0.1
    max_depth: int = 4
    lambda_l2: float = 1.0
    gamma: float = 0.0


@dataclass
class BoostedEnsemble:
    trees: list[TreeNode]
    learning_rate: float
    base_score: float
    n_features: int
    config: GbdtConfig = field(default_factory=GbdtConfig)
    objective_history: list = field(default_factory=list, repr=False)

    kind = "gbdt"

    def raw_scores(self, X: np.ndarray) -> np.ndarray:
        X = _check_matrix(X, self.n_features)
        raw = np.full(X.shape[0], self.base_score)
        for tree in self.trees:
            raw += self.learning_rate * tree_apply(tree, X)
        return raw

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return sigmoid(self.raw_scores(X))


def gbdt_gradients(p: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Gradient and hessian of the logistic loss w.r.t. the raw score."""
    return p - y, p * (1.0 - p)


def _leaf_weight(g_sum: float, h_sum: float, lam: float) -> float:
    return -g_sum / (h_sum + lam)


def _best_split(
    X: np.ndarray, g: np.ndarray, h: np.ndarray, lam: float, gamma: float
) -> tuple[int, float, float] | None:
    n = len(g)
    if n < 2:
        return None
    G, H = float(np.sum(g)), float(np.sum(h))
    parent_term = G * G / (H + lam)
    best: tuple[float, int, float] | None = None
    for f in range(X.shape[1]):
        col = X[:, f]
        order = np.argsort(col, kind="stable")
        sv = col[order]
        gl = np.cumsum(g[order])[:-1]
        hl = np.cumsum(h[order])[:-1]
        distinct = sv[1:] != sv[:-1]
        if not np.any(distinct):
            continue
        gr, hr = G - gl, H - hl
        gains = 0.5 * (
            gl * gl / (hl + lam) + gr * gr / (hr + lam) - parent_term
        ) - gamma
        gains[~distinct] = -np.inf
        thresholds = (sv[:-1] + sv[1:]) / 2.0
        for gain, thr in zip(gains[distinct], thresholds[distinct]):
            cand = (float(gain), f, float(thr))
            if best is None or cand[0] > best[0] or (
                cand[0] == best[0] and (cand[1], cand[2]) < (best[1], best[2])
            ):
                best = cand
    if best is None or best[0] <= 0.0:
        return None
    return best[1], best[2], best[0]


def _grow(
    X: np.ndarray, g: np.ndarray, h: np.ndarray, cfg: GbdtConfig, depth: int
) -> TreeNode:
    if depth < cfg.max_depth:
        split = _best_split(X, g, h, cfg.lambda_l2, cfg.gamma)
        if split is not None:
            f, thr, _ = split
            mask = X[:, f] <= thr
            node = TreeNode(feature=f, threshold=thr)
            node.left = _grow(X[mask], g[mask], h[mask], cfg, depth + 1)
            node.right = _grow(X[~mask], g[~mask], h[~mask], cfg, depth + 1)
            return node
    return TreeNode(
        score=_leaf_weight(float(np.sum(g)), float(np.sum(h)), cfg.lambda_l2)
    )


def _tree_complexity(
    node: TreeNode, lam: float, gamma: float, scale: float = 1.0
) -> float:
    """Regularization term: gamma * n_leaves + 0.5 * lambda * sum(w^2).

    ``scale`` maps stored leaf weights to their realized (shrunk) values.
    """
    if node.is_leaf:
        w = scale * node.score
        return gamma + 0.5 * lam * w * w
    return _tree_complexity(node.left, lam, gamma, scale) + _tree_complexity(
        node.right, lam, gamma, scale
    )


def train_gbdt(
    X: np.ndarray, y: np.ndarray, cfg: GbdtConfig | None = None
) -> BoostedEnsemble:
    cfg = cfg or GbdtConfig()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(set(y.tolist())) < 2:
        raise DegenerateInputError("boosting needs both classes")
    if X.ndim != 2 or X.shape[0] != len(y):
        raise UsageError("X and y shapes disagree")

    prior = float(np.clip(np.mean(y), 1e-6, 1.0 - 1e-6))
    base = float(np.log(prior / (1.0 - prior)))
    raw = np.full(len(y), base)
    trees: list[TreeNode] = []
    history: list[float] = []
    penalty = 0.0
    for _ in range(cfg.rounds):
        p = sigmoid(raw)
        g, hess = gbdt_gradients(p, y)
        tree = _grow(X, g, hess, cfg, depth=0)
        # leaf scores already carry the regularized weights; shrinkage applies
        # at prediction time
        raw = raw + cfg.learning_rate * tree_apply(tree, X)
        trees.append(tree)
        penalty += _tree_complexity(
            tree, cfg.lambda_l2, cfg.gamma, scale=cfg.learning_rate
        )
        data_loss = float(np.sum(np.logaddexp(0.0, raw) - y * raw))
        history.append(data_loss + penalty)
    return BoostedEnsemble(
        trees=trees,
        learning_rate=cfg.learning_rate,
        base_score=base,
        n_features=X.shape[1],
        config=cfg,
        objective_history=history,
    )
