"""L2-regularized logistic regression trained by full-batch gradient descent.

Features are z-scored inside the model (constant columns get unit scale), so
the caller never standardizes.  Training stops when the gradient infinity
norm drops below the tolerance or the epoch budget runs out.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateInputError, UsageError


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass(frozen=True)
class LogisticConfig:
    learning_rate: float = 0.1
    l2: float = 1e-4
    max_epochs: int = 1000
    tolerance: float = 1e-6


def logistic_loss(
    weights: np.ndarray, bias: float, X: np.ndarray, y: np.ndarray, l2: float
) -> float:
    """Mean cross-entropy plus L2 penalty on the weights (bias excluded)."""
    z = X @ weights + bias
    # log(1 + exp(-z)) for y=1, log(1 + exp(z)) for y=0, computed stably
    loss = np.logaddexp(0.0, z) - y * z
    return float(np.mean(loss) + 0.5 * l2 * np.dot(weights, weights))


def logistic_gradient(
    weights: np.ndarray, bias: float, X: np.ndarray, y: np.ndarray, l2: float
) -> tuple[np.ndarray, float]:
    p = sigmoid(X @ weights + bias)
    err = p - y
    grad_w = X.T @ err / len(y) + l2 * weights
    grad_b = float(np.mean(err))
    return grad_w, grad_b


@dataclass
class LogisticModel:
    weights: np.ndarray
    bias: float
    mean: np.ndarray
    scale: np.ndarray
    config: LogisticConfig = field(default_factory=LogisticConfig)
    loss_history: list = field(default_factory=list, repr=False)

    kind = "logistic"

    @property
    def n_features(self) -> int:
        return len(self.weights)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        from .tree import _check_matrix

        X = _check_matrix(X, self.n_features)
        Z = (X - self.mean) / self.scale
        return sigmoid(Z @ self.weights + self.bias)


def train_logistic(
    X: np.ndarray, y: np.ndarray, cfg: LogisticConfig | None = None
) -> LogisticModel:
    cfg = cfg or LogisticConfig()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(set(y.tolist())) < 2:
        raise DegenerateInputError("logistic training needs both classes")
    if X.ndim != 2 or X.shape[0] != len(y):
        raise UsageError("X and y shapes disagree")

    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale[scale == 0.0] = 1.0
    Z = (X - mean) / scale

    w = np.zeros(X.shape[1])
    b = 0.0
    history = []
    for _ in range(cfg.max_epochs):
        grad_w, grad_b = logistic_gradient(w, b, Z, y, cfg.l2)
        history.append(logistic_loss(w, b, Z, y, cfg.l2))
        if max(np.max(np.abs(grad_w)), abs(grad_b)) < cfg.tolerance:
            break
        w = w - cfg.learning_rate * grad_w
        b = b - cfg.learning_rate * grad_b
    return LogisticModel(
        weights=w, bias=b, mean=mean, scale=scale, config=cfg, loss_history=history
    )
