"""Training losses, each returning (scalar loss, gradient wrt predictions)."""

from __future__ import annotations

import numpy as np

CROSS_ENTROPY = "cross-entropy"
MSE = "mse"
LOSSES = (CROSS_ENTROPY, MSE)


def softmax_cross_entropy(logits: np.ndarray, labels: np.ndarray):
    """Fused softmax + cross-entropy on raw logits (numerically stable).

    `labels` are integer class indices of shape (batch,).
    """
    z = logits - logits.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(z).sum(axis=1, keepdims=True))
    log_probs = z - log_norm
    batch = logits.shape[0]
    rows = np.arange(batch)
    loss = -float(log_probs[rows, labels].mean())
    grad = np.exp(log_probs)
    grad[rows, labels] -= 1.0
    return loss, grad / batch


def cross_entropy_on_probs(probs: np.ndarray, labels: np.ndarray, eps: float = 1e-12):
    """Cross-entropy on already-normalized probabilities (non-fused path)."""
    batch = probs.shape[0]
    rows = np.arange(batch)
    p = np.clip(probs[rows, labels], eps, None)
    loss = -float(np.log(p).mean())
    grad = np.zeros_like(probs)
    grad[rows, labels] = -1.0 / (p * batch)
    return loss, grad


def mean_squared_error(pred: np.ndarray, target: np.ndarray):
    """Squared error summed over output dims, averaged over the batch."""
    diff = pred - target
    batch = pred.shape[0]
    loss = float((diff.astype(np.float64) ** 2).sum() / batch)
    return loss, (2.0 / batch) * diff
