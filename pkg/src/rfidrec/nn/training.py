"""Mini-batch training loop and finite-difference gradient verification."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..rng import as_rng
from .layers import Network, Softmax
from .losses import CROSS_ENTROPY, LOSSES, MSE, cross_entropy_on_probs, mean_squared_error, softmax_cross_entropy
from .optim import Adam

__all__ = ["TrainConfig", "TrainResult", "TrainingDiverged", "train",
           "loss_and_grads", "loss_value", "gradient_check"]


class TrainingDiverged(RuntimeError):
    """Raised when a mini-batch loss turns NaN/inf."""


@dataclass
class TrainConfig:
    learning_rate: float = 1e-3
    batch_size: int = 1024
    epochs: int = 10
    loss: str = CROSS_ENTROPY
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.loss not in LOSSES:
            raise ValueError(f"loss must be one of {LOSSES}, got {self.loss!r}")


@dataclass
class TrainResult:
    loss_history: list = field(default_factory=list)   # per-epoch mean batch loss
    val_history: list = field(default_factory=list)    # per-epoch accuracy (CE) or MSE


def _fused(net: Network, loss: str) -> bool:
    return loss == CROSS_ENTROPY and isinstance(net.layers[-1], Softmax)


def loss_and_grads(net: Network, x, y, loss: str):
    """Loss value and exact parameter gradients for one batch.

    A terminal Softmax is fused with cross-entropy (gradient taken on the
    logits) for numerical stability; the layer keeps its place in the stack
    so inference is unchanged.
    """
    if _fused(net, loss):
        limit = len(net.layers) - 1
        logits, caches = net.forward_cached(x, limit=limit)
        value, g = softmax_cross_entropy(logits, y)
        return value, net.backward(g, caches, limit=limit)
    out, caches = net.forward_cached(x)
    if loss == CROSS_ENTROPY:
        value, g = cross_entropy_on_probs(out, y)
    elif loss == MSE:
        value, g = mean_squared_error(out, y)
    else:
        raise ValueError(f"unknown loss {loss!r}")
    return value, net.backward(g, caches)


def loss_value(net: Network, x, y, loss: str) -> float:
    if _fused(net, loss):
        logits = net.forward(x, limit=len(net.layers) - 1)
        return softmax_cross_entropy(logits, y)[0]
    out = net.forward(x)
    if loss == CROSS_ENTROPY:
        return cross_entropy_on_probs(out, y)[0]
    return mean_squared_error(out, y)[0]


def _val_metric(net: Network, x_val, y_val, loss: str) -> float:
    out = net.apply_batched(x_val)
    if loss == CROSS_ENTROPY:
        return float((out.argmax(axis=1) == y_val).mean())
    return mean_squared_error(out, y_val)[0]


def train(net: Network, x, y, cfg: TrainConfig, x_val=None, y_val=None) -> TrainResult:
    """Shuffled mini-batch Adam training; mutates `net.params` in place.

    With a validation pair, records accuracy (cross-entropy) or MSE per
    epoch. Raises TrainingDiverged on a non-finite batch loss.
    """
    n = len(x)
    if n == 0:
        raise ValueError("dataset is empty")
    rng = as_rng(cfg.seed)
    opt = Adam(learning_rate=cfg.learning_rate)
    result = TrainResult()
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        batch_losses = []
        for start in range(0, n, cfg.batch_size):
            sel = order[start:start + cfg.batch_size]
            value, grads = loss_and_grads(net, x[sel], y[sel], cfg.loss)
            if not np.isfinite(value):
                raise TrainingDiverged(
                    f"non-finite loss {value} at epoch {epoch}, batch {start // cfg.batch_size}"
                )
            opt.step(net.params, grads)
            batch_losses.append(value)
        result.loss_history.append(float(np.mean(batch_losses)))
        if x_val is not None:
            result.val_history.append(_val_metric(net, x_val, y_val, cfg.loss))
    return result


def gradient_check(net: Network, x, y, loss: str, n_check: int = 200,
                   step: float = 1e-4, seed: int = 0) -> float:
    """Max relative error between backprop and central finite differences.

    Runs a float64 clone of the network and perturbs a random subset of at
    most `n_check` parameters (all of them when the network is smaller).
    """
    net64 = net.astype(np.float64)
    x64 = np.asarray(x, dtype=np.float64)
    _, grads = loss_and_grads(net64, x64, y, loss)

    slots = [(li, ti, t.size) for li, group in enumerate(net64.params)
             for ti, t in enumerate(group)]
    total = sum(size for _, _, size in slots)
    rng = as_rng(seed)
    chosen = rng.choice(total, size=min(n_check, total), replace=False)

    offsets = np.cumsum([0] + [size for _, _, size in slots])
    worst = 0.0
    for flat in np.sort(chosen):
        slot = int(np.searchsorted(offsets, flat, side="right") - 1)
        li, ti, _ = slots[slot]
        pos = int(flat - offsets[slot])
        tensor = net64.params[li][ti].reshape(-1)
        orig = tensor[pos]
        tensor[pos] = orig + step
        up = loss_value(net64, x64, y, loss)
        tensor[pos] = orig - step
        down = loss_value(net64, x64, y, loss)
        tensor[pos] = orig
        numeric = (up - down) / (2.0 * step)
        analytic = grads[li][ti].reshape(-1)[pos]
        rel = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-6)
        worst = max(worst, rel)
    return worst
