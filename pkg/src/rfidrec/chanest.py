"""Per-tag channel-gain estimation from the 4 orthogonal pilot symbols.

The least-squares projection (1/4) P y is exact on noiseless observations
thanks to pilot orthogonality and serves as the reference for the learned
estimator: one small feed-forward regression network per possible tag count
(4 hidden layers of 128 units, linear 2R-unit output carrying re/im pairs).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .baseband import SlotSignal, symbol_average
from .nn import MSE, Dense, Network, ReLU, TrainConfig, train
from .pilots import PILOT_LEN, pilot_matrix
from .rng import derive_rng

__all__ = [
    "pilot_matrix",
    "pilot_observations",
    "ls_estimate",
    "build_channel_net",
    "pilot_features",
    "gains_to_targets",
    "targets_to_gains",
    "LeastSquaresChannelEstimator",
    "NeuralChannelEstimator",
    "estimate_channels",
]


def pilot_observations(slot: SlotSignal, correct_leakage: bool = False) -> np.ndarray:
    """Symbol-averaged pilot segment of one slot, shape (4,) complex."""
    return symbol_average(slot, correct_leakage=correct_leakage)[:PILOT_LEN]


def _as_pilot_rows(pilot_obs) -> tuple[np.ndarray, bool]:
    obs = np.asarray(pilot_obs, dtype=np.complex128)
    if obs.ndim == 1:
        if obs.shape != (PILOT_LEN,):
            raise ValueError(f"expected {PILOT_LEN} pilot observations, got {obs.shape}")
        return obs[None, :], True
    if obs.ndim == 2 and obs.shape[1] == PILOT_LEN:
        return obs, False
    raise ValueError(f"expected shape (4,) or (n, 4), got {obs.shape}")


def ls_estimate(pilot_obs, tag_count: int) -> np.ndarray:
    """Least-squares gains (1/4) P y; exact when the observations are noiseless."""
    rows, single = _as_pilot_rows(pilot_obs)
    p = pilot_matrix(tag_count).astype(np.float64)
    est = rows @ p.T / PILOT_LEN
    return est[0] if single else est


def pilot_features(pilot_obs) -> np.ndarray:
    """(n, 4) complex pilot observations -> (n, 8) float32, re/im interleaved."""
    rows, _ = _as_pilot_rows(np.atleast_2d(np.asarray(pilot_obs, dtype=np.complex128)))
    out = np.empty((rows.shape[0], 2 * PILOT_LEN), dtype=np.float32)
    out[:, 0::2] = rows.real
    out[:, 1::2] = rows.imag
    return out


def gains_to_targets(gains) -> np.ndarray:
    """(n, R) complex gains -> (n, 2R) float32, re/im interleaved per gain."""
    g = np.atleast_2d(np.asarray(gains, dtype=np.complex128))
    out = np.empty((g.shape[0], 2 * g.shape[1]), dtype=np.float32)
    out[:, 0::2] = g.real
    out[:, 1::2] = g.imag
    return out


def targets_to_gains(targets: np.ndarray) -> np.ndarray:
    """Inverse of gains_to_targets: (n, 2R) reals -> (n, R) complex."""
    t = np.atleast_2d(np.asarray(targets, dtype=np.float64))
    if t.shape[1] % 2:
        raise ValueError("target width must be even (re/im pairs)")
    return t[:, 0::2] + 1j * t[:, 1::2]


def build_channel_net(tag_count: int, hidden_units: int = 128, hidden_layers: int = 4) -> list:
    """Regression head: 8 pilot reals -> 2*tag_count reals, no output activation."""
    if not 1 <= tag_count <= 4:
        raise ValueError(f"tag_count must be in [1, 4], got {tag_count}")
    widths = [2 * PILOT_LEN] + [hidden_units] * hidden_layers
    layers: list = []
    for n_in, n_out in zip(widths[:-1], widths[1:]):
        layers += [Dense(n_in, n_out), ReLU()]
    layers.append(Dense(widths[-1], 2 * tag_count))
    return layers


class LeastSquaresChannelEstimator(BaseEstimator):
    """Closed-form pilot projection; fit is a no-op."""

    def __init__(self, tag_count: int = 1):
        self.tag_count = tag_count

    def fit(self, X, y=None):
        _as_pilot_rows(X)
        self.n_features_in_ = PILOT_LEN
        return self

    def predict(self, X) -> np.ndarray:
        rows, single = _as_pilot_rows(X)
        est = ls_estimate(rows, self.tag_count)
        return est[0] if single else est


class NeuralChannelEstimator(BaseEstimator):
    """Learned pilot-to-gains regression for one fixed tag count."""

    def __init__(self, tag_count: int = 1, learning_rate: float = 1e-3,
                 batch_size: int = 1024, epochs: int = 200,
                 val_fraction: float = 0.1, seed: int = 0):
        self.tag_count = tag_count
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.epochs = epochs
        self.val_fraction = val_fraction
        self.seed = seed

    def fit(self, X, y):
        """X: (n, 4) complex pilot observations; y: (n, tag_count) complex gains."""
        feats = pilot_features(X)
        gains = np.atleast_2d(np.asarray(y, dtype=np.complex128))
        if gains.shape != (feats.shape[0], self.tag_count):
            raise ValueError(f"expected gains of shape (n, {self.tag_count}), got {gains.shape}")
        targets = gains_to_targets(gains)

        rng = derive_rng(self.seed, 1)
        order = rng.permutation(len(feats))
        n_val = int(round(self.val_fraction * len(feats)))
        val_idx, train_idx = order[:n_val], order[n_val:]

        self.net_ = Network(build_channel_net(self.tag_count), seed=derive_rng(self.seed, 0))
        cfg = TrainConfig(learning_rate=self.learning_rate, batch_size=self.batch_size,
                          epochs=self.epochs, loss=MSE,
                          seed=int(derive_rng(self.seed, 2).integers(2**31)))
        self.history_ = train(self.net_, feats[train_idx], targets[train_idx], cfg,
                              x_val=feats[val_idx] if n_val else None,
                              y_val=targets[val_idx] if n_val else None)
        self.n_features_in_ = PILOT_LEN
        return self

    @classmethod
    def from_network(cls, net: Network, tag_count: int, **kwargs) -> "NeuralChannelEstimator":
        expected = 2 * tag_count
        out_width = net.layers[-1].n_out
        if out_width != expected:
            raise ValueError(f"checkpoint outputs {out_width} values, need {expected} for R={tag_count}")
        est = cls(tag_count=tag_count, **kwargs)
        est.net_ = net
        return est

    def predict(self, X) -> np.ndarray:
        rows, single = _as_pilot_rows(X)
        out = targets_to_gains(self.net_.apply_batched(pilot_features(rows)))
        return out[0] if single else out


def estimate_channels(estimator, slot: SlotSignal, correct_leakage: bool = False) -> np.ndarray:
    """Gains of one slot via any estimator exposing predict on pilot rows.

    Gain i belongs to the tag transmitting pilot row i.
    """
    return estimator.predict(pilot_observations(slot, correct_leakage=correct_leakage))
