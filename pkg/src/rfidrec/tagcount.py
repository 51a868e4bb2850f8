"""Estimating how many tags collided in a slot (1..4).

Three routes: per-slot Gaussian-mixture clustering with BIC model selection
over 1..16 components, a feed-forward classifier on the flattened I/Q
sequence, and a 1-D convolutional classifier on the 2-channel I/Q sequence.
A mixture of L* clusters maps to the tag count x whose level set brackets
it: L* in (2^(x-1), 2^x]; a single cluster also means one tag.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from . import gmm
from .nn import (CROSS_ENTROPY, Conv1d, Dense, Flatten, Network, ReLU, Softmax,
                 TrainConfig, train)
from .rng import as_rng, derive_rng

__all__ = [
    "TagCountEstimate",
    "cluster_count_to_tag_count",
    "gmm_estimate_tag_count",
    "build_fnn_arch",
    "build_cnn_arch",
    "slots_to_features",
    "GmmTagCounter",
    "NeuralTagCounter",
]

TAG_CLASSES = np.array([1, 2, 3, 4])
MAX_TAGS = 4


@dataclass
class TagCountEstimate:
    """One slot's estimate: winning count plus a per-class score vector
    (softmax probabilities for the networks, negated best BIC for GMM)."""

    method: str
    tag_count: int
    scores: np.ndarray  # (4,), argmax-consistent with tag_count


def cluster_count_to_tag_count(n_clusters: int) -> int:
    """Smallest x with n_clusters <= 2^x; one cluster still means one tag."""
    if not 1 <= n_clusters <= 2**MAX_TAGS:
        raise ValueError(f"cluster count must be in [1, 16], got {n_clusters}")
    return max(1, (n_clusters - 1).bit_length())


def _validate_slots(x) -> np.ndarray:
    arr = np.asarray(x)
    if not np.iscomplexobj(arr) or arr.ndim != 2:
        raise ValueError(f"expected complex array of shape (n_slots, n_samples), got {arr.dtype} {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("slot samples must be finite")
    return arr


def slots_to_features(x) -> np.ndarray:
    """Complex (n, L) slot matrix -> float32 (n, 2, L) I/Q channel stack."""
    arr = _validate_slots(x)
    return np.stack([arr.real, arr.imag], axis=1).astype(np.float32)


def gmm_estimate_tag_count(points, seed=0, max_components: int = 16,
                           restarts: int = 3, tol: float = 1e-6,
                           max_iter: int = 200, covariance_floor: float = 1e-6) -> TagCountEstimate:
    """Cluster one slot's constellation points and map clusters to a count.

    Every candidate component count is fitted `restarts` times from distinct
    seeds (best log-likelihood kept) and scored by BIC; the per-class score
    is the negated best BIC among component counts mapping to that class.
    """
    x = gmm.as_points(points)
    if x.shape[0] < max_components:
        raise ValueError(f"need at least {max_components} points, got {x.shape[0]}")
    rng = as_rng(seed)
    best_bic = np.full(MAX_TAGS, np.inf)
    for n_components in range(1, max_components + 1):
        best_ll = -np.inf
        for _ in range(restarts):
            fit = gmm.fit_em(x, n_components, seed=rng, tol=tol,
                             max_iter=max_iter, covariance_floor=covariance_floor)
            best_ll = max(best_ll, fit.log_likelihood)
        bic = gmm.bic_score(best_ll, n_components, x.shape[0])
        cls = cluster_count_to_tag_count(n_components) - 1
        best_bic[cls] = min(best_bic[cls], bic)
    tag_count = int(best_bic.argmin()) + 1
    return TagCountEstimate(method="gmm", tag_count=tag_count, scores=-best_bic)


def build_fnn_arch(slot_len: int = 160) -> list:
    """Feed-forward classifier: 8 affine layers, hidden widths halving
    1024 -> 16, ReLU between, softmax over the 4 counts."""
    widths = [2 * slot_len, 1024, 512, 256, 128, 64, 32, 16]
    layers: list = [Flatten()]
    for n_in, n_out in zip(widths[:-1], widths[1:]):
        layers += [Dense(n_in, n_out), ReLU()]
    layers += [Dense(widths[-1], MAX_TAGS), Softmax()]
    return layers


def build_cnn_arch(slot_len: int = 160) -> list:
    """Convolutional classifier: three kernel-5 conv layers (16/64/32
    channels) over the 2-channel I/Q sequence, then 5 affine layers
    (512/256/64/32/4) with a softmax head."""
    conv_channels = [2, 16, 64, 32]
    layers: list = []
    out_len = slot_len
    for c_in, c_out in zip(conv_channels[:-1], conv_channels[1:]):
        layers += [Conv1d(c_in, c_out, 5), ReLU()]
        out_len -= 4
    layers.append(Flatten())
    widths = [conv_channels[-1] * out_len, 512, 256, 64, 32]
    for n_in, n_out in zip(widths[:-1], widths[1:]):
        layers += [Dense(n_in, n_out), ReLU()]
    layers += [Dense(widths[-1], MAX_TAGS), Softmax()]
    return layers


class GmmTagCounter(BaseEstimator, ClassifierMixin):
    """Stateless per-slot GMM+BIC counter with the sklearn estimator API.

    `fit` only records the input layout; prediction clusters each slot
    independently with a seed derived from (seed, row index), so results do
    not depend on how rows are batched.
    """

    def __init__(self, max_components: int = 16, restarts: int = 3, tol: float = 1e-6,
                 max_iter: int = 200, covariance_floor: float = 1e-6, seed: int = 0):
        self.max_components = max_components
        self.restarts = restarts
        self.tol = tol
        self.max_iter = max_iter
        self.covariance_floor = covariance_floor
        self.seed = seed

    def fit(self, X, y=None):
        X = _validate_slots(X)
        self.n_features_in_ = X.shape[1]
        self.classes_ = TAG_CLASSES.copy()
        return self

    def estimate(self, X) -> list[TagCountEstimate]:
        X = _validate_slots(X)
        return [
            gmm_estimate_tag_count(
                row,
                seed=derive_rng(self.seed, i),
                max_components=self.max_components,
                restarts=self.restarts,
                tol=self.tol,
                max_iter=self.max_iter,
                covariance_floor=self.covariance_floor,
            )
            for i, row in enumerate(X)
        ]

    def predict(self, X) -> np.ndarray:
        return np.array([e.tag_count for e in self.estimate(X)], dtype=np.int64)


class NeuralTagCounter(BaseEstimator, ClassifierMixin):
    """Feed-forward or convolutional tag-count classifier.

    Trains with fused softmax/cross-entropy on the raw I/Q sequence and
    keeps a fraction of the data as a per-epoch validation split.
    """

    def __init__(self, network: str = "cnn", learning_rate: float = 1e-3,
                 batch_size: int = 1024, epochs: int = 30,
                 val_fraction: float = 0.1, seed: int = 0):
        self.network = network
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.epochs = epochs
        self.val_fraction = val_fraction
        self.seed = seed

    def _build(self, slot_len: int) -> Network:
        if self.network == "fnn":
            return Network(build_fnn_arch(slot_len), seed=derive_rng(self.seed, 0))
        if self.network == "cnn":
            return Network(build_cnn_arch(slot_len), seed=derive_rng(self.seed, 0))
        raise ValueError(f"network must be 'fnn' or 'cnn', got {self.network!r}")

    def fit(self, X, y):
        feats = slots_to_features(X)
        y = np.asarray(y)
        if feats.shape[0] != y.shape[0]:
            raise ValueError("X and y lengths differ")
        if not np.isin(y, TAG_CLASSES).all():
            raise ValueError("labels must be tag counts in {1, 2, 3, 4}")
        labels = y.astype(np.int64) - 1

        rng = derive_rng(self.seed, 1)
        order = rng.permutation(len(feats))
        n_val = int(round(self.val_fraction * len(feats)))
        val_idx, train_idx = order[:n_val], order[n_val:]

        self.net_ = self._build(feats.shape[2])
        cfg = TrainConfig(learning_rate=self.learning_rate, batch_size=self.batch_size,
                          epochs=self.epochs, loss=CROSS_ENTROPY, seed=int(derive_rng(self.seed, 2).integers(2**31)))
        self.history_ = train(self.net_, feats[train_idx], labels[train_idx], cfg,
                              x_val=feats[val_idx] if n_val else None,
                              y_val=labels[val_idx] if n_val else None)
        self.classes_ = TAG_CLASSES.copy()
        self.n_features_in_ = X.shape[1]
        return self

    @classmethod
    def from_network(cls, net: Network, network: str, **kwargs) -> "NeuralTagCounter":
        """Wrap an already-trained network (e.g. loaded from a checkpoint)."""
        est = cls(network=network, **kwargs)
        est.net_ = net
        est.classes_ = TAG_CLASSES.copy()
        return est

    def predict_proba(self, X) -> np.ndarray:
        return self.net_.apply_batched(slots_to_features(X)).astype(np.float64)

    def predict(self, X) -> np.ndarray:
        return 1 + self.predict_proba(X).argmax(axis=1).astype(np.int64)

    def estimate(self, X) -> list[TagCountEstimate]:
        probs = self.predict_proba(X)
        return [TagCountEstimate(method=self.network, tag_count=int(p.argmax()) + 1, scores=p)
                for p in probs]
