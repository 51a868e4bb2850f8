"""Dense/1-D-convolutional network with hand-written reverse-mode gradients.

Layers are stateless descriptors; a `Network` owns one parameter tuple per
layer and threads activations through them. Weights are float32 by default,
initialized uniform in +/-sqrt(6/(fan_in+fan_out)) with zero biases;
`astype(np.float64)` clones the network for high-precision gradient checks.
"""

from __future__ import annotations

import numpy as np

from ..rng import as_rng

__all__ = ["Dense", "Conv1d", "ReLU", "Softmax", "Flatten", "Network", "layer_from_descriptor"]


def _glorot_uniform(rng, shape, fan_in, fan_out, dtype):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape).astype(dtype)


class Dense:
    """Affine map: y = x @ W + b, x of shape (batch, n_in)."""

    def __init__(self, n_in: int, n_out: int):
        self.n_in = int(n_in)
        self.n_out = int(n_out)

    def init_params(self, rng, dtype):
        w = _glorot_uniform(rng, (self.n_in, self.n_out), self.n_in, self.n_out, dtype)
        b = np.zeros(self.n_out, dtype=dtype)
        return (w, b)

    def forward(self, x, params):
        w, b = params
        if x.ndim != 2 or x.shape[1] != self.n_in:
            raise ValueError(f"Dense({self.n_in},{self.n_out}) got input shape {x.shape}")
        return x @ w + b, x

    def backward(self, grad_out, params, cache):
        w, _ = params
        x = cache
        grad_w = x.T @ grad_out
        grad_b = grad_out.sum(axis=0)
        return grad_out @ w.T, (grad_w, grad_b)

    def descriptor(self):
        return {"type": "dense", "n_in": self.n_in, "n_out": self.n_out}


class Conv1d:
    """Valid 1-D convolution, stride 1: (batch, in_ch, L) -> (batch, out_ch, L-k+1)."""

    def __init__(self, in_channels: int, out_channels: int, kernel_size: int):
        self.in_channels = int(in_channels)
        self.out_channels = int(out_channels)
        self.kernel_size = int(kernel_size)

    def init_params(self, rng, dtype):
        k = self.kernel_size
        fan_in = self.in_channels * k
        fan_out = self.out_channels * k
        w = _glorot_uniform(rng, (self.out_channels, self.in_channels, k), fan_in, fan_out, dtype)
        b = np.zeros(self.out_channels, dtype=dtype)
        return (w, b)

    @staticmethod
    def _im2col(x, k):
        # (B, C, L) -> (B*L_out, C*k) patches, contiguous copy for one fat matmul
        windows = np.lib.stride_tricks.sliding_window_view(x, k, axis=2)  # (B, C, L_out, k)
        b, c, l_out, _ = windows.shape
        return np.ascontiguousarray(windows.transpose(0, 2, 1, 3)).reshape(b * l_out, c * k), l_out

    def forward(self, x, params):
        w, b = params
        if x.ndim != 3 or x.shape[1] != self.in_channels:
            raise ValueError(
                f"Conv1d({self.in_channels},{self.out_channels},k={self.kernel_size}) "
                f"got input shape {x.shape}"
            )
        if x.shape[2] < self.kernel_size:
            raise ValueError("input shorter than kernel")
        cols, l_out = self._im2col(x, self.kernel_size)
        w_mat = w.reshape(self.out_channels, -1)
        y = cols @ w_mat.T + b
        y = y.reshape(x.shape[0], l_out, self.out_channels).transpose(0, 2, 1)
        return np.ascontiguousarray(y), (x, cols, l_out)

    def backward(self, grad_out, params, cache):
        w, _ = params
        x, cols, l_out = cache
        batch = x.shape[0]
        k = self.kernel_size

        g = np.ascontiguousarray(grad_out.transpose(0, 2, 1)).reshape(batch * l_out, self.out_channels)
        grad_w = (g.T @ cols).reshape(w.shape)
        grad_b = g.sum(axis=0)

        # grad wrt input = full correlation of grad_out with the kernel
        # reversed along its tap axis
        pad = k - 1
        g_pad = np.zeros((batch, self.out_channels, l_out + 2 * pad), dtype=grad_out.dtype)
        g_pad[:, :, pad:pad + l_out] = grad_out
        g_cols, l_in = self._im2col(g_pad, k)
        w_rev = np.ascontiguousarray(w[:, :, ::-1].transpose(0, 2, 1)).reshape(self.out_channels * k, self.in_channels)
        grad_x = (g_cols @ w_rev).reshape(batch, l_in, self.in_channels).transpose(0, 2, 1)
        return np.ascontiguousarray(grad_x), (grad_w, grad_b)

    def descriptor(self):
        return {
            "type": "conv1d",
            "in_channels": self.in_channels,
            "out_channels": self.out_channels,
            "kernel_size": self.kernel_size,
        }


class ReLU:
    def init_params(self, rng, dtype):
        return ()

    def forward(self, x, params):
        return np.maximum(x, 0), x

    def backward(self, grad_out, params, cache):
        return grad_out * (cache > 0), ()

    def descriptor(self):
        return {"type": "relu"}


class Softmax:
    """Exp-normalize over the last axis; only valid as the terminal layer."""

    def init_params(self, rng, dtype):
        return ()

    def forward(self, x, params):
        z = x - x.max(axis=-1, keepdims=True)
        e = np.exp(z)
        y = e / e.sum(axis=-1, keepdims=True)
        return y, y

    def backward(self, grad_out, params, cache):
        y = cache
        dot = (grad_out * y).sum(axis=-1, keepdims=True)
        return y * (grad_out - dot), ()

    def descriptor(self):
        return {"type": "softmax"}


class Flatten:
    def init_params(self, rng, dtype):
        return ()

    def forward(self, x, params):
        return x.reshape(x.shape[0], -1), x.shape

    def backward(self, grad_out, params, cache):
        return grad_out.reshape(cache), ()

    def descriptor(self):
        return {"type": "flatten"}


def layer_from_descriptor(d: dict):
    kind = d.get("type")
    if kind == "dense":
        return Dense(d["n_in"], d["n_out"])
    if kind == "conv1d":
        return Conv1d(d["in_channels"], d["out_channels"], d["kernel_size"])
    if kind == "relu":
        return ReLU()
    if kind == "softmax":
        return Softmax()
    if kind == "flatten":
        return Flatten()
    raise ValueError(f"unknown layer type {kind!r}")


class Network:
    """Ordered layer stack with one parameter tuple per layer."""

    def __init__(self, layers, params=None, seed=None, dtype=np.float32):
        self.layers = list(layers)
        self.dtype = np.dtype(dtype)
        if params is None:
            rng = as_rng(seed)
            params = [layer.init_params(rng, self.dtype) for layer in self.layers]
        self.params = [tuple(p) for p in params]

    @property
    def num_params(self) -> int:
        return sum(t.size for group in self.params for t in group)

    def descriptor(self) -> dict:
        return {"layers": [layer.descriptor() for layer in self.layers]}

    def astype(self, dtype) -> "Network":
        params = [tuple(t.astype(dtype) for t in group) for group in self.params]
        return Network(self.layers, params=params, dtype=dtype)

    def forward(self, x, limit: int | None = None):
        x = np.asarray(x, dtype=self.dtype)
        for layer, p in zip(self.layers[:limit], self.params[:limit]):
            x, _ = layer.forward(x, p)
        return x

    def forward_cached(self, x, limit: int | None = None):
        x = np.asarray(x, dtype=self.dtype)
        caches = []
        for layer, p in zip(self.layers[:limit], self.params[:limit]):
            x, cache = layer.forward(x, p)
            caches.append(cache)
        return x, caches

    def backward(self, grad_out, caches, limit: int | None = None):
        """Exact gradients of every parameter given d(loss)/d(output)."""
        n = len(self.layers) if limit is None else limit
        grads = [()] * len(self.layers)
        g = grad_out
        for i in range(n - 1, -1, -1):
            g, grads[i] = self.layers[i].backward(g, self.params[i], caches[i])
        return grads

    def apply_batched(self, x, batch_size: int = 1024, workers: int = 1):
        """Forward pass in fixed-size chunks; chunk boundaries depend only on
        batch_size, so results are identical for any worker count."""
        chunks = [x[i:i + batch_size] for i in range(0, len(x), batch_size)]
        if workers > 1 and len(chunks) > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=workers) as pool:
                outs = list(pool.map(self.forward, chunks))
        else:
            outs = [self.forward(c) for c in chunks]
        return np.concatenate(outs, axis=0)
