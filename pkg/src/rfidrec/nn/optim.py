"""Adam optimizer with bias-corrected moment estimates."""

from __future__ import annotations

import numpy as np


class Adam:
    """Standard Adam; state is created lazily from the first parameter list."""

    def __init__(self, learning_rate: float = 1e-3, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        if learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._m = None
        self._v = None

    def step(self, params, grads):
        """Update parameter tensors in place from matching gradient tensors."""
        if self._m is None:
            self._m = [tuple(np.zeros_like(t) for t in group) for group in params]
            self._v = [tuple(np.zeros_like(t) for t in group) for group in params]
        self.t += 1
        c1 = 1.0 - self.beta1 ** self.t
        c2 = 1.0 - self.beta2 ** self.t
        for group, ggroup, mgroup, vgroup in zip(params, grads, self._m, self._v):
            for p, g, m, v in zip(group, ggroup, mgroup, vgroup):
                m *= self.beta1
                m += (1.0 - self.beta1) * g
                v *= self.beta2
                v += (1.0 - self.beta2) * np.square(g)
                p -= self.learning_rate * (m / c1) / (np.sqrt(v / c2) + self.eps)
