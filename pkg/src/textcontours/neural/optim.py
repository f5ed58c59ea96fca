"""AdamW with decoupled weight decay and per-name learning-rate overrides."""

from __future__ import annotations

import numpy as np

from .tensor import Parameter


class AdamW:
    """Standard AdamW: bias-corrected moments, decay applied off-gradient.

    ``lr_overrides`` maps parameter-name prefixes to learning rates, which
    is how hybrid models give the embedding adapter its own rate.
    """

    def __init__(self, params: list[Parameter], lr: float,
                 weight_decay: float = 0.0, betas: tuple[float, float] = (0.9, 0.999),
                 eps: float = 1e-8, lr_overrides: dict[str, float] | None = None):
        if lr <= 0:
            raise ValueError("learning rate must be positive")
        self.params = list(params)
        self.lr = lr
        self.weight_decay = weight_decay
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.lr_overrides = dict(lr_overrides or {})
        self.t = 0
        self._m = [np.zeros_like(p.data) for p in self.params]
        self._v = [np.zeros_like(p.data) for p in self.params]

    def _lr_for(self, p: Parameter) -> float:
        for prefix, lr in self.lr_overrides.items():
            if p.name.startswith(prefix):
                return lr
        return self.lr

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()

    def step(self) -> None:
        self.t += 1
        bc1 = 1.0 - self.beta1 ** self.t
        bc2 = 1.0 - self.beta2 ** self.t
        for i, p in enumerate(self.params):
            lr = self._lr_for(p)
            if self.weight_decay:
                p.data -= lr * self.weight_decay * p.data
            g = p.grad
            if g is None:
                continue
            self._m[i] = self.beta1 * self._m[i] + (1.0 - self.beta1) * g
            self._v[i] = self.beta2 * self._v[i] + (1.0 - self.beta2) * (g * g)
            m_hat = self._m[i] / bc1
            v_hat = self._v[i] / bc2
            p.data -= lr * m_hat / (np.sqrt(v_hat) + self.eps)
