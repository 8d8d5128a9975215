"""Adam parameter updates with bias correction."""
from __future__ import annotations

import numpy as np


class AdamState:
    """First/second moment buffers and step counter, one pair per parameter."""

    def __init__(self, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> None:
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step = 0
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}

    @classmethod
    def for_model(cls, model, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> "AdamState":
        state = cls(beta1, beta2, eps)
        for key, p, _ in model.parameters():
            state.m[key] = np.zeros_like(p)
            state.v[key] = np.zeros_like(p)
        return state


def adam_step(model, state: AdamState, lr: float) -> None:
    """Apply one bias-corrected Adam update, then clear the gradients."""
    state.step += 1
    b1, b2 = state.beta1, state.beta2
    bc1 = 1.0 - b1**state.step
    bc2 = 1.0 - b2**state.step
    for key, p, g in model.parameters():
        m = state.m[key]
        v = state.v[key]
        m[...] = b1 * m + (1.0 - b1) * g
        v[...] = b2 * v + (1.0 - b2) * g * g
        p -= (lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)).astype(p.dtype)
    model.zero_grad()
