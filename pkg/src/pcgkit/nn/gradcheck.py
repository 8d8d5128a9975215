"""Central finite-difference verification of analytic gradients.

All checks run in float64. The scalar objective is a fixed random projection
of the layer output, L = sum(r * f(x)), whose analytic input gradient is the
backward pass applied to r.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from pcgkit.nn.layers import DropoutLayer, Layer, SoftmaxLayer
from pcgkit.nn.model import cross_entropy, cross_entropy_grad

DEFAULT_STEP = 1e-4
ABS_FLOOR = 1e-7


@dataclass
class GradCheckReport:
    max_rel_param: float = 0.0
    max_rel_input: float = 0.0
    per_param: dict = field(default_factory=dict)

    @property
    def max_rel(self) -> float:
        return max(self.max_rel_param, self.max_rel_input)


def _rel_errors(analytic: np.ndarray, numeric: np.ndarray) -> np.ndarray:
    a = analytic.ravel()
    n = numeric.ravel()
    scale = np.maximum(np.abs(a), np.abs(n))
    err = np.abs(a - n) / np.maximum(scale, ABS_FLOOR)
    err[(np.abs(a) < ABS_FLOOR) & (np.abs(n) < ABS_FLOOR)] = 0.0
    return err


def grad_check_layer(
    layer: Layer,
    input_shape: tuple[int, ...],
    seed: int = 0,
    h: float = DEFAULT_STEP,
    train: bool = True,
) -> GradCheckReport:
    """Compare analytic parameter/input gradients with central differences.

    Dropout layers get a frozen mask so repeated forwards are comparable.
    """
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(input_shape).astype(np.float64)
    if isinstance(layer, DropoutLayer):
        layer.fixed_mask = (rng.random(input_shape) >= layer.p).astype(np.float64)

    def loss() -> float:
        return float(np.sum(projection * layer.forward(x, train)))

    y = layer.forward(x, train)
    projection = rng.standard_normal(y.shape)

    layer.zero_grad()
    layer.forward(x, train)
    dx = layer.backward(projection.astype(np.float64))

    report = GradCheckReport()
    for name, p in layer.params.items():
        analytic = layer.grads[name].copy()
        numeric = np.zeros_like(p, dtype=np.float64)
        flat_p = p.reshape(-1)
        flat_n = numeric.reshape(-1)
        for idx in range(flat_p.size):
            orig = flat_p[idx]
            flat_p[idx] = orig + h
            up = loss()
            flat_p[idx] = orig - h
            down = loss()
            flat_p[idx] = orig
            flat_n[idx] = (up - down) / (2.0 * h)
        worst = float(_rel_errors(analytic, numeric).max()) if numeric.size else 0.0
        report.per_param[name] = worst
        report.max_rel_param = max(report.max_rel_param, worst)

    numeric_dx = np.zeros_like(x)
    flat_x = x.reshape(-1)
    flat_d = numeric_dx.reshape(-1)
    for idx in range(flat_x.size):
        orig = flat_x[idx]
        flat_x[idx] = orig + h
        up = loss()
        flat_x[idx] = orig - h
        down = loss()
        flat_x[idx] = orig
        flat_d[idx] = (up - down) / (2.0 * h)
    report.max_rel_input = float(_rel_errors(dx, numeric_dx).max())

    if isinstance(layer, DropoutLayer):
        layer.fixed_mask = None
    return report


def grad_check_softmax_ce(batch: int = 4, classes: int = 5, seed: int = 0, h: float = DEFAULT_STEP) -> float:
    """Verify the fused softmax + cross-entropy gradient w.r.t. the logits."""
    rng = np.random.default_rng(seed)
    logits = rng.standard_normal((batch, classes))
    labels = rng.integers(0, classes, size=batch)
    layer = SoftmaxLayer()

    analytic = cross_entropy_grad(layer.forward(logits, train=True), labels)
    numeric = np.zeros_like(logits)
    flat = logits.reshape(-1)
    flat_n = numeric.reshape(-1)
    for idx in range(flat.size):
        orig = flat[idx]
        flat[idx] = orig + h
        up = cross_entropy(layer.forward(logits, True), labels)
        flat[idx] = orig - h
        down = cross_entropy(layer.forward(logits, True), labels)
        flat[idx] = orig
        flat_n[idx] = (up - down) / (2.0 * h)
    return float(_rel_errors(analytic, numeric).max())
