"""Forward/backward implementations for every supported layer.

Conventions: conv-path tensors are (batch, channels, length); dense-path
tensors are (batch, features). Each layer owns ``params`` and accumulates
matching ``grads`` during backward. Gradients are exact analytic expressions;
``pcgkit.nn.gradcheck`` verifies them against central finite differences.
"""
from __future__ import annotations

import numpy as np

from pcgkit.nn import specs


class ShapeError(ValueError):
    pass


def xavier_uniform(rng: np.random.Generator, shape, fan_in: int, fan_out: int, dtype) -> np.ndarray:
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=shape).astype(dtype)


class Layer:
    """Base: stateless layers keep empty param/grad dicts."""

    def __init__(self) -> None:
        self.params: dict[str, np.ndarray] = {}
        self.grads: dict[str, np.ndarray] = {}

    def forward(self, x: np.ndarray, train: bool) -> np.ndarray:
        raise NotImplementedError

    def backward(self, dy: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def zero_grad(self) -> None:
        for name, g in self.grads.items():
            g[...] = 0.0

    def state_buffers(self) -> dict[str, np.ndarray]:
        """Non-learnable state persisted in checkpoints (e.g. running stats)."""
        return {}


class Conv1DLayer(Layer):
    def __init__(self, spec: specs.Conv1D, in_channels: int, rng, dtype) -> None:
        super().__init__()
        self.spec = spec
        self.in_channels = in_channels
        fan_in = in_channels * spec.kernel
        fan_out = spec.out_channels * spec.kernel
        self.params = {
            "w": xavier_uniform(rng, (spec.out_channels, in_channels, spec.kernel), fan_in, fan_out, dtype),
            "b": np.zeros(spec.out_channels, dtype=dtype),
        }
        self.grads = {k: np.zeros_like(v) for k, v in self.params.items()}

    def out_length(self, length: int) -> int:
        s = self.spec
        out = (length + 2 * s.pad - s.kernel) // s.stride + 1
        if out < 1:
            raise ShapeError(
                f"conv kernel {s.kernel} (pad {s.pad}, stride {s.stride}) does not fit length {length}"
            )
        return out

    def forward(self, x, train):
        if x.ndim != 3 or x.shape[1] != self.in_channels:
            raise ShapeError(f"expected (batch, {self.in_channels}, length), got {x.shape}")
        s = self.spec
        self.out_length(x.shape[2])
        xp = np.pad(x, ((0, 0), (0, 0), (s.pad, s.pad))) if s.pad else x
        windows = np.lib.stride_tricks.sliding_window_view(xp, s.kernel, axis=2)[:, :, :: s.stride]
        self._windows = windows
        self._in_shape = x.shape
        y = np.einsum("bclk,ock->bol", windows, self.params["w"], optimize=True)
        return y + self.params["b"][None, :, None]

    def backward(self, dy):
        s = self.spec
        w = self.params["w"]
        self.grads["w"] += np.einsum("bclk,bol->ock", self._windows, dy, optimize=True)
        self.grads["b"] += dy.sum(axis=(0, 2))
        batch, _, length = self._in_shape
        lout = dy.shape[2]
        dxp = np.zeros((batch, self.in_channels, length + 2 * s.pad), dtype=dy.dtype)
        for k in range(s.kernel):
            dxp[:, :, k : k + s.stride * (lout - 1) + 1 : s.stride] += np.einsum(
                "bol,oc->bcl", dy, w[:, :, k], optimize=True
            )
        return dxp[:, :, s.pad : s.pad + length] if s.pad else dxp


class MaxPool1DLayer(Layer):
    """Non-overlapping max pooling; a short trailing window is kept (ceil
    semantics), so pooling never produces an empty output."""

    def __init__(self, spec: specs.MaxPool1D) -> None:
        super().__init__()
        self.size = spec.size

    def forward(self, x, train):
        if x.ndim != 3:
            raise ShapeError(f"expected (batch, channels, length), got {x.shape}")
        b, c, length = x.shape
        lout = -(-length // self.size)
        pad = lout * self.size - length
        xp = np.pad(x, ((0, 0), (0, 0), (0, pad)), constant_values=-np.inf) if pad else x
        blocks = xp.reshape(b, c, lout, self.size)
        self._argmax = np.argmax(blocks, axis=3)
        self._shape = (b, c, length, lout, pad)
        return np.max(blocks, axis=3)

    def backward(self, dy):
        b, c, length, lout, pad = self._shape
        dxp = np.zeros((b, c, lout, self.size), dtype=dy.dtype)
        np.put_along_axis(dxp, self._argmax[..., None], dy[..., None], axis=3)
        dxp = dxp.reshape(b, c, lout * self.size)
        return dxp[:, :, :length] if pad else dxp


class BatchNorm1DLayer(Layer):
    def __init__(self, spec: specs.BatchNorm1D, channels: int, dtype) -> None:
        super().__init__()
        self.eps = spec.eps
        self.momentum = spec.momentum
        self.params = {
            "gamma": np.ones(channels, dtype=dtype),
            "beta": np.zeros(channels, dtype=dtype),
        }
        self.grads = {k: np.zeros_like(v) for k, v in self.params.items()}
        self.running_mean = np.zeros(channels, dtype=dtype)
        self.running_var = np.ones(channels, dtype=dtype)

    def state_buffers(self):
        return {"running_mean": self.running_mean, "running_var": self.running_var}

    def _axes_and_view(self, x):
        if x.ndim == 3:
            return (0, 2), (1, -1, 1)
        if x.ndim == 2:
            return (0,), (1, -1)
        raise ShapeError(f"batch norm expects 2-D or 3-D input, got {x.shape}")

    def forward(self, x, train):
        self._train = train
        axes, view = self._axes_and_view(x)
        if x.shape[1] != self.params["gamma"].size:
            raise ShapeError(f"expected {self.params['gamma'].size} channels, got {x.shape}")
        if train:
            mean = x.mean(axis=axes)
            var = x.var(axis=axes)  # population variance
            self.running_mean[...] = (1 - self.momentum) * self.running_mean + self.momentum * mean
            self.running_var[...] = (1 - self.momentum) * self.running_var + self.momentum * var
        else:
            mean, var = self.running_mean, self.running_var
        inv_std = 1.0 / np.sqrt(var + self.eps)
        xhat = (x - mean.reshape(view)) * inv_std.reshape(view)
        self._cache = (xhat, inv_std, axes, view)
        return self.params["gamma"].reshape(view) * xhat + self.params["beta"].reshape(view)

    def backward(self, dy):
        xhat, inv_std, axes, view = self._cache
        self.grads["gamma"] += (dy * xhat).sum(axis=axes)
        self.grads["beta"] += dy.sum(axis=axes)
        g = self.params["gamma"].reshape(view) * inv_std.reshape(view)
        if self._train:
            centered = dy - dy.mean(axis=axes, keepdims=True) - xhat * (dy * xhat).mean(axis=axes, keepdims=True)
            return g * centered
        # eval mode: running stats are constants
        return g * dy


class DenseLayer(Layer):
    def __init__(self, spec: specs.Dense, in_features: int, rng, dtype) -> None:
        super().__init__()
        self.in_features = in_features
        self.params = {
            "w": xavier_uniform(rng, (in_features, spec.out), in_features, spec.out, dtype),
            "b": np.zeros(spec.out, dtype=dtype),
        }
        self.grads = {k: np.zeros_like(v) for k, v in self.params.items()}

    def forward(self, x, train):
        if x.ndim != 2 or x.shape[1] != self.in_features:
            raise ShapeError(f"expected (batch, {self.in_features}), got {x.shape}")
        self._x = x
        return x @ self.params["w"] + self.params["b"]

    def backward(self, dy):
        self.grads["w"] += self._x.T @ dy
        self.grads["b"] += dy.sum(axis=0)
        return dy @ self.params["w"].T


class ReLULayer(Layer):
    def forward(self, x, train):
        self._mask = x > 0
        return np.where(self._mask, x, 0.0)

    def backward(self, dy):
        return np.where(self._mask, dy, 0.0)


class TanhLayer(Layer):
    def forward(self, x, train):
        self._y = np.tanh(x)
        return self._y

    def backward(self, dy):
        return dy * (1.0 - self._y**2)


class SoftmaxLayer(Layer):
    """Terminal softmax. Backward passes the incoming gradient through
    unchanged: the cross-entropy pairing supplies (p - onehot) / batch with
    respect to the logits directly (fused softmax + CE)."""

    def forward(self, x, train):
        if x.ndim != 2:
            raise ShapeError(f"softmax expects (batch, classes), got {x.shape}")
        z = x - x.max(axis=1, keepdims=True)
        e = np.exp(z)
        self.probs = e / e.sum(axis=1, keepdims=True)
        return self.probs

    def backward(self, dy):
        return dy


class DropoutLayer(Layer):
    """Inverted dropout: activations are scaled by 1/(1-p) at train time so
    eval-mode forward is the identity."""

    def __init__(self, spec: specs.Dropout, rng: np.random.Generator) -> None:
        super().__init__()
        if not 0.0 <= spec.p < 1.0:
            raise ValueError("dropout probability must lie in [0, 1)")
        self.p = spec.p
        self.rng = rng
        self.fixed_mask: np.ndarray | None = None  # for gradient checking

    def forward(self, x, train):
        if not train or self.p == 0.0:
            self._mask = None
            return x
        if self.fixed_mask is not None:
            mask = self.fixed_mask
        else:
            mask = (self.rng.random(x.shape) >= self.p).astype(x.dtype)
        self._mask = mask / (1.0 - self.p)
        return x * self._mask

    def backward(self, dy):
        return dy if self._mask is None else dy * self._mask


class FlattenLayer(Layer):
    def forward(self, x, train):
        if x.ndim != 3:
            raise ShapeError(f"flatten expects (batch, channels, length), got {x.shape}")
        self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, dy):
        return dy.reshape(self._shape)


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class LSTMLayer(Layer):
    """Single-layer LSTM over the length axis; emits the final hidden state.

    Input (batch, features, steps) -> output (batch, hidden). Cell follows
    the standard tanh formulation with sigmoid gates i, f, o:
        c_t = f * c_{t-1} + i * tanh-candidate, h_t = o * tanh(c_t)
    """

    def __init__(self, spec: specs.LSTM, in_features: int, rng, dtype) -> None:
        super().__init__()
        self.hidden = spec.hidden
        self.in_features = in_features
        h4 = 4 * spec.hidden
        self.params = {
            "wx": xavier_uniform(rng, (in_features, h4), in_features, h4, dtype),
            "wh": xavier_uniform(rng, (spec.hidden, h4), spec.hidden, h4, dtype),
            "b": np.zeros(h4, dtype=dtype),
        }
        self.grads = {k: np.zeros_like(v) for k, v in self.params.items()}

    def forward(self, x, train):
        if x.ndim != 3 or x.shape[1] != self.in_features:
            raise ShapeError(f"expected (batch, {self.in_features}, steps), got {x.shape}")
        b, _, steps = x.shape
        h = self.hidden
        wx, wh, bias = self.params["wx"], self.params["wh"], self.params["b"]
        h_t = np.zeros((b, h), dtype=x.dtype)
        c_t = np.zeros((b, h), dtype=x.dtype)
        self._steps = []
        self._x = x
        for t in range(steps):
            x_t = x[:, :, t]
            z = x_t @ wx + h_t @ wh + bias
            i = _sigmoid(z[:, :h])
            f = _sigmoid(z[:, h : 2 * h])
            g = np.tanh(z[:, 2 * h : 3 * h])
            o = _sigmoid(z[:, 3 * h :])
            c_prev, h_prev = c_t, h_t
            c_t = f * c_prev + i * g
            tanh_c = np.tanh(c_t)
            h_t = o * tanh_c
            self._steps.append((x_t, h_prev, c_prev, i, f, g, o, tanh_c))
        return h_t

    def backward(self, dy):
        h = self.hidden
        wx, wh = self.params["wx"], self.params["wh"]
        b, _, steps = self._x.shape
        dx = np.zeros_like(self._x)
        dh = dy
        dc = np.zeros_like(dy)
        for t in range(steps - 1, -1, -1):
            x_t, h_prev, c_prev, i, f, g, o, tanh_c = self._steps[t]
            do = dh * tanh_c
            dc = dc + dh * o * (1.0 - tanh_c**2)
            di = dc * g
            dg = dc * i
            df = dc * c_prev
            dz = np.concatenate(
                [di * i * (1 - i), df * f * (1 - f), dg * (1 - g**2), do * o * (1 - o)], axis=1
            )
            self.grads["wx"] += x_t.T @ dz
            self.grads["wh"] += h_prev.T @ dz
            self.grads["b"] += dz.sum(axis=0)
            dx[:, :, t] = dz @ wx.T
            dh = dz @ wh.T
            dc = dc * f
        return dx
