"""Model assembly, Xavier initialization, losses, and checkpoints."""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from pcgkit.nn import specs
from pcgkit.nn.layers import (
    BatchNorm1DLayer,
    Conv1DLayer,
    DenseLayer,
    DropoutLayer,
    FlattenLayer,
    Layer,
    LSTMLayer,
    MaxPool1DLayer,
    ReLULayer,
    ShapeError,
    SoftmaxLayer,
    TanhLayer,
)


def _shape_after(layer_spec, shape, layer_obj=None):
    """Track (channels, length) / (features,) through one layer."""
    if isinstance(layer_spec, specs.Conv1D):
        c, length = shape
        out = (length + 2 * layer_spec.pad - layer_spec.kernel) // layer_spec.stride + 1
        return (layer_spec.out_channels, out)
    if isinstance(layer_spec, specs.MaxPool1D):
        c, length = shape
        return (c, -(-length // layer_spec.size))
    if isinstance(layer_spec, specs.Flatten):
        c, length = shape
        return (c * length,)
    if isinstance(layer_spec, specs.LSTM):
        return (layer_spec.hidden,)
    if isinstance(layer_spec, specs.Dense):
        return (layer_spec.out,)
    return shape


class Model:
    """Ordered layer stack built from a ModelSpec with a fixed RNG seed.

    One model is owned by one training thread; eval-mode inference on a
    snapshot is a pure function and safe to share.
    """

    def __init__(self, spec: specs.ModelSpec, seed: int, dtype=np.float32) -> None:
        self.spec = spec
        self.seed = seed
        self.dtype = np.dtype(dtype)
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        self.layers: list[Layer] = []
        shape: tuple = tuple(spec.input_shape)
        for layer_spec in spec.layers:
            self.layers.append(self._build(layer_spec, shape, rng))
            shape = _shape_after(layer_spec, shape)
        self.output_shape = shape

    def _build(self, layer_spec, shape, rng) -> Layer:
        if isinstance(layer_spec, specs.Conv1D):
            return Conv1DLayer(layer_spec, shape[0], rng, self.dtype)
        if isinstance(layer_spec, specs.MaxPool1D):
            return MaxPool1DLayer(layer_spec)
        if isinstance(layer_spec, specs.BatchNorm1D):
            return BatchNorm1DLayer(layer_spec, shape[0], self.dtype)
        if isinstance(layer_spec, specs.Dense):
            if len(shape) != 1:
                raise ShapeError(f"dense layer needs flat input, got shape {shape}")
            return DenseLayer(layer_spec, shape[0], rng, self.dtype)
        if isinstance(layer_spec, specs.ReLU):
            return ReLULayer()
        if isinstance(layer_spec, specs.Tanh):
            return TanhLayer()
        if isinstance(layer_spec, specs.Softmax):
            return SoftmaxLayer()
        if isinstance(layer_spec, specs.Dropout):
            return DropoutLayer(layer_spec, np.random.default_rng(np.random.SeedSequence([self.seed, len(self.layers)])))
        if isinstance(layer_spec, specs.Flatten):
            return FlattenLayer()
        if isinstance(layer_spec, specs.LSTM):
            return LSTMLayer(layer_spec, shape[0], rng, self.dtype)
        raise ValueError(f"unknown layer spec {layer_spec!r}")

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        out = np.asarray(x, dtype=self.dtype)
        for i, layer in enumerate(self.layers):
            try:
                out = layer.forward(out, train)
            except ShapeError as exc:
                raise ShapeError(f"layer {i} ({type(layer).__name__}): {exc}") from None
        return out

    def backward(self, loss_grad: np.ndarray) -> None:
        """Propagate d(loss)/d(model output or logits) into parameter grads.

        With the terminal softmax, pass the fused cross-entropy gradient
        (probs - onehot) / batch; the softmax layer forwards it untouched.
        """
        grad = np.asarray(loss_grad, dtype=self.dtype)
        for layer in reversed(self.layers):
            grad = layer.backward(grad)

    def parameters(self):
        """Yield (key, param array, grad array) over all learnable tensors."""
        for i, layer in enumerate(self.layers):
            for name, p in layer.params.items():
                yield f"{i}.{name}", p, layer.grads[name]

    def zero_grad(self) -> None:
        for layer in self.layers:
            layer.zero_grad()

    def state_buffers(self):
        for i, layer in enumerate(self.layers):
            for name, buf in layer.state_buffers().items():
                yield f"{i}.{name}", buf

    def clone_parameters(self) -> dict[str, np.ndarray]:
        snap = {k: p.copy() for k, p, _ in self.parameters()}
        snap.update({f"buffer:{k}": b.copy() for k, b in self.state_buffers()})
        return snap

    def load_parameters(self, snapshot: dict[str, np.ndarray]) -> None:
        for k, p, _ in self.parameters():
            p[...] = snapshot[k]
        for k, b in self.state_buffers():
            key = f"buffer:{k}"
            if key in snapshot:
                b[...] = snapshot[key]


def xavier_init(spec: specs.ModelSpec, seed: int, dtype=np.float32) -> Model:
    """Build a model whose weights are Xavier-uniform and biases zero."""
    return Model(spec, seed, dtype)


def cross_entropy(probs: np.ndarray, labels: np.ndarray) -> float:
    """Mean negative log-likelihood of the true classes.

    ``labels`` are integer class indices; probabilities are floored at 1e-12
    inside the log for numerical safety.
    """
    probs = np.asarray(probs)
    labels = np.asarray(labels, dtype=int)
    if labels.min(initial=0) < 0 or labels.max(initial=0) >= probs.shape[1]:
        raise IndexError("label index out of range")
    picked = probs[np.arange(probs.shape[0]), labels]
    return float(-np.mean(np.log(np.maximum(picked, 1e-12))))


def cross_entropy_grad(probs: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Gradient of mean cross-entropy w.r.t. the softmax logits: (p - y)/n."""
    labels = np.asarray(labels, dtype=int)
    grad = probs.copy()
    grad[np.arange(probs.shape[0]), labels] -= 1.0
    return grad / probs.shape[0]


CHECKPOINT_MAGIC = b"PCGC"
CHECKPOINT_VERSION = 1


def save_checkpoint(path, model: Model, adam_state=None, extra: dict | None = None) -> None:
    """Single-file binary checkpoint: magic, JSON header, raw tensor blobs."""
    tensors: list[tuple[str, np.ndarray]] = []
    for key, p, _ in model.parameters():
        tensors.append((f"param:{key}", p))
    for key, buf in model.state_buffers():
        tensors.append((f"buffer:{key}", buf))
    opt_header = None
    if adam_state is not None:
        opt_header = {"step": adam_state.step, "lr_beta": [adam_state.beta1, adam_state.beta2, adam_state.eps]}
        for key, m in adam_state.m.items():
            tensors.append((f"adam.m:{key}", m))
        for key, v in adam_state.v.items():
            tensors.append((f"adam.v:{key}", v))
    header = {
        "version": CHECKPOINT_VERSION,
        "spec": model.spec.to_dict(),
        "seed": model.seed,
        "dtype": model.dtype.name,
        "adam": opt_header,
        "extra": extra or {},
        "tensors": [
            {"name": name, "dtype": str(t.dtype), "shape": list(t.shape)} for name, t in tensors
        ],
    }
    blob = json.dumps(header, sort_keys=True).encode()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<II", CHECKPOINT_VERSION, len(blob)))
        fh.write(blob)
        for _, t in tensors:
            fh.write(np.ascontiguousarray(t).tobytes())


def load_checkpoint(path):
    """Rebuild (model, adam_state or None, extra dict) from a checkpoint."""
    from pcgkit.nn.optim import AdamState

    raw = Path(path).read_bytes()
    if raw[:4] != CHECKPOINT_MAGIC:
        raise ValueError(f"{path}: not a model checkpoint")
    version, header_len = struct.unpack_from("<II", raw, 4)
    if version != CHECKPOINT_VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {version}")
    header = json.loads(raw[12 : 12 + header_len])
    model = Model(specs.ModelSpec.from_dict(header["spec"]), header["seed"], np.dtype(header["dtype"]))

    offset = 12 + header_len
    loaded: dict[str, np.ndarray] = {}
    for meta in header["tensors"]:
        count = int(np.prod(meta["shape"])) if meta["shape"] else 1
        dt = np.dtype(meta["dtype"])
        arr = np.frombuffer(raw, dtype=dt, count=count, offset=offset).reshape(meta["shape"])
        offset += count * dt.itemsize
        loaded[meta["name"]] = arr.copy()

    for key, p, _ in model.parameters():
        p[...] = loaded[f"param:{key}"]
    for key, buf in model.state_buffers():
        buf[...] = loaded[f"buffer:{key}"]

    adam = None
    if header["adam"] is not None:
        adam = AdamState.for_model(model)
        adam.step = header["adam"]["step"]
        for key in adam.m:
            adam.m[key][...] = loaded[f"adam.m:{key}"]
            adam.v[key][...] = loaded[f"adam.v:{key}"]
    return model, adam, header["extra"]
