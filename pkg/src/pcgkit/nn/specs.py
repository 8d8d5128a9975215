"""Declarative layer and model specifications.

A ModelSpec is an ordered layer list plus the (channels, length) input shape;
it is enough to rebuild a model byte-for-byte given the same seed.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Union


@dataclass(frozen=True)
class Conv1D:
    out_channels: int
    kernel: int
    stride: int = 1
    pad: int = 0


@dataclass(frozen=True)
class MaxPool1D:
    size: int


@dataclass(frozen=True)
class BatchNorm1D:
    eps: float = 1e-5
    momentum: float = 0.1


@dataclass(frozen=True)
class Dense:
    out: int


@dataclass(frozen=True)
class ReLU:
    pass


@dataclass(frozen=True)
class Tanh:
    pass


@dataclass(frozen=True)
class Softmax:
    pass


@dataclass(frozen=True)
class Dropout:
    p: float


@dataclass(frozen=True)
class Flatten:
    pass


@dataclass(frozen=True)
class LSTM:
    hidden: int


LayerSpec = Union[Conv1D, MaxPool1D, BatchNorm1D, Dense, ReLU, Tanh, Softmax, Dropout, Flatten, LSTM]

_KINDS = {
    "conv1d": Conv1D,
    "maxpool1d": MaxPool1D,
    "batchnorm1d": BatchNorm1D,
    "dense": Dense,
    "relu": ReLU,
    "tanh": Tanh,
    "softmax": Softmax,
    "dropout": Dropout,
    "flatten": Flatten,
    "lstm": LSTM,
}
_NAMES = {cls: name for name, cls in _KINDS.items()}


@dataclass(frozen=True)
class ModelSpec:
    layers: tuple[LayerSpec, ...]
    input_shape: tuple[int, int]  # (channels / per-step features, length / steps)

    def __post_init__(self) -> None:
        for i, layer in enumerate(self.layers):
            if isinstance(layer, Softmax) and i != len(self.layers) - 1:
                raise ValueError("softmax may only appear as the terminal layer")

    def to_dict(self) -> dict:
        return {
            "input_shape": list(self.input_shape),
            "layers": [{"kind": _NAMES[type(l)], **asdict(l)} for l in self.layers],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ModelSpec":
        layers = []
        for entry in data["layers"]:
            entry = dict(entry)
            kind = _KINDS[entry.pop("kind")]
            layers.append(kind(**entry))
        return cls(tuple(layers), tuple(data["input_shape"]))


def cnn1d_spec(
    input_shape: tuple[int, int],
    n_classes: int,
    conv_channels: tuple[int, ...] = (8, 16, 32, 64),
    kernel: int = 16,
    stride: int = 2,
    pad: int = 7,
    pool: int = 2,
    dense_widths: tuple[int, ...] = (256, 128, 64),
    dropout_p: float = 0.25,
) -> ModelSpec:
    """Four conv blocks (conv, pool, batch norm, relu), flatten, then four
    dense layers; dropout follows each dense layer except the last."""
    layers: list[LayerSpec] = []
    for ch in conv_channels:
        layers += [Conv1D(ch, kernel, stride, pad), MaxPool1D(pool), BatchNorm1D(), ReLU()]
    layers.append(Flatten())
    for width in dense_widths:
        layers += [Dense(width), ReLU()]
        if dropout_p > 0:
            layers.append(Dropout(dropout_p))
    layers += [Dense(n_classes), Softmax()]
    return ModelSpec(tuple(layers), tuple(input_shape))


def lstm_rnn_spec(input_shape: tuple[int, int], n_classes: int, hidden: int = 128) -> ModelSpec:
    """Single LSTM (tanh cell activations) into a dense softmax head."""
    return ModelSpec((LSTM(hidden), Dense(n_classes), Softmax()), tuple(input_shape))


def crnn_spec(
    input_shape: tuple[int, int],
    n_classes: int,
    conv_channels: tuple[int, ...] = (8, 16),
    kernel: int = 16,
    stride: int = 2,
    pad: int = 7,
    pool: int = 2,
    hidden: int = 128,
) -> ModelSpec:
    """Two conv blocks feeding an LSTM over the remaining time axis."""
    layers: list[LayerSpec] = []
    for ch in conv_channels:
        layers += [Conv1D(ch, kernel, stride, pad), MaxPool1D(pool), BatchNorm1D(), ReLU()]
    layers += [LSTM(hidden), Dense(n_classes), Softmax()]
    return ModelSpec(tuple(layers), tuple(input_shape))


PRESETS = {
    "cnn1d": cnn1d_spec,
    "lstm_rnn": lstm_rnn_spec,
    "crnn": crnn_spec,
}
