from pcgkit.nn.gradcheck import GradCheckReport, grad_check_layer, grad_check_softmax_ce
from pcgkit.nn.layers import ShapeError
from pcgkit.nn.model import (
    Model,
    cross_entropy,
    cross_entropy_grad,
    load_checkpoint,
    save_checkpoint,
    xavier_init,
)
from pcgkit.nn.optim import AdamState, adam_step
from pcgkit.nn.specs import (
    PRESETS,
    LSTM,
    BatchNorm1D,
    Conv1D,
    Dense,
    Dropout,
    Flatten,
    MaxPool1D,
    ModelSpec,
    ReLU,
    Softmax,
    Tanh,
    cnn1d_spec,
    crnn_spec,
    lstm_rnn_spec,
)

__all__ = [
    "GradCheckReport",
    "grad_check_layer",
    "grad_check_softmax_ce",
    "ShapeError",
    "Model",
    "cross_entropy",
    "cross_entropy_grad",
    "load_checkpoint",
    "save_checkpoint",
    "xavier_init",
    "AdamState",
    "adam_step",
    "PRESETS",
    "LSTM",
    "BatchNorm1D",
    "Conv1D",
    "Dense",
    "Dropout",
    "Flatten",
    "MaxPool1D",
    "ModelSpec",
    "ReLU",
    "Softmax",
    "Tanh",
    "cnn1d_spec",
    "crnn_spec",
    "lstm_rnn_spec",
]
