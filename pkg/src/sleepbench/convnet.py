"""1D convolutional classifiers for tabular rows.

A feature row of length ``d`` is treated as a single-channel sequence and fed
through::

    Conv1D -> ReLU -> MaxPool1D -> Conv1D -> ReLU -> MaxPool1D
        -> Dense -> Dropout -> Dense(2) -> Softmax

``conv1d_1`` uses window-2/stride-2 pooling (sequence length halves at each
pool); ``conv1d_2`` uses stride-1 same-padded pooling (length is kept).
Convolutions are cross-correlations with same zero padding and stride 1.

Arrays use the layout (batch, channels, length).
"""
from __future__ import annotations

import copy
import io
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import (
    ConfigError,
    ContractError,
    DimensionError,
    DivergenceError,
    ParameterError,
)
from .tensor import Rng, as_array, rand_uniform

VARIANTS = ("conv1d_1", "conv1d_2")
POOL_MODE = {"conv1d_1": "reduce", "conv1d_2": "preserve"}
PARAM_NAMES = ("conv1.kernels", "conv1.bias", "conv2.kernels", "conv2.bias",
               "dense.weights", "dense.bias", "out.weights", "out.bias")


@dataclass
class Conv1DLayer:
    kernels: np.ndarray  # (out_ch, in_ch, kernel_len)
    bias: np.ndarray  # (out_ch,)

    def __post_init__(self):
        self.kernels = as_array(self.kernels, rank=3)
        self.bias = as_array(self.bias, rank=1)
        if self.kernels.shape[2] % 2 == 0:
            raise ParameterError(f"kernel length must be odd, got {self.kernels.shape[2]}")
        if self.bias.shape[0] != self.kernels.shape[0]:
            raise DimensionError(
                f"bias shape {self.bias.shape} does not match kernels {self.kernels.shape}"
            )

    @property
    def in_channels(self):
        return self.kernels.shape[1]

    @property
    def kernel_len(self):
        return self.kernels.shape[2]


@dataclass(frozen=True)
class MaxPool1DLayer:
    mode: str = "reduce"
    pool_len: int = 2

    def __post_init__(self):
        if self.mode not in ("reduce", "preserve"):
            raise ParameterError(f"unknown pooling mode {self.mode!r}")
        if self.mode == "reduce" and self.pool_len != 2:
            raise ParameterError("reduce pooling uses a window of 2")
        if self.mode == "preserve" and (self.pool_len < 1 or self.pool_len % 2 == 0):
            raise ParameterError("preserve pooling needs an odd window length")

    @property
    def stride(self):
        return 2 if self.mode == "reduce" else 1

    def output_len(self, length: int) -> int:
        return length // 2 if self.mode == "reduce" else length


def _windows(x, k):
    pad = k // 2
    xp = np.pad(x, ((0, 0), (0, 0), (pad, pad)))
    return np.lib.stride_tricks.sliding_window_view(xp, k, axis=2)  # (B, C, L, k)


def conv1d_forward(x, layer: Conv1DLayer) -> np.ndarray:
    x = as_array(x, rank=3)
    if x.shape[1] != layer.in_channels:
        raise DimensionError(
            f"input has {x.shape[1]} channels, layer expects {layer.in_channels}"
        )
    out = np.einsum("bclk,ock->bol", _windows(x, layer.kernel_len), layer.kernels)
    return out + layer.bias[None, :, None]


def conv1d_backward(grad_out, x, layer: Conv1DLayer):
    """Gradients w.r.t. (input, kernels, bias) given the cached input ``x``."""
    x = as_array(x, rank=3)
    grad_out = as_array(grad_out, rank=3)
    expected = (x.shape[0], layer.kernels.shape[0], x.shape[2])
    if grad_out.shape != expected:
        raise DimensionError(f"grad_out shape {grad_out.shape}, expected {expected}")
    k = layer.kernel_len
    pad = k // 2
    grad_kernels = np.einsum("bol,bclk->ock", grad_out, _windows(x, k))
    grad_bias = grad_out.sum(axis=(0, 2))
    length = x.shape[2]
    grad_xp = np.zeros((x.shape[0], x.shape[1], length + 2 * pad))
    for t in range(k):
        grad_xp[:, :, t:t + length] += np.einsum("bol,oc->bcl", grad_out, layer.kernels[:, :, t])
    return grad_xp[:, :, pad:pad + length], grad_kernels, grad_bias


def maxpool_forward(x, layer: MaxPool1DLayer):
    """Windowed maxima and the flat input position of each maximum.

    Ties resolve to the first maximal position in the window.
    """
    x = as_array(x, rank=3)
    length = x.shape[2]
    if layer.mode == "reduce":
        if length < 2:
            raise DimensionError("reduce pooling needs input length >= 2")
        out_len = length // 2
        win = x[:, :, : 2 * out_len].reshape(x.shape[0], x.shape[1], out_len, 2)
        offset = np.argmax(win, axis=3)
        argmax = 2 * np.arange(out_len)[None, None, :] + offset
    else:
        pad = layer.pool_len // 2
        xp = np.pad(x, ((0, 0), (0, 0), (pad, pad)), constant_values=-np.inf)
        win = np.lib.stride_tricks.sliding_window_view(xp, layer.pool_len, axis=2)
        offset = np.argmax(win, axis=3)
        argmax = np.arange(length)[None, None, :] + offset - pad
    out = np.take_along_axis(x, argmax, axis=2)
    return out, argmax


def maxpool_backward(grad_out, argmax, input_shape) -> np.ndarray:
    """Route each output gradient to its argmax; overlapping windows add."""
    grad_out = np.asarray(grad_out, dtype=np.float64)
    argmax = np.asarray(argmax)
    input_shape = tuple(input_shape)
    if grad_out.shape != argmax.shape or grad_out.shape[:2] != input_shape[:2]:
        raise ContractError(
            f"argmax {argmax.shape} / grad_out {grad_out.shape} do not come from a "
            f"forward pass over input {input_shape}"
        )
    if argmax.size and (argmax.min() < 0 or argmax.max() >= input_shape[2]):
        raise ContractError("argmax indices fall outside the input")
    grad_in = np.zeros(input_shape)
    b, c, _ = np.indices(argmax.shape)
    np.add.at(grad_in, (b, c, argmax), grad_out)
    return grad_in


def relu(x):
    return np.maximum(x, 0.0)


def dropout(x, rate: float, rng: Rng | None, train_mode: bool):
    """Inverted dropout. Returns ``(output, mask)`` where mask is 0/1."""
    if not 0.0 <= rate < 1.0:
        raise ParameterError(f"dropout rate must be in [0, 1), got {rate}")
    x = np.asarray(x, dtype=np.float64)
    if not train_mode or rate == 0.0:
        return x.copy(), np.ones_like(x)
    mask = (rng.generator.random(x.shape) >= rate).astype(np.float64)
    return x * mask / (1.0 - rate), mask


def softmax_cross_entropy(logits, labels):
    """Mean cross-entropy over the batch and its gradient w.r.t. the logits."""
    logits = as_array(logits, rank=2)
    labels = np.asarray(labels, dtype=np.int64)
    if not np.all(np.isfinite(logits)):
        raise FloatingPointError("non-finite logits")
    if labels.shape != (logits.shape[0],):
        raise DimensionError(f"labels shape {labels.shape} vs logits {logits.shape}")
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    log_p = shifted - log_norm
    rows = np.arange(labels.size)
    loss = -log_p[rows, labels].mean()
    grad = np.exp(log_p)
    grad[rows, labels] -= 1.0
    return float(loss), grad / labels.size


@dataclass(frozen=True)
class CnnTrainConfig:
    learning_rate: float = 0.05
    epochs: int = 300
    dropout_rate: float = 0.5
    channels: tuple = (8, 16)
    kernel_len: int = 3
    hidden: int = 32
    preserve_pool_len: int = 3
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "channels", tuple(int(c) for c in self.channels))
        if not self.learning_rate > 0:
            raise ParameterError("learning_rate must be positive")
        if self.epochs < 0:
            raise ParameterError("epochs must be nonnegative")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ParameterError("dropout_rate must be in [0, 1)")
        if len(self.channels) != 2 or min(self.channels) < 1:
            raise ParameterError("channels must be two positive integers")
        if self.kernel_len < 1 or self.kernel_len % 2 == 0:
            raise ParameterError("kernel_len must be a positive odd integer")
        if self.hidden < 1:
            raise ParameterError("hidden must be positive")


def flat_length(variant: str, d: int, channels: int) -> int:
    """Length of the flattened representation entering the dense layer."""
    if variant == "conv1d_1":
        return channels * ((d // 2) // 2)
    return channels * d


@dataclass
class CnnModel:
    variant: str
    d: int
    config: CnnTrainConfig
    params: dict
    train_mode: bool = False
    loss_history: list = field(default_factory=list)

    @property
    def pool(self) -> MaxPool1DLayer:
        if POOL_MODE[self.variant] == "reduce":
            return MaxPool1DLayer("reduce", 2)
        return MaxPool1DLayer("preserve", self.config.preserve_pool_len)

    def conv(self, i):
        return Conv1DLayer(self.params[f"conv{i}.kernels"], self.params[f"conv{i}.bias"])

    def forward(self, X, rng: Rng | None = None):
        """Logits for a batch of rows plus the cache needed by :meth:`backward`."""
        X = as_array(X, rank=2)
        if X.shape[1] != self.d:
            raise DimensionError(f"model expects {self.d} features, got {X.shape[1]}")
        p = self.params
        cache = {}
        h = X[:, None, :]
        for i in (1, 2):
            layer = self.conv(i)
            cache[f"in{i}"] = h
            z = conv1d_forward(h, layer)
            cache[f"z{i}"] = z
            a = relu(z)
            h, cache[f"arg{i}"] = maxpool_forward(a, self.pool)
        cache["pooled_shape"] = h.shape
        flat = h.reshape(h.shape[0], -1)
        cache["flat"] = flat
        hz = flat @ p["dense.weights"].T + p["dense.bias"]
        cache["hz"] = hz
        hidden, mask = dropout(hz, self.config.dropout_rate, rng, self.train_mode)
        cache["mask"] = mask
        cache["hidden"] = hidden
        logits = hidden @ p["out.weights"].T + p["out.bias"]
        return logits, cache

    def backward(self, cache, grad_logits) -> dict:
        p = self.params
        rate = self.config.dropout_rate if self.train_mode else 0.0
        grads = {
            "out.weights": grad_logits.T @ cache["hidden"],
            "out.bias": grad_logits.sum(axis=0),
        }
        g_hidden = grad_logits @ p["out.weights"]
        g_hz = g_hidden * cache["mask"] / (1.0 - rate)
        grads["dense.weights"] = g_hz.T @ cache["flat"]
        grads["dense.bias"] = g_hz.sum(axis=0)
        g = (g_hz @ p["dense.weights"]).reshape(cache["pooled_shape"])
        for i in (2, 1):
            z = cache[f"z{i}"]
            g = maxpool_backward(g, cache[f"arg{i}"], z.shape) * (z > 0)
            g, grads[f"conv{i}.kernels"], grads[f"conv{i}.bias"] = conv1d_backward(
                g, cache[f"in{i}"], self.conv(i)
            )
        return grads

    def loss_and_grads(self, X, y, rng: Rng | None = None):
        logits, cache = self.forward(X, rng)
        loss, g = softmax_cross_entropy(logits, y)
        return loss, self.backward(cache, g)

    def to_dict(self):
        cfg = asdict(self.config)
        cfg["channels"] = list(cfg["channels"])
        return {
            "variant": self.variant,
            "d": self.d,
            "config": cfg,
            "params": {k: v.tolist() for k, v in self.params.items()},
            "loss_history": list(self.loss_history),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            data["variant"],
            int(data["d"]),
            CnnTrainConfig(**data["config"]),
            {k: np.asarray(v, dtype=np.float64) for k, v in data["params"].items()},
            False,
            [float(v) for v in data.get("loss_history", [])],
        )

    @property
    def kind(self):
        return self.variant


def _glorot(rng, shape, fan_in, fan_out):
    s = np.sqrt(6.0 / (fan_in + fan_out))
    return rand_uniform(rng, shape, -s, s)


def build_cnn(variant: str, d: int, cfg: CnnTrainConfig | None = None,
              rng: Rng | None = None) -> CnnModel:
    """Initialize a CNN for rows of ``d`` features (eval mode)."""
    cfg = cfg or CnnTrainConfig()
    if variant not in VARIANTS:
        raise ConfigError(f"unknown CNN variant {variant!r}; expected one of {VARIANTS}")
    minimum = 4 if variant == "conv1d_1" else 1
    if d < minimum:
        raise ConfigError(f"{variant} needs at least {minimum} features, got d={d}")
    rng = rng or Rng(cfg.seed)
    c1, c2 = cfg.channels
    k = cfg.kernel_len
    flat = flat_length(variant, d, c2)
    params = {
        "conv1.kernels": _glorot(rng, (c1, 1, k), k, c1 * k),
        "conv1.bias": np.zeros(c1),
        "conv2.kernels": _glorot(rng, (c2, c1, k), c1 * k, c2 * k),
        "conv2.bias": np.zeros(c2),
        "dense.weights": _glorot(rng, (cfg.hidden, flat), flat, cfg.hidden),
        "dense.bias": np.zeros(cfg.hidden),
        "out.weights": _glorot(rng, (2, cfg.hidden), cfg.hidden, 2),
        "out.bias": np.zeros(2),
    }
    return CnnModel(variant, d, cfg, params)


def train_cnn(model: CnnModel, X, y, cfg: CnnTrainConfig | None = None,
              rng: Rng | None = None) -> CnnModel:
    """Full-batch gradient descent on softmax cross-entropy.

    Returns a new model in eval mode whose ``loss_history`` holds the
    training loss of each epoch (measured before that epoch's update).
    """
    cfg = cfg or model.config
    X = as_array(X, rank=2)
    y = np.asarray(y, dtype=np.int64)
    rng = rng or Rng((cfg.seed, "dropout"))
    trained = copy.deepcopy(model)
    trained.config = cfg
    trained.train_mode = True
    history = []
    for epoch in range(cfg.epochs):
        try:
            loss, grads = trained.loss_and_grads(X, y, rng)
        except ArithmeticError:
            raise DivergenceError(epoch, cfg.learning_rate) from None
        if not np.isfinite(loss):
            raise DivergenceError(epoch, cfg.learning_rate, loss)
        history.append(loss)
        for name in PARAM_NAMES:
            trained.params[name] = trained.params[name] - cfg.learning_rate * grads[name]
    trained.train_mode = False
    trained.loss_history = history
    return trained


def predict_logits(model: CnnModel, X) -> np.ndarray:
    if model.train_mode:
        raise ContractError("model is in train mode; dropout would make predictions random")
    logits, _ = model.forward(X)
    return logits


def predict_cnn(model: CnnModel, X) -> np.ndarray:
    """Argmax class per row; equal scores go to class 1."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    logits = predict_logits(model, X)
    return (logits[:, 1] >= logits[:, 0]).astype(np.int64)


def loss_csv(model: CnnModel) -> str:
    out = io.StringIO()
    out.write("epoch,loss\n")
    for i, v in enumerate(model.loss_history):
        out.write(f"{i},{v!r}\n")
    return out.getvalue()
