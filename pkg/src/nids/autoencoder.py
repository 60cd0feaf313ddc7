"""Bottleneck autoencoder used as a frozen feature compressor.

The autoencoder is a two-layer sigmoid network ``input -> code -> input`` with
independent encoder and decoder weights, trained by the same online SGD as the
classifier with each pattern as its own target.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from nids import _kernels
from nids.neuralnet import MlpModel, TrainConfig, TrainTrace, fit_targets, init_model


@dataclass
class AutoencoderModel:
    net: MlpModel

    def __post_init__(self):
        s = self.net.layer_sizes
        if len(s) != 3 or s[0] != s[2]:
            raise ValueError(f"autoencoder needs an n-c-n layout, got {s}")
        if not s[1] < s[0]:
            raise ValueError(f"code size {s[1]} must be smaller than input size {s[0]}")

    @property
    def input_dim(self) -> int:
        return self.net.layer_sizes[0]

    @property
    def code_dim(self) -> int:
        return self.net.layer_sizes[1]

    @property
    def beta(self) -> float:
        return self.net.beta

    @property
    def encoder(self) -> tuple[np.ndarray, np.ndarray]:
        return self.net.weights[0], self.net.biases[0]

    @property
    def decoder(self) -> tuple[np.ndarray, np.ndarray]:
        return self.net.weights[1], self.net.biases[1]


def train_autoencoder(features, code_dim: int, epochs: int, lr: float = 0.1, seed: int = 1,
                      beta: float = 1.0) -> tuple[AutoencoderModel, TrainTrace]:
    """Unsupervised reconstruction training; labels are not part of the call."""
    X = np.ascontiguousarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("cannot train an autoencoder on an empty matrix")
    n = X.shape[1]
    if code_dim >= n:
        raise ValueError(f"code_dim {code_dim} must be below the feature count {n}")
    model = AutoencoderModel(init_model([n, code_dim, n], seed, beta))
    trace = fit_targets(model.net, X, X, TrainConfig(lr, epochs, seed))
    return model, trace


def _through(model: AutoencoderModel, X, first: int):
    X = np.ascontiguousarray(X, dtype=np.float64)
    want = model.net.layer_sizes[first]
    if X.shape[-1] != want:
        raise ValueError(f"expected vectors of length {want}, got {X.shape[-1]}")
    params, sizes, w_off, b_off, a_off = model.net._k()
    batch = np.atleast_2d(X)
    out = _kernels.forward_batch(params, sizes, w_off, b_off, a_off, batch, model.beta, first, first + 1)
    return out if X.ndim == 2 else out[0]


def encode(model: AutoencoderModel, pattern) -> np.ndarray:
    """Code vector(s) ``sigmoid(x @ W_enc + b_enc)``; accepts one row or a matrix."""
    return _through(model, pattern, 0)


def decode(model: AutoencoderModel, code) -> np.ndarray:
    return _through(model, code, 1)


def reconstruction_error(model: AutoencoderModel, features) -> float:
    """Mean over patterns and features of the squared reconstruction residual."""
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("no patterns to reconstruct")
    return float(np.mean((decode(model, encode(model, X)) - X) ** 2))
