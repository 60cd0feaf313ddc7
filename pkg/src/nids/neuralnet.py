"""Feedforward sigmoid network trained by online backpropagation.

All parameters of a model sit in one flat float64 vector; ``weights`` and
``biases`` are reshaped views into it, so an in-place update through the
compiled kernels is visible through both. Random numbers come from numpy's
PCG64 bit generator (``np.random.default_rng``), which is portable and
stable across platforms for a given seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from nids import _kernels


@dataclass
class MlpModel:
    """Layered sigmoid network.

    ``weights[k]`` has shape ``(layer_sizes[k], layer_sizes[k+1])`` and maps
    activations of layer ``k`` to potentials of layer ``k+1``.
    """

    layer_sizes: tuple[int, ...]
    params: np.ndarray
    beta: float = 1.0
    _layout: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.layer_sizes = tuple(int(s) for s in self.layer_sizes)
        if len(self.layer_sizes) < 2 or min(self.layer_sizes) < 1:
            raise ValueError(f"need at least two layers of size >= 1, got {self.layer_sizes}")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        self._layout = _layout(self.layer_sizes)
        self.params = np.ascontiguousarray(self.params, dtype=np.float64)
        if self.params.shape != (self.n_params,):
            raise ValueError(
                f"expected {self.n_params} parameters for {self.layer_sizes}, got {self.params.shape}"
            )

    @property
    def n_params(self) -> int:
        return int(self._layout[2][-1] + self.layer_sizes[-1])

    @property
    def weights(self) -> list[np.ndarray]:
        _, w_off, _, _ = self._layout
        s = self.layer_sizes
        return [
            self.params[w_off[k] : w_off[k] + s[k] * s[k + 1]].reshape(s[k], s[k + 1])
            for k in range(len(s) - 1)
        ]

    @property
    def biases(self) -> list[np.ndarray]:
        _, _, b_off, _ = self._layout
        s = self.layer_sizes
        return [self.params[b_off[k] : b_off[k] + s[k + 1]] for k in range(len(s) - 1)]

    @classmethod
    def from_arrays(cls, weights, biases, beta=1.0) -> "MlpModel":
        sizes = [np.shape(weights[0])[0]] + [np.shape(w)[1] for w in weights]
        flat = []
        for k, (w, b) in enumerate(zip(weights, biases)):
            w = np.asarray(w, dtype=np.float64)
            b = np.asarray(b, dtype=np.float64)
            if w.shape != (sizes[k], sizes[k + 1]) or b.shape != (sizes[k + 1],):
                raise ValueError(f"layer {k}: weight {w.shape} / bias {b.shape} do not chain")
            flat += [w.ravel(), b]
        return cls(tuple(sizes), np.concatenate(flat), beta)

    def copy(self) -> "MlpModel":
        return MlpModel(self.layer_sizes, self.params.copy(), self.beta)

    # kernel plumbing
    def _k(self):
        sizes, w_off, b_off, a_off = self._layout
        return self.params, sizes, w_off, b_off, a_off


def _layout(layer_sizes):
    sizes = np.asarray(layer_sizes, dtype=np.int64)
    n = len(sizes) - 1
    w_off = np.empty(n, dtype=np.int64)
    b_off = np.empty(n, dtype=np.int64)
    pos = 0
    for k in range(n):
        w_off[k] = pos
        pos += sizes[k] * sizes[k + 1]
        b_off[k] = pos
        pos += sizes[k + 1]
    a_off = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64)
    return sizes, w_off, b_off, a_off


@dataclass
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 1000
    seed: int = 1
    shuffle_each_epoch: bool = True

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")


@dataclass
class TrainTrace:
    """Mean squared error per epoch, measured before each pattern's update."""

    errors: list[float]

    @property
    def final(self) -> float:
        return self.errors[-1]

    def __len__(self):
        return len(self.errors)


def init_model(layer_sizes, seed: int, beta: float = 1.0) -> MlpModel:
    """Draw every weight and bias independently from U[-1, 1)."""
    layer_sizes = tuple(layer_sizes)
    if len(layer_sizes) < 2:
        raise ValueError(f"need at least an input and an output layer, got {layer_sizes}")
    shell = MlpModel(layer_sizes, np.zeros(_count(layer_sizes)), beta)
    rng = np.random.default_rng(seed)
    shell.params[:] = rng.uniform(-1.0, 1.0, size=shell.n_params)
    return shell


def _count(layer_sizes):
    return sum(a * b + b for a, b in zip(layer_sizes[:-1], layer_sizes[1:]))


def sigmoid(h, beta: float = 1.0):
    """Logistic transfer 1 / (1 + exp(-beta*h)); works on scalars and arrays."""
    if np.ndim(h) == 0:
        return 1.0 / (1.0 + math.exp(-beta * h)) if -beta * h < 709 else 0.0
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(-beta * np.asarray(h, dtype=np.float64)))


def _vector(model: MlpModel, pattern, layer: int = 0) -> np.ndarray:
    x = np.ascontiguousarray(pattern, dtype=np.float64)
    want = model.layer_sizes[layer]
    if x.shape != (want,):
        raise ValueError(f"pattern has shape {x.shape}, model expects ({want},)")
    return x


def forward(model: MlpModel, pattern) -> tuple[list[np.ndarray], float]:
    """Return the activation vector of every layer (input included) and the
    first output unit's activation."""
    x = _vector(model, pattern)
    params, sizes, w_off, b_off, a_off = model._k()
    acts = np.empty(int(sizes.sum()))
    acts[: sizes[0]] = x
    _kernels.forward_layers(params, sizes, w_off, b_off, a_off, acts, model.beta, 0, len(sizes) - 1)
    layers = [acts[a_off[k] : a_off[k] + sizes[k]].copy() for k in range(len(sizes))]
    return layers, float(layers[-1][0])


def _targets(model: MlpModel, target) -> np.ndarray:
    t = np.atleast_1d(np.asarray(target, dtype=np.float64))
    if t.shape != (model.layer_sizes[-1],):
        raise ValueError(f"target shape {t.shape} does not match output layer {model.layer_sizes[-1]}")
    return t


def loss_gradient(model: MlpModel, pattern, target) -> tuple[float, np.ndarray]:
    """Loss mean_j (y_j - t_j)^2 and its gradient w.r.t. the flat parameters."""
    x = _vector(model, pattern)
    t = _targets(model, target)
    params, sizes, w_off, b_off, a_off = model._k()
    n_act = int(sizes.sum())
    grad = np.empty_like(params)
    loss = _kernels.gradient(
        params, sizes, w_off, b_off, a_off, x, t, model.beta, np.empty(n_act), np.zeros(n_act), grad
    )
    return loss, grad


def backprop_update(model: MlpModel, pattern, target, lr: float) -> float:
    """One online gradient step on a single pattern, in place.

    Returns the squared error measured before the step.
    """
    x = _vector(model, pattern)
    t = _targets(model, target)
    params, sizes, w_off, b_off, a_off = model._k()
    n_act = int(sizes.sum())
    return _kernels.sgd_step(
        params, sizes, w_off, b_off, a_off, x, t, lr, model.beta,
        np.empty(n_act), np.zeros(n_act), np.empty_like(params),
    )


def epoch_orders(n_patterns: int, config: TrainConfig):
    """Yield the presentation order for each epoch."""
    rng = np.random.default_rng(config.seed)
    fixed = np.arange(n_patterns, dtype=np.int64)
    for _ in range(config.epochs):
        yield rng.permutation(n_patterns) if config.shuffle_each_epoch else fixed


def fit_targets(model: MlpModel, inputs, targets, config: TrainConfig) -> TrainTrace:
    """Online SGD of ``model`` toward arbitrary per-pattern target vectors."""
    X = np.ascontiguousarray(inputs, dtype=np.float64)
    T = np.ascontiguousarray(targets, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("training set is empty")
    if X.shape[1] != model.layer_sizes[0]:
        raise ValueError(f"data has {X.shape[1]} features, model expects {model.layer_sizes[0]}")
    if T.ndim == 1:
        T = T.reshape(-1, 1)
    if T.shape != (X.shape[0], model.layer_sizes[-1]):
        raise ValueError(f"targets of shape {T.shape} do not align with inputs {X.shape}")
    params, sizes, w_off, b_off, a_off = model._k()
    errors = [
        float(_kernels.sgd_epoch(params, sizes, w_off, b_off, a_off, X, T, order,
                                 config.learning_rate, model.beta))
        for order in epoch_orders(X.shape[0], config)
    ]
    return TrainTrace(errors)


def train(model: MlpModel, features, labels, config: TrainConfig) -> TrainTrace:
    """Train a single-output classifier on 0/1 labels."""
    labels = np.asarray(labels, dtype=np.float64)
    if len(labels) != len(features):
        raise ValueError(f"{len(features)} feature rows but {len(labels)} labels")
    return fit_targets(model, features, labels, config)


def predict_proba_batch(model: MlpModel, features) -> np.ndarray:
    X = np.ascontiguousarray(np.atleast_2d(features), dtype=np.float64)
    if X.shape[1] != model.layer_sizes[0]:
        raise ValueError(f"data has {X.shape[1]} features, model expects {model.layer_sizes[0]}")
    params, sizes, w_off, b_off, a_off = model._k()
    out = _kernels.forward_batch(params, sizes, w_off, b_off, a_off, X, model.beta, 0, len(sizes) - 1)
    return out[:, 0]


def predict_probability(model: MlpModel, pattern) -> float:
    return forward(model, pattern)[1]


def classify(probability, threshold: float = 0.5):
    """1 when the probability strictly exceeds the threshold."""
    if np.ndim(probability) == 0:
        return int(probability > threshold)
    return (np.asarray(probability) > threshold).astype(np.int8)


def mean_squared_error(outputs, targets) -> float:
    y = np.asarray(outputs, dtype=np.float64)
    z = np.asarray(targets, dtype=np.float64)
    if y.shape != z.shape:
        raise ValueError(f"length mismatch: {y.shape} vs {z.shape}")
    if y.size == 0:
        raise ValueError("no patterns")
    return float(np.mean((y - z) ** 2))
