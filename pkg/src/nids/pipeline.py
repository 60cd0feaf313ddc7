"""Shallow and deep end-to-end detectors and the experiment grid.

The shallow detector is ``normalizer -> [n, 11, 1] classifier``. The deep one
puts a frozen autoencoder encoder in front: ``normalizer -> encoder (n -> 19)
-> [19, 11, 1] classifier``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from nids.autoencoder import AutoencoderModel, encode, train_autoencoder
from nids.dataset import Normalizer, apply_normalizer, fit_normalizer, subsample
from nids.evaluation import Metrics, metrics_from_predictions
from nids.neuralnet import (
    MlpModel, TrainConfig, TrainTrace, classify, init_model, predict_proba_batch, train,
)

log = logging.getLogger(__name__)

HIDDEN_UNITS = 11
STABLE_SPREAD = 0.02
RESULT_COLUMNS = ("row", "n_inputs", "epochs", "lr", "autoencoder", "final_error",
                  "performance_pct", "val_accuracy_pct", "stable")


@dataclass
class ExperimentConfig:
    n_inputs: int
    epochs: int
    learning_rate: float = 0.1
    use_autoencoder: bool = False
    ae_epochs: int = 1000
    encoder_dim: int = 19
    seed: int = 1
    ae_learning_rate: float = 0.1

    def __post_init__(self):
        if self.n_inputs < 1:
            raise ValueError(f"n_inputs must be positive, got {self.n_inputs}")
        TrainConfig(self.learning_rate, self.epochs, self.seed)
        if self.use_autoencoder:
            TrainConfig(self.ae_learning_rate, self.ae_epochs, self.seed)


# inputs, epochs, lr, autoencoder
TABLE1 = [
    ExperimentConfig(150, 1000, 0.1, False),
    ExperimentConfig(6000, 300, 0.1, False),
    ExperimentConfig(6000, 1000, 0.1, False),
    ExperimentConfig(6000, 300, 0.1, True),
    ExperimentConfig(6000, 500, 0.1, True),
    ExperimentConfig(6000, 1000, 0.1, True),
    ExperimentConfig(6000, 5000, 0.1, True),
    ExperimentConfig(6000, 300, 0.01, True),
    ExperimentConfig(6000, 300, 0.5, True),
]


@dataclass
class DeepModel:
    normalizer: Normalizer
    classifier: MlpModel
    encoder: AutoencoderModel | None = None
    threshold: float = 0.5
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        n = self.normalizer.n_features
        want = self.encoder.code_dim if self.encoder is not None else n
        if self.encoder is not None and self.encoder.input_dim != n:
            raise ValueError(f"encoder takes {self.encoder.input_dim} inputs, normalizer yields {n}")
        if self.classifier.layer_sizes[0] != want:
            raise ValueError(f"classifier takes {self.classifier.layer_sizes[0]} inputs, expected {want}")
        if self.classifier.layer_sizes[-1] != 1:
            raise ValueError("classifier must have a single output unit")

    @property
    def kind(self) -> str:
        return "shallow" if self.encoder is None else "deep"

    @property
    def n_features(self) -> int:
        return self.normalizer.n_features

    @property
    def chain(self) -> tuple[int, ...]:
        head = (self.n_features,) if self.encoder is not None else ()
        return head + self.classifier.layer_sizes

    def transform(self, features) -> np.ndarray:
        """Raw rows -> classifier inputs."""
        Z = apply_normalizer(self.normalizer, features)
        return encode(self.encoder, Z) if self.encoder is not None else Z


def score_batch(model: DeepModel, features) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise ValueError(f"expected rows of {model.n_features} raw features, got shape {X.shape}")
    if not np.isfinite(X).all():
        raise ValueError("raw features contain NaN or infinite values")
    prob = predict_proba_batch(model.classifier, model.transform(X))
    return prob, classify(prob, model.threshold)


def score(model: DeepModel, raw_features) -> tuple[float, int]:
    """Probability of attack and the thresholded 0/1 label for one raw row."""
    x = np.asarray(raw_features, dtype=np.float64)
    if x.shape != (model.n_features,):
        raise ValueError(f"expected {model.n_features} raw features, got shape {x.shape}")
    prob, label = score_batch(model, x[None, :])
    return float(prob[0]), int(label[0])


def error_to_performance(error: float) -> float:
    """Table-style performance percentage ``(1 - error) * 100``."""
    return (1.0 - error) * 100.0


def last_quartile_spread(trace) -> float:
    errs = np.asarray(trace.errors if isinstance(trace, TrainTrace) else trace)
    tail = errs[-max(1, math.ceil(len(errs) / 4)):]
    return float(tail.max() - tail.min())


def is_stable(trace, limit: float = STABLE_SPREAD) -> bool:
    return last_quartile_spread(trace) < limit


@dataclass
class TrainedPipeline:
    model: DeepModel
    trace: TrainTrace
    validation: Metrics | None
    ae_trace: TrainTrace | None = None


def _prepare(train_data, config: ExperimentConfig, normalizer: Normalizer | None):
    X, y = train_data
    X, y = subsample(X, y, config.n_inputs, config.seed)
    if normalizer is None:
        normalizer = fit_normalizer(X)
    return X, y, normalizer


def _validate(model: DeepModel, validation_data) -> Metrics | None:
    if validation_data is None or len(validation_data[1]) == 0:
        return None
    _, pred = score_batch(model, validation_data[0])
    return metrics_from_predictions(pred, validation_data[1])


def train_shallow(train_data, validation_data, config: ExperimentConfig,
                  normalizer: Normalizer | None = None) -> TrainedPipeline:
    """Train ``normalizer -> [n, 11, 1]`` on raw (unnormalized) training rows."""
    if config.use_autoencoder:
        raise ValueError("train_shallow called with use_autoencoder=True")
    X, y, normalizer = _prepare(train_data, config, normalizer)
    Z = apply_normalizer(normalizer, X)
    clf = init_model([Z.shape[1], HIDDEN_UNITS, 1], config.seed)
    trace = train(clf, Z, y, TrainConfig(config.learning_rate, config.epochs, config.seed))
    model = DeepModel(normalizer, clf)
    return TrainedPipeline(model, trace, _validate(model, validation_data))


def train_deep(train_data, validation_data, config: ExperimentConfig,
               normalizer: Normalizer | None = None) -> TrainedPipeline:
    """Pretrain the autoencoder on the unlabelled training rows, freeze it,
    then train a ``[code, 11, 1]`` classifier on the codes."""
    if not config.use_autoencoder:
        raise ValueError("train_deep called with use_autoencoder=False")
    X, y, normalizer = _prepare(train_data, config, normalizer)
    Z = apply_normalizer(normalizer, X)
    ae, ae_trace = train_autoencoder(Z, config.encoder_dim, config.ae_epochs,
                                     config.ae_learning_rate, config.seed)
    codes = encode(ae, Z)
    clf = init_model([config.encoder_dim, HIDDEN_UNITS, 1], config.seed)
    trace = train(clf, codes, y, TrainConfig(config.learning_rate, config.epochs, config.seed))
    model = DeepModel(normalizer, clf, ae)
    return TrainedPipeline(model, trace, _validate(model, validation_data), ae_trace)


def run_pipeline(train_data, validation_data, config: ExperimentConfig,
                 normalizer: Normalizer | None = None) -> TrainedPipeline:
    fn = train_deep if config.use_autoencoder else train_shallow
    return fn(train_data, validation_data, config, normalizer)


@dataclass
class ExperimentResult:
    row: int
    config: ExperimentConfig
    final_error: float | None = None
    validation: Metrics | None = None
    spread: float | None = None
    failure: str | None = None

    @property
    def performance(self) -> float | None:
        return None if self.final_error is None else error_to_performance(self.final_error)

    @property
    def stable(self) -> bool | None:
        return None if self.spread is None else self.spread < STABLE_SPREAD

    def csv_cells(self) -> list[str]:
        c = self.config
        head = [str(self.row), str(c.n_inputs), str(c.epochs), repr(c.learning_rate),
                "yes" if c.use_autoencoder else "no"]
        if self.failure is not None:
            return head + ["", "", "", "failed"]
        val = "" if self.validation is None else f"{self.validation.accuracy * 100:.2f}"
        return head + [f"{self.final_error:.4f}", f"{self.performance:.2f}", val,
                       "yes" if self.stable else "no"]


def run_experiment_grid(train_data, validation_data, grid, normalizer=None) -> list[ExperimentResult]:
    """Run every config with seed ``config.seed + row index``; a failing row is
    recorded and the grid carries on."""
    if not grid:
        raise ValueError("experiment grid is empty")
    results = []
    for i, config in enumerate(grid):
        row = i + 1
        try:
            cfg = replace(config, seed=config.seed + i)
            out = run_pipeline(train_data, validation_data, cfg, normalizer)
            res = ExperimentResult(row, config, out.trace.final, out.validation,
                                   last_quartile_spread(out.trace))
            log.info("row %d: error %.4f", row, res.final_error)
        except Exception as exc:  # one bad row must not sink the grid
            log.warning("row %d failed: %s", row, exc)
            res = ExperimentResult(row, config, failure=str(exc))
        results.append(res)
    return results
