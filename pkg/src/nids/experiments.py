"""Desk-scale experiments: matched-budget shallow vs deep runs on a flow table.

Shared by the acceptance suite and the scripts in ``scripts/`` so both report
the same numbers for the same seeds.
"""
from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path

from .dataset import Normalizer, SplitSpec, fit_normalizer, load_clean, split
from .pipeline import ExperimentConfig, TrainedPipeline, last_quartile_spread, train_deep, train_shallow

BUNDLED_SAMPLE = Path(__file__).resolve().parents[2] / "data" / "cicids2017_synth.csv"
SPLIT_SEED = 2017
DESK_SEEDS = (1, 2, 3)


@dataclass
class DeskData:
    train: tuple
    validation: tuple
    test: tuple
    normalizer: Normalizer
    dropped: int


def load_desk_data(path=BUNDLED_SAMPLE, split_seed: int = SPLIT_SEED) -> DeskData:
    """Clean, split 80/10/10 and fit the normalizer on the training part only."""
    X, y, names, dropped = load_clean(path)
    train, val, test = split(X, y, SplitSpec(seed=split_seed))
    return DeskData(train, val, test, fit_normalizer(train[0], names), dropped)


@dataclass
class MatchedRun:
    """One seed of the matched-budget comparison."""
    seed: int
    shallow: TrainedPipeline
    deep: TrainedPipeline
    shallow_short: TrainedPipeline | None = None

    @property
    def shallow_accuracy(self) -> float:
        return self.shallow.validation.accuracy

    @property
    def deep_accuracy(self) -> float:
        return self.deep.validation.accuracy


def matched_run(data: DeskData, seed: int, n_inputs: int = 6000, epochs: int = 1000,
                ae_epochs: int = 1000, lr: float = 0.1, short_epochs: int | None = 300) -> MatchedRun:
    """Shallow and deep pipelines with the same subset, seed and classifier budget.

    ``short_epochs`` adds a second shallow run with a reduced budget, used for
    the stability comparison.
    """
    shallow = train_shallow(data.train, data.validation,
                            ExperimentConfig(n_inputs, epochs, lr, seed=seed), data.normalizer)
    deep = train_deep(data.train, data.validation,
                      ExperimentConfig(n_inputs, epochs, lr, True, ae_epochs=ae_epochs, seed=seed),
                      data.normalizer)
    short = None
    if short_epochs:
        short = train_shallow(data.train, data.validation,
                              ExperimentConfig(n_inputs, short_epochs, lr, seed=seed), data.normalizer)
    return MatchedRun(seed, shallow, deep, short)


@dataclass
class Comparison:
    runs: list[MatchedRun] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def median_shallow_accuracy(self) -> float:
        return statistics.median(r.shallow_accuracy for r in self.runs)

    @property
    def median_deep_accuracy(self) -> float:
        return statistics.median(r.deep_accuracy for r in self.runs)

    def rows(self) -> list[dict]:
        out = []
        for r in self.runs:
            out.append({
                "seed": r.seed,
                "shallow_error": r.shallow.trace.final,
                "shallow_val_acc": r.shallow_accuracy,
                "deep_error": r.deep.trace.final,
                "deep_val_acc": r.deep_accuracy,
                "ae_first": r.deep.ae_trace.errors[0],
                "ae_final": r.deep.ae_trace.final,
                "deep_spread": last_quartile_spread(r.deep.trace),
                "shallow_short_spread": (None if r.shallow_short is None
                                         else last_quartile_spread(r.shallow_short.trace)),
            })
        return out


def compare(data: DeskData, seeds=DESK_SEEDS, **kwargs) -> Comparison:
    start = time.perf_counter()
    runs = [matched_run(data, s, **kwargs) for s in seeds]
    return Comparison(runs, time.perf_counter() - start)
