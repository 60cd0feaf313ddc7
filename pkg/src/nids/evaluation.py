"""Confusion counts, sensitivity, specificity and accuracy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

REPORT_COLUMNS = ("total", "tp", "tn", "fp", "fn", "sensitivity", "specificity", "accuracy")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise ValueError(f"negative count in {self}")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


@dataclass(frozen=True)
class Metrics:
    sensitivity: float
    specificity: float
    accuracy: float
    matrix: ConfusionMatrix
    # set when the denominator was zero and the value defaulted to 1
    sensitivity_degenerate: bool = False
    specificity_degenerate: bool = False

    def csv_row(self) -> str:
        m = self.matrix
        return (f"{m.total},{m.tp},{m.tn},{m.fp},{m.fn},"
                f"{self.sensitivity:.4f},{self.specificity:.4f},{self.accuracy:.4f}")

    def text(self) -> str:
        m = self.matrix
        lines = [
            f"Total patterns   {m.total}",
            f"Well-classified  {m.tp + m.tn}",
            f"True positives   {m.tp}",
            f"True negatives   {m.tn}",
            f"False positives  {m.fp}",
            f"False negatives  {m.fn}",
            f"Sensitivity      {self.sensitivity:.4f}" + (" (no attacks present)" if self.sensitivity_degenerate else ""),
            f"Specificity      {self.specificity:.4f}" + (" (no benign present)" if self.specificity_degenerate else ""),
            f"Accuracy         {self.accuracy:.4f}",
        ]
        return "\n".join(lines)


def confusion(predictions, targets) -> ConfusionMatrix:
    p = np.asarray(predictions).astype(bool)
    t = np.asarray(targets).astype(bool)
    if p.shape != t.shape:
        raise ValueError(f"length mismatch: {p.shape} predictions vs {t.shape} targets")
    if p.size == 0:
        raise ValueError("nothing to evaluate")
    return ConfusionMatrix(
        tp=int(np.sum(p & t)),
        tn=int(np.sum(~p & ~t)),
        fp=int(np.sum(p & ~t)),
        fn=int(np.sum(~p & t)),
    )


def compute_metrics(matrix: ConfusionMatrix) -> Metrics:
    # integer numerators/denominators: a single correctly-rounded division each
    pos = matrix.tp + matrix.fn
    neg = matrix.tn + matrix.fp
    if matrix.total < 1:
        raise ValueError("empty confusion matrix")
    return Metrics(
        sensitivity=matrix.tp / pos if pos else 1.0,
        specificity=matrix.tn / neg if neg else 1.0,
        accuracy=(matrix.tp + matrix.tn) / matrix.total,
        matrix=matrix,
        sensitivity_degenerate=pos == 0,
        specificity_degenerate=neg == 0,
    )


def metrics_from_predictions(predictions, targets) -> Metrics:
    return compute_metrics(confusion(predictions, targets))


def evaluate(model, features, labels) -> Metrics:
    """Score raw (unnormalized) rows end to end and tally the results."""
    from nids.pipeline import score_batch

    _, predicted = score_batch(model, features)
    return metrics_from_predictions(predicted, labels)
