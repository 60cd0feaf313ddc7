"""CSV ingestion, cleaning, min-max normalization and seeded splits.

Feature matrices are plain ``float64`` arrays of shape (patterns, features);
label vectors are ``int8`` arrays of 0 (benign) / 1 (attack).
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

BENIGN_LABEL = "BENIGN"


class DatasetError(ValueError):
    pass


@dataclass
class RawTable:
    column_names: list[str]
    rows: list[list[str]]
    label_column: str

    @property
    def label_index(self) -> int:
        return self.column_names.index(self.label_column)

    @property
    def feature_names(self) -> list[str]:
        return [c for c in self.column_names if c != self.label_column]


def load_csv(path, label_column: str = "Label") -> RawTable:
    """Read a header-first, comma-delimited file without any type coercion.

    Header names and cells are whitespace-trimmed (CICIDS2017 headers carry
    leading blanks) and a UTF-8 byte-order mark is ignored.
    """
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DatasetError(f"{path} is empty; expected a header row") from None
        if label_column not in header:
            raise DatasetError(f"label column {label_column!r} not found in header of {path}")
        rows = []
        for i, row in enumerate(reader):
            if not row:
                continue
            if len(row) != len(header):
                raise DatasetError(
                    f"row {i} has {len(row)} cells, header has {len(header)} ({path})"
                )
            rows.append([c.strip() for c in row])
    return RawTable(header, rows, label_column)


def _parse(cell: str) -> float | None:
    try:
        v = float(cell)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def clean(table: RawTable) -> tuple[np.ndarray, np.ndarray, int]:
    """Drop rows with any empty, non-numeric, NaN or infinite feature cell.

    Returns (features, labels, dropped_count). A label of ``BENIGN`` (any case)
    is 0, every other label is 1.
    """
    li = table.label_index
    feats, labels = [], []
    dropped = 0
    for row in table.rows:
        values = [_parse(c) for j, c in enumerate(row) if j != li]
        label = row[li].strip()
        if not label or any(v is None for v in values):
            dropped += 1
            continue
        feats.append(values)
        labels.append(0 if label.upper() == BENIGN_LABEL else 1)
    if not feats:
        raise DatasetError(f"no rows survived cleaning ({dropped} dropped)")
    X = np.asarray(feats, dtype=np.float64).reshape(len(feats), len(table.column_names) - 1)
    return X, np.asarray(labels, dtype=np.int8), dropped


@dataclass
class Normalizer:
    mins: np.ndarray
    maxs: np.ndarray
    columns: list[str] | None = None

    def __post_init__(self):
        self.mins = np.asarray(self.mins, dtype=np.float64)
        self.maxs = np.asarray(self.maxs, dtype=np.float64)
        if self.mins.shape != self.maxs.shape or self.mins.ndim != 1:
            raise DatasetError("normalizer min/max vectors must be 1-D and equally long")
        if np.any(self.mins > self.maxs):
            raise DatasetError("normalizer has a column with min > max")

    @property
    def n_features(self) -> int:
        return len(self.mins)

    def to_dict(self) -> dict:
        return {
            "n_features": self.n_features,
            "columns": self.columns,
            "min": [float(v) for v in self.mins],
            "max": [float(v) for v in self.maxs],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Normalizer":
        norm = cls(d["min"], d["max"], d.get("columns"))
        if norm.n_features != d["n_features"]:
            raise DatasetError(
                f"normalizer declares {d['n_features']} features but stores {norm.n_features}"
            )
        return norm

    def save(self, path):
        body = {"format_version": 1, **self.to_dict()}
        Path(path).write_text(json.dumps(body, indent=1) + "\n")

    @classmethod
    def load(cls, path) -> "Normalizer":
        body = json.loads(Path(path).read_text())
        if body.get("format_version") != 1:
            raise DatasetError(f"unsupported normalizer version {body.get('format_version')!r}")
        return cls.from_dict(body)


def fit_normalizer(features, columns=None) -> Normalizer:
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise DatasetError("cannot fit a normalizer on an empty matrix")
    return Normalizer(X.min(axis=0), X.max(axis=0), columns)


def apply_normalizer(norm: Normalizer, features) -> np.ndarray:
    """Min-max scale each column; constant columns map to 0 and values
    outside the fitted range are clamped to [0, 1]."""
    X = np.asarray(features, dtype=np.float64)
    if X.shape[-1] != norm.n_features:
        raise DatasetError(f"data has {X.shape[-1]} features, normalizer expects {norm.n_features}")
    span = norm.maxs - norm.mins
    live = span > 0
    out = np.zeros_like(X)
    out[..., live] = (X[..., live] - norm.mins[live]) / span[live]
    return np.clip(out, 0.0, 1.0)


@dataclass
class SplitSpec:
    train_fraction: float = 0.8
    validation_fraction: float = 0.1
    test_fraction: float = 0.1
    seed: int = 1
    stratified: bool = True

    def __post_init__(self):
        fr = (self.train_fraction, self.validation_fraction, self.test_fraction)
        if any(f < 0 for f in fr) or abs(sum(fr) - 1.0) > 1e-9:
            raise DatasetError(f"split fractions must be non-negative and sum to 1, got {fr}")

    @classmethod
    def parse(cls, text: str, seed: int = 1, stratified: bool = True) -> "SplitSpec":
        """Parse ``"80/10/10"`` (percent or fractions, any positive scale)."""
        parts = [float(p) for p in text.split("/")]
        if len(parts) != 3 or any(p < 0 for p in parts) or sum(parts) <= 0:
            raise DatasetError(f"split must look like A/B/C, got {text!r}")
        total = sum(parts)
        tr, va = parts[0] / total, parts[1] / total
        return cls(tr, va, 1.0 - tr - va, seed, stratified)


def split_indices(labels, spec: SplitSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Seeded partition of ``range(len(labels))`` into train/validation/test.

    Part sizes are rounded from the fractions over the whole set. With
    stratification, each class is shuffled on its own, every member gets a
    rank position ``(i + 0.5) / n_class`` and the classes are merged by that
    position, so any prefix of the merged order has near-whole class balance.
    """
    y = np.asarray(labels)
    n = len(y)
    if n < 10:
        raise DatasetError(f"need at least 10 patterns to split, got {n}")
    rng = np.random.default_rng(spec.seed)
    n_train = int(round(n * spec.train_fraction))
    n_val = int(round(n * spec.validation_fraction))
    n_val = min(n_val, n - n_train)

    if spec.stratified:
        pos, order = [], []
        for c in np.unique(y):
            members = rng.permutation(np.flatnonzero(y == c))
            order.append(members)
            pos.append((np.arange(len(members)) + 0.5) / len(members))
        order = np.concatenate(order)
        pos = np.concatenate(pos)
        tiebreak = rng.random(n)
        order = order[np.lexsort((tiebreak, pos))]
    else:
        order = rng.permutation(n)

    parts = order[:n_train], order[n_train : n_train + n_val], order[n_train + n_val :]
    classes = np.unique(y)
    for name, idx in zip(("train", "validation", "test"), parts):
        if len(idx) and len(np.unique(y[idx])) < len(classes):
            warnings.warn(f"{name} split is missing a class", stacklevel=2)
    return parts


def split(features, labels, spec: SplitSpec):
    """Return [(X_train, y_train), (X_val, y_val), (X_test, y_test)]."""
    X = np.asarray(features)
    y = np.asarray(labels)
    if len(X) != len(y):
        raise DatasetError(f"{len(X)} feature rows but {len(y)} labels")
    return [(X[idx], y[idx]) for idx in split_indices(y, spec)]


def subsample(features, labels, n: int, seed: int):
    """Stratified seeded subset of ``n`` patterns (everything if n >= size)."""
    if n >= len(labels):
        return np.asarray(features), np.asarray(labels)
    frac = n / len(labels)
    idx, _, _ = split_indices(labels, SplitSpec(frac, 1.0 - frac, 0.0, seed))
    idx = np.sort(idx)
    return np.asarray(features)[idx], np.asarray(labels)[idx]


def write_split_csv(path, columns: list[str], features, labels, label_column="Label"):
    """Write cleaned raw features with ``BENIGN``/``ATTACK`` label text."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(columns) + [label_column])
        for row, lab in zip(np.asarray(features), np.asarray(labels)):
            w.writerow([repr(float(v)) for v in row] + [BENIGN_LABEL if lab == 0 else "ATTACK"])


def load_clean(path, label_column="Label"):
    """load_csv + clean; returns (features, labels, feature_names, dropped)."""
    table = load_csv(path, label_column)
    X, y, dropped = clean(table)
    return X, y, table.feature_names, dropped
