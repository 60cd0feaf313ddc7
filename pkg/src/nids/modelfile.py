"""Versioned text model file.

The file is JSON, one matrix row per line so the weight blocks can be read
and diffed by eye. Every float is written with 17 significant digits, which
round-trips binary64 exactly, so save -> load -> save is byte-identical.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from nids.autoencoder import AutoencoderModel
from nids.dataset import Normalizer
from nids.neuralnet import MlpModel
from nids.pipeline import DeepModel

FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    pass


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


# --- writing ---------------------------------------------------------------

def _num(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if not np.isfinite(v):
        raise ModelFormatError(f"refusing to serialize non-finite value {v}")
    return format(v, ".17g")


def _is_numeric_list(x) -> bool:
    return isinstance(x, list) and all(
        isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in x
    )


def _emit(obj, indent: int = 0) -> str:
    pad = " " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_emit(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + " " * indent + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if _is_numeric_list(obj):
        return "[" + ", ".join(_num(v) for v in obj) + "]"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + _emit(v, indent + 1) for v in obj) + "\n" + " " * indent + "]"
    if isinstance(obj, (float, int, np.floating, np.integer)) and not isinstance(obj, bool):
        return _num(obj)
    return json.dumps(obj)


def _mlp_block(net: MlpModel) -> dict:
    return {
        "layer_sizes": list(net.layer_sizes),
        "beta": net.beta,
        "layers": [{"weights": w, "bias": b} for w, b in zip(net.weights, net.biases)],
    }


def to_document(model: DeepModel) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": model.kind,
        "threshold": model.threshold,
        "provenance": dict(model.provenance),
        "normalizer": model.normalizer.to_dict(),
    }
    if model.encoder is not None:
        doc["autoencoder"] = _mlp_block(model.encoder.net)
    doc["classifier"] = _mlp_block(model.classifier)
    return doc


def dumps(model: DeepModel) -> str:
    return _emit(to_document(model)) + "\n"


def save_model(model: DeepModel, path) -> Path:
    path = Path(path)
    text = dumps(model)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
    return path


# --- reading ---------------------------------------------------------------

def _need(doc: dict, key: str, where: str):
    if key not in doc:
        raise ModelFormatError(f"{where}: missing field {key!r}")
    return doc[key]


def _mlp_from_block(block: dict, where: str) -> MlpModel:
    sizes = [int(s) for s in _need(block, "layer_sizes", where)]
    layers = _need(block, "layers", where)
    if len(sizes) < 2 or len(layers) != len(sizes) - 1:
        raise ModelFormatError(f"{where}: {len(layers)} layer blocks for layer_sizes {sizes}")
    weights, biases = [], []
    for k, layer in enumerate(layers):
        name = f"{where}.layers[{k}]"
        try:
            w = np.asarray(_need(layer, "weights", name), dtype=np.float64)
            b = np.asarray(_need(layer, "bias", name), dtype=np.float64)
        except ValueError as exc:
            raise ModelFormatError(f"{name}: ragged or non-numeric values ({exc})") from None
        if w.ndim != 2 or w.shape[0] != sizes[k]:
            raise ModelFormatError(f"{name}.weights: expected {sizes[k]} rows, got {w.shape[0] if w.ndim else 0}")
        if w.shape[1] != sizes[k + 1]:
            raise ModelFormatError(f"{name}.weights: expected {sizes[k + 1]} columns, got {w.shape[1]}")
        if b.shape != (sizes[k + 1],):
            raise ModelFormatError(f"{name}.bias: expected length {sizes[k + 1]}, got {b.shape}")
        weights.append(w)
        biases.append(b)
    beta = float(_need(block, "beta", where))
    if not beta > 0:
        raise ModelFormatError(f"{where}.beta must be positive")
    return MlpModel.from_arrays(weights, biases, beta)


def from_document(doc: dict) -> DeepModel:
    if not isinstance(doc, dict):
        raise ModelFormatError("model file is not a JSON object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported version {version!r} (this build reads {FORMAT_VERSION})")
    kind = _need(doc, "kind", "model")
    if kind not in ("shallow", "deep"):
        raise ModelFormatError(f"unknown model kind {kind!r}")
    try:
        norm = Normalizer.from_dict(_need(doc, "normalizer", "model"))
    except (KeyError, ValueError) as exc:
        raise ModelFormatError(f"normalizer: {exc}") from None
    encoder = None
    if kind == "deep":
        net = _mlp_from_block(_need(doc, "autoencoder", "model"), "autoencoder")
        try:
            encoder = AutoencoderModel(net)
        except ValueError as exc:
            raise ModelFormatError(f"autoencoder: {exc}") from None
    elif "autoencoder" in doc:
        raise ModelFormatError("shallow model must not carry an autoencoder block")
    clf = _mlp_from_block(_need(doc, "classifier", "model"), "classifier")
    try:
        return DeepModel(norm, clf, encoder, float(_need(doc, "threshold", "model")),
                         dict(doc.get("provenance", {})))
    except ValueError as exc:
        raise ModelFormatError(f"classifier: {exc}") from None


def loads(text: str) -> DeepModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"truncated or corrupt model file ({exc})") from None
    return from_document(doc)


def load_model(path) -> DeepModel:
    return loads(Path(path).read_text())
