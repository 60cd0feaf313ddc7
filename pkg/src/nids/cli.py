"""Command-line interface: prepare, train, grid, eval, predict."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from nids import dataset as ds
from nids import modelfile
from nids.evaluation import REPORT_COLUMNS, metrics_from_predictions
from nids.pipeline import (
    RESULT_COLUMNS, TABLE1, ExperimentConfig, error_to_performance, run_experiment_grid,
    run_pipeline, score_batch,
)

log = logging.getLogger("nids")

SPLIT_FILES = ("train.csv", "validation.csv", "test.csv")
NORMALIZER_FILE = "normalizer.json"


class CliError(Exception):
    pass


def _write_lines(path, lines):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.writelines(line + "\n" for line in lines)


def write_trace(path, errors, first_column="epoch"):
    _write_lines(path, [f"{first_column},mse"] + [f"{i + 1},{e!r}" for i, e in enumerate(errors)])


def ae_trace_path(trace_path) -> Path:
    p = Path(trace_path)
    return p.with_name(p.stem + "_ae" + p.suffix)


# --- prepare -----------------------------------------------------------------

def cmd_prepare(args) -> int:
    table = ds.load_csv(args.input, args.label_column)
    X, y, dropped = ds.clean(table)
    spec = ds.SplitSpec.parse(args.split, seed=args.seed, stratified=not args.no_stratify)
    parts = ds.split(X, y, spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    names = table.feature_names
    for fname, (Xp, yp) in zip(SPLIT_FILES, parts):
        ds.write_split_csv(out / fname, names, Xp, yp, args.label_column)
    ds.fit_normalizer(parts[0][0], names).save(out / NORMALIZER_FILE)
    print(f"rows read {len(table.rows)}, dropped {dropped}, kept {len(y)}")
    for fname, (_, yp) in zip(SPLIT_FILES, parts):
        print(f"{fname}: {len(yp)} rows, {int(np.sum(yp))} attacks")
    return 0


# --- train / grid ------------------------------------------------------------

def _load_prepared(data_dir, label_column):
    d = Path(data_dir)
    if not (d / "train.csv").is_file():
        raise CliError(f"{d} does not look like a prepared data directory (no train.csv)")
    train = ds.load_clean(d / "train.csv", label_column)
    val = None
    if (d / "validation.csv").is_file():
        Xv, yv, names_v, _ = ds.load_clean(d / "validation.csv", label_column)
        if names_v != train[2]:
            raise CliError("validation.csv columns differ from train.csv")
        val = (Xv, yv)
    norm = ds.Normalizer.load(d / NORMALIZER_FILE) if (d / NORMALIZER_FILE).is_file() else None
    if norm is not None and norm.n_features != train[0].shape[1]:
        raise CliError(f"normalizer has {norm.n_features} features, train.csv has {train[0].shape[1]}")
    return train, val, norm


def train_config(args, n_available: int) -> ExperimentConfig:
    return ExperimentConfig(
        n_inputs=args.n_inputs or n_available, epochs=args.epochs, learning_rate=args.lr,
        use_autoencoder=args.arch == "deep", ae_epochs=args.ae_epochs,
        encoder_dim=args.encoder_dim, seed=args.seed, ae_learning_rate=args.ae_lr,
    )


def cmd_train(args) -> int:
    (X, y, names, _), val, norm = _load_prepared(args.data, args.label_column)
    config = train_config(args, len(y))
    out = run_pipeline((X, y), val, config, norm)
    model = out.model
    model.normalizer.columns = names
    model.provenance = {
        "seed": args.seed, "arch": args.arch, "epochs": args.epochs, "lr": args.lr,
        "n_inputs": min(config.n_inputs, len(y)),
        "dataset_sha256": modelfile.file_sha256(Path(args.data) / "train.csv"),
    }
    if args.arch == "deep":
        model.provenance.update(ae_epochs=args.ae_epochs, ae_lr=args.ae_lr, encoder_dim=args.encoder_dim)
    modelfile.save_model(model, args.model_out)
    if args.trace_out:
        write_trace(args.trace_out, out.trace.errors)
        if out.ae_trace is not None:
            write_trace(ae_trace_path(args.trace_out), out.ae_trace.errors, "ae_epoch")
    err = out.trace.final
    print(f"architecture {' -> '.join(map(str, model.chain))}")
    print(f"final error {err:.4f}, performance {error_to_performance(err):.2f}%")
    if out.ae_trace is not None:
        print(f"autoencoder reconstruction error {out.ae_trace.errors[0]:.4f} -> {out.ae_trace.final:.4f}")
    if out.validation is not None:
        print(f"validation accuracy {out.validation.accuracy * 100:.2f}%")
    return 0


def _truthy(text: str) -> bool:
    t = text.strip().lower()
    if t in ("yes", "true", "1", "y"):
        return True
    if t in ("no", "false", "0", "n", ""):
        return False
    raise CliError(f"cannot read {text!r} as yes/no")


def read_grid(path) -> list[ExperimentConfig]:
    """Grid CSV with header ``n_inputs,epochs,lr,autoencoder`` and optional
    ``ae_epochs,encoder_dim,seed`` columns."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.DictReader(fh) if any((v or "").strip() for v in r.values())]
    grid = []
    for i, r in enumerate(rows):
        try:
            extra = {}
            if (r.get("ae_epochs") or "").strip():
                extra["ae_epochs"] = int(r["ae_epochs"])
            if (r.get("encoder_dim") or "").strip():
                extra["encoder_dim"] = int(r["encoder_dim"])
            if (r.get("seed") or "").strip():
                extra["seed"] = int(r["seed"])
            grid.append(ExperimentConfig(int(r["n_inputs"]), int(r["epochs"]), float(r["lr"]),
                                         _truthy(r["autoencoder"]), **extra))
        except (KeyError, TypeError, ValueError) as exc:
            raise CliError(f"grid row {i + 1}: {exc}") from None
    return grid


def cmd_grid(args) -> int:
    if args.preset:
        grid = [replace(c, seed=args.seed) for c in TABLE1]
    else:
        grid = read_grid(args.grid)
    if not grid:
        raise CliError("experiment grid is empty")
    (X, y, _, _), val, norm = _load_prepared(args.data, args.label_column)
    results = run_experiment_grid((X, y), val, grid, norm)
    _write_lines(args.out, [",".join(RESULT_COLUMNS)] + [",".join(r.csv_cells()) for r in results])
    for r in results:
        if r.failure:
            print(f"row {r.row}: failed: {r.failure}", file=sys.stderr)
        else:
            print(f"row {r.row}: error {r.final_error:.4f}, performance {r.performance:.2f}%, "
                  f"{'stable' if r.stable else 'unstable'}")
    return 0 if any(r.failure is None for r in results) else 1


# --- eval / predict ----------------------------------------------------------

def _load_model(path):
    try:
        return modelfile.load_model(path)
    except FileNotFoundError:
        raise CliError(f"no such model file: {path}") from None


def cmd_eval(args) -> int:
    model = _load_model(args.model)
    X, y, names, dropped = ds.load_clean(args.data, args.label_column)
    if X.shape[1] != model.n_features:
        raise CliError(f"{args.data} has {X.shape[1]} features, model expects {model.n_features}")
    if model.provenance.get("dataset_sha256") == modelfile.file_sha256(args.data):
        log.warning("evaluation data is the model's training file; metrics are not a holdout estimate")
    model.threshold = args.threshold
    _, pred = score_batch(model, X)
    metrics = metrics_from_predictions(pred, y)
    if args.report:
        _write_lines(args.report, [",".join(REPORT_COLUMNS), metrics.csv_row()])
    if dropped:
        print(f"({dropped} unusable rows skipped)")
    print(metrics.text())
    return 0


def _parse_row(cells, n, where):
    try:
        x = np.array([float(c) for c in cells], dtype=np.float64)
    except ValueError:
        raise CliError(f"{where}: unparseable feature value") from None
    if x.shape != (n,):
        raise CliError(f"{where}: {len(x)} values, model expects {n}")
    if not np.isfinite(x).all():
        raise CliError(f"{where}: NaN or infinite feature value")
    return x


def _read_predict_rows(path, model, label_column):
    with open(path, newline="", encoding="utf-8-sig") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        return np.empty((0, model.n_features))
    first = [c.strip() for c in rows[0]]
    drop = None
    try:
        [float(c) for c in first]
    except ValueError:
        drop = first.index(label_column) if label_column in first else None
        rows = rows[1:]
    out = []
    for i, r in enumerate(rows):
        cells = [c.strip() for j, c in enumerate(r) if j != drop]
        out.append(_parse_row(cells, model.n_features, f"row {i + 1}"))
    return np.asarray(out).reshape(len(out), model.n_features)


def cmd_predict(args) -> int:
    model = _load_model(args.model)
    if args.features is not None:
        X = _parse_row(args.features.split(","), model.n_features, "--features")[None, :]
    else:
        X = _read_predict_rows(args.input, model, args.label_column)
    if len(X):
        prob, label = score_batch(model, X)
        sys.stdout.write("".join(f"{float(p)!r},{int(c)}\n" for p, c in zip(prob, label)))
    return 0


# --- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nids", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--label-column", default="Label")

    sp = sub.add_parser("prepare", help="clean, split and fit the normalizer")
    sp.add_argument("--input", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--split", default="80/10/10")
    sp.add_argument("--no-stratify", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_prepare)

    sp = sub.add_parser("train", help="train a shallow or deep detector")
    sp.add_argument("--data", required=True)
    sp.add_argument("--arch", choices=("shallow", "deep"), default="shallow")
    sp.add_argument("--epochs", type=int, default=1000)
    sp.add_argument("--lr", type=float, default=0.1)
    sp.add_argument("--ae-epochs", type=int, default=1000)
    sp.add_argument("--ae-lr", type=float, default=0.1)
    sp.add_argument("--encoder-dim", type=int, default=19)
    sp.add_argument("--n-inputs", type=int, default=None,
                    help="train on a stratified subset of this many patterns")
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--model-out", required=True)
    sp.add_argument("--trace-out", default=None)
    common(sp)
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("grid", help="run an experiment grid")
    sp.add_argument("--data", required=True)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--preset", choices=("table1",))
    g.add_argument("--grid")
    sp.add_argument("--out", required=True)
    sp.add_argument("--seed", type=int, default=1)
    common(sp)
    sp.set_defaults(func=cmd_grid)

    sp = sub.add_parser("eval", help="sensitivity/specificity/accuracy on labelled data")
    sp.add_argument("--model", required=True)
    sp.add_argument("--data", required=True)
    sp.add_argument("--threshold", type=float, default=0.5)
    sp.add_argument("--report", default=None)
    common(sp)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("predict", help="print probability,label per row")
    sp.add_argument("--model", required=True)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--input")
    g.add_argument("--features")
    common(sp)
    sp.set_defaults(func=cmd_predict)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (CliError, ds.DatasetError, modelfile.ModelFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
