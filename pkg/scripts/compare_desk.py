"""Matched-budget shallow vs deep comparison over several seeds.

Prints per-seed validation accuracy, final training error, stability spreads
and autoencoder reconstruction errors.

    python3 scripts/compare_desk.py [--seeds 1 2 3] [--epochs 1000] [--ae-epochs 1000]
"""
import argparse

from nids.experiments import BUNDLED_SAMPLE, compare, load_desk_data


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--data", default=BUNDLED_SAMPLE)
    ap.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--n-inputs", type=int, default=6000)
    ap.add_argument("--epochs", type=int, default=1000)
    ap.add_argument("--ae-epochs", type=int, default=1000)
    ap.add_argument("--short-epochs", type=int, default=300)
    ap.add_argument("--lr", type=float, default=0.1)
    args = ap.parse_args()

    data = load_desk_data(args.data)
    print(f"train {len(data.train[1])}, validation {len(data.validation[1])}, "
          f"test {len(data.test[1])}, dropped {data.dropped}")
    c = compare(data, args.seeds, n_inputs=args.n_inputs, epochs=args.epochs,
                ae_epochs=args.ae_epochs, lr=args.lr, short_epochs=args.short_epochs)
    rows = c.rows()
    keys = list(rows[0])
    print(",".join(keys))
    for row in rows:
        print(",".join("" if v is None else (str(v) if isinstance(v, int) else f"{v:.5f}") for v in row.values()))
    print(f"median validation accuracy: shallow {c.median_shallow_accuracy:.4f}, deep {c.median_deep_accuracy:.4f}")
    print(f"elapsed {c.elapsed:.0f}s")


if __name__ == "__main__":
    main()
