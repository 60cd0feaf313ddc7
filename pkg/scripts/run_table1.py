"""Run the nine-row preset grid on a flow table and write the results CSV.

    python3 scripts/run_table1.py [--data data/cicids2017_synth.csv] [--out results/table1.csv]
"""
import argparse
import csv
import logging
from pathlib import Path

from nids.experiments import BUNDLED_SAMPLE, SPLIT_SEED, load_desk_data
from nids.pipeline import RESULT_COLUMNS, TABLE1, run_experiment_grid

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--data", default=BUNDLED_SAMPLE)
    ap.add_argument("--split-seed", type=int, default=SPLIT_SEED)
    ap.add_argument("--out", default=ROOT / "results" / "table1.csv")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    data = load_desk_data(args.data, args.split_seed)
    results = run_experiment_grid(data.train, data.validation, TABLE1, data.normalizer)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_COLUMNS)
        for r in results:
            w.writerow(r.csv_cells())
    for r in results:
        print(",".join(r.csv_cells()))


if __name__ == "__main__":
    main()
