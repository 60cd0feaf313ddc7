"""Write the bundled simulated flow table used by the desk-scale experiments.

    python3 scripts/make_sample.py [--rows 8000] [--seed 2017] [--out data/cicids2017_synth.csv]
"""
import argparse
from pathlib import Path

from nids import flowsim

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=8000)
    ap.add_argument("--seed", type=int, default=2017)
    ap.add_argument("--attack-fraction", type=float, default=0.5)
    ap.add_argument("--out", default=ROOT / "data" / "cicids2017_synth.csv")
    args = ap.parse_args()
    rows, labels = flowsim.generate(args.rows, args.seed, args.attack_fraction)
    path = flowsim.write_csv(args.out, rows, labels)
    n_attack = sum(lab != "BENIGN" for lab in labels)
    print(f"wrote {path}: {len(rows)} flows, {n_attack} attacks")


if __name__ == "__main__":
    main()
