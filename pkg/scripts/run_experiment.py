"""Run the full pipeline on a seeded synthetic corpus and print a summary.

Usage:
    python3 scripts/run_experiment.py [--out out] [--seed 42] [--config c.json]
"""

import argparse
import csv
import json
import os
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from burnout_pipeline import cli  # noqa: E402


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="out")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--config", default=None)
    args = parser.parse_args()

    argv = ["all", "--out", args.out, "--emit-sentences"]
    if args.seed is not None:
        argv += ["--seed", str(args.seed)]
    if args.config:
        argv += ["--config", args.config]

    t0 = time.time()
    rc = cli.main(argv)
    if rc != 0:
        print(f"pipeline failed with exit code {rc}")
        return rc
    elapsed = time.time() - t0

    out = args.out
    with open(os.path.join(out, "labels.csv"), newline="") as fh:
        labels = list(csv.DictReader(fh))
    flagged = sum(r["silver_label"] == "1" for r in labels)
    with open(os.path.join(out, "eval.json")) as fh:
        ev = json.load(fh)
    print(f"\ncompleted in {elapsed:.1f}s")
    print(f"providers: {len(labels)}, flagged: {flagged} "
          f"({flagged / len(labels):.1%})")
    print(f"held-out vs silver labels: precision={ev['precision']:.3f} "
          f"recall={ev['recall']:.3f} f1={ev['f1']:.3f}")
    truth_path = os.path.join(out, "eval_truth.json")
    if os.path.exists(truth_path):
        with open(truth_path) as fh:
            tv = json.load(fh)
        print(f"held-out vs planted truth:  precision={tv['precision']:.3f} "
              f"recall={tv['recall']:.3f} f1={tv['f1']:.3f}")
    with open(os.path.join(out, "sentiment_distribution.csv"), newline="") as fh:
        for row in csv.DictReader(fh):
            print(f"  {row['label']:>8}: {float(row['fraction']):.1%} of notes")
    return 0


if __name__ == "__main__":
    sys.exit(main())
