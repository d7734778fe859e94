"""Compare the baseline lexicon scorer with the transformer sidecar.

Runs the pipeline twice on the same synthetic corpus (baseline scores, then
sidecar scores fed back through the external-scores interface) and prints
flag-rate and truth-evaluation deltas. Requires the sidecar package.

Usage:
    python3 scripts/compare_scorers.py [--workdir cmp] [--seed 42]
"""

import argparse
import csv
import json
import os
import subprocess
import sys

PIPELINE = [sys.executable, "-m", "burnout_pipeline.cli"]
SIDECAR = [sys.executable, "-m", "scorer_sidecar.cli"]


def run(args):
    proc = subprocess.run(args, text=True)
    if proc.returncode != 0:
        sys.exit(proc.returncode)


def summarize(out, tag):
    with open(os.path.join(out, "labels.csv"), newline="") as fh:
        labels = list(csv.DictReader(fh))
    flagged = sum(r["silver_label"] == "1" for r in labels)
    line = f"{tag:>12}: flagged {flagged}/{len(labels)}"
    truth = os.path.join(out, "eval_truth.json")
    if os.path.exists(truth):
        with open(truth) as fh:
            tv = json.load(fh)
        line += f", truth F1 {tv['f1']:.3f}"
    print(line)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--workdir", default="cmp")
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    base = os.path.join(args.workdir, "baseline")
    seed = ["--seed", str(args.seed)]
    run(PIPELINE + ["all", "--out", base, "--emit-sentences"] + seed)
    summarize(base, "baseline")

    scores = os.path.join(args.workdir, "sidecar_scores.jsonl")
    run(SIDECAR + [os.path.join(base, "notes.jsonl"),
                   os.path.join(base, "sentences.jsonl"),
                   "--out", scores, "--batch-size", "128"])

    side = os.path.join(args.workdir, "sidecar")
    run(PIPELINE + ["all", "--out", side, "--scores", scores] + seed)
    summarize(side, "sidecar")
    return 0


if __name__ == "__main__":
    sys.exit(main())
