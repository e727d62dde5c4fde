#!/usr/bin/env python3
"""Run all four figure presets and drop their CSVs under one directory.

Usage:
    python scripts/run_figures.py --out results [--trials 200] [--seed 0] [--threads 8]
"""

import argparse
import os
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from d2dcoop import PRESET_NAMES, preset_config, run_experiment, write_outputs


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="results")
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=None)
    ap.add_argument("--json", action="store_true", help="also write JSON mirrors")
    args = ap.parse_args()

    for name in PRESET_NAMES:
        config = preset_config(name, num_trials=args.trials, master_seed=args.seed)
        started = time.time()
        records, summaries = run_experiment(config, threads=args.threads)
        out_dir = os.path.join(args.out, name)
        write_outputs(out_dir, config, records, summaries, json_mirror=args.json)
        failed = sum(s.num_failed for s in summaries)
        print(
            f"{name}: {len(summaries)} grid points x {args.trials} trials "
            f"in {time.time() - started:.1f}s ({failed} failed trials) -> {out_dir}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
