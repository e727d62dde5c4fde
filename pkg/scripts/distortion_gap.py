#!/usr/bin/env python3
"""Audit the quantization-cell distortion approximation 2^(-b/(P-1)).

Prints, per (P, b), the closed-form approximation next to two measured
statistics: the cell distortion of the codebook used as a nearest-match
quantizer of the channel eigenbasis, and the (pairing-resolved)
distortion of the codeword the average-SNR selector actually picks. The
second sits above the first because SNR selection is not a
minimum-distortion quantizer; the printed ratios quantify that gap.

Usage:
    python scripts/distortion_gap.py [--users 2 3] [--bits 4 6 8 10] [--trials 300]
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

import numpy as np

from d2dcoop import (
    empirical_cell_distortion,
    empirical_quantization_cell_distortion,
    expected_cell_distortion,
    generate_codebook,
)


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--users", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--bits", type=int, nargs="+", default=[4, 6, 8, 10])
    ap.add_argument("--trials", type=int, default=300)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'P':>3} {'b':>3} {'approx':>10} {'cell':>10} {'ratio':>6} {'selected':>10} {'ratio':>6}")
    for users in args.users:
        rng = np.random.default_rng([args.seed, users])
        codebook = generate_codebook(users, max(args.bits), rng)
        for bits in sorted(args.bits):
            approx = expected_cell_distortion(bits, users)
            prefix = codebook.prefix(bits)
            cell = empirical_quantization_cell_distortion(
                users, bits, args.trials, np.random.default_rng([args.seed, users, bits, 1]),
                codebook=prefix,
            )
            selected = empirical_cell_distortion(
                users, bits, args.trials, np.random.default_rng([args.seed, users, bits, 2]),
                codebook=prefix,
            )
            print(
                f"{users:>3} {bits:>3} {approx:>10.5f} {cell:>10.5f} {cell / approx:>6.2f}"
                f" {selected:>10.5f} {selected / approx:>6.2f}"
            )
    return 0


if __name__ == "__main__":
    sys.exit(main())
