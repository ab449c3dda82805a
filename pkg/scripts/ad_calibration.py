"""Empirical size of the Anderson-Darling test on seeded normal samples.

Counts p > 0.05 in consecutive blocks of 100 seeds and compares the block
distribution with Binomial(100, 0.95).

    python scripts/ad_calibration.py --blocks 20 --n 5000
"""

import argparse

import numpy as np
from scipy import stats

from biovit.stats import anderson_darling
from biovit.synth import gaussians


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--blocks", type=int, default=20)
    ap.add_argument("--n", type=int, default=5000)
    args = ap.parse_args()

    seeds = np.arange(100 * args.blocks)
    kept = np.array([anderson_darling(gaussians(int(s), args.n)).p_value > 0.05 for s in seeds])
    per_block = kept.reshape(args.blocks, 100).sum(axis=1)
    print(f"overall rate {kept.mean():.4f} over {kept.size} samples of n={args.n}")
    print("per block of 100:", " ".join(map(str, per_block)))
    print(f"blocks with >= 95: {(per_block >= 95).sum()}/{args.blocks}; "
          f"Binomial(100, 0.95) gives P(X >= 95) = {stats.binom.sf(94, 100, 0.95):.3f}")


if __name__ == "__main__":
    main()
