#!/usr/bin/env python3
"""Monte Carlo check of the discounted-sum tail bound across a (c, delta) grid."""

import argparse
import math
import time

from repfreq.concentration import FiniteDist, min_horizon, tail_probability_mc

DISTS = {
    "plus1(0.25)/minus1": FiniteDist.from_pairs([(1.0, 0.25), (-1.0, 0.75)]),
    "plus1(0.2)/minus2": FiniteDist.from_pairs([(1.0, 0.2), (-2.0, 0.8)]),
}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reps", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=61)
    args = parser.parse_args()

    print(f"{'dist':>20} {'c':>5} {'delta':>7} {'bound':>10} {'empirical':>10} {'3*se':>9} ok")
    for label, dist in DISTS.items():
        for c in (0.5, 1.0, 2.0, 4.0):
            for delta in (0.9, 0.99, 0.999):
                t0 = time.time()
                rep = tail_probability_mc(
                    dist, delta, c, min_horizon(dist, delta, c), args.reps, args.seed
                )
                ok = rep.empirical <= rep.analytic_bound + 3 * rep.std_error
                print(
                    f"{label:>20} {c:5.1f} {delta:7.3f} {rep.analytic_bound:10.5f} "
                    f"{rep.empirical:10.5f} {3 * rep.std_error:9.5f} {'yes' if ok else 'NO'}"
                    f"   ({time.time() - t0:.1f}s)"
                )


if __name__ == "__main__":
    main()
