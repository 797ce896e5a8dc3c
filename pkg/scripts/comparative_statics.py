#!/usr/bin/env python3
"""Sweep the applied-game parameter grids and tabulate the frequency bound.

Prints, for each variant, the closed form against the LP value along each
parameter axis, so the monotonicity claims can be eyeballed directly.
"""

import argparse

from repfreq.apps import (
    EntryDeterrenceParams,
    FiscalPolicyParams,
    ProductChoiceParams,
    build_stage_game,
    closed_form_min_freq,
)
from repfreq.bounds import min_stackelberg_freq


def sweep(label, make_params, values):
    print(f"\n{label}")
    print(f"{'value':>8} {'closed':>12} {'lp':>12} {'gap':>10}")
    for v in values:
        params = make_params(v)
        closed = closed_form_min_freq(params)
        lp = min_stackelberg_freq(build_stage_game(params)).value
        print(f"{v:8.2f} {closed:12.8f} {lp:12.8f} {abs(lp - closed):10.2e}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=9, help="grid points per axis")
    args = parser.parse_args()
    grid = [round((k + 1) / (args.points + 1), 3) for k in range(args.points)]

    sweep("product choice: buyer threshold (cost_high=0.4, cost_low=0.2)",
          lambda g: ProductChoiceParams(g, 0.4, 0.2), grid)
    sweep("product choice: effort cost (gamma=0.5, cost_low=0.2)",
          lambda c: ProductChoiceParams(0.5, c, 0.2), grid)
    sweep("product choice: off-path cost (gamma=0.5, cost_high=0.4)",
          lambda c: ProductChoiceParams(0.5, 0.4, c), grid)
    sweep("entry deterrence: entry threshold (cost_out=0.5, cost_in=0.3)",
          lambda g: EntryDeterrenceParams(g, 0.5, 0.3), grid)
    sweep("entry deterrence: subsidy (gamma=0.6, cost_out=0.5, cost_in=0.3)",
          lambda s: EntryDeterrenceParams(0.6, 0.5, 0.3, subsidy=s),
          [v for v in grid if v < 0.4])
    sweep("fiscal policy: tax rate (cost=0.1)",
          lambda t: FiscalPolicyParams(t, 0.1), [v for v in grid if v < 0.9])


if __name__ == "__main__":
    main()
