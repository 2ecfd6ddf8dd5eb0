#!/usr/bin/env python3
"""D-efficiency vs run count on the stand-in catalog, plus the winning-n
histogram over randomized trials.  Emits TSV blocks suitable for plotting."""

import argparse

from choicescore.catalog import standin_catalog
from choicescore.design import efficiency_curve, trial_histogram


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-from", type=int, default=30)
    ap.add_argument("--n-to", type=int, default=200)
    ap.add_argument("--step", type=int, default=10)
    ap.add_argument("--restarts", type=int, default=3)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--samples", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    catalog = standin_catalog()
    print("# efficiency curve")
    print("n\tlog_det\tnormalized_efficiency")
    curve = efficiency_curve(
        catalog, range(args.n_from, args.n_to + 1, args.step),
        restarts=args.restarts, seed=args.seed,
    )
    for n, log_det, eff in curve:
        print(f"{n}\t{log_det:.6f}\t{eff:.6f}")

    print("\n# winning-n histogram")
    print("n\tcount")
    freq = trial_histogram(
        catalog, (args.n_from, args.n_to), args.trials, args.samples, args.seed
    )
    for n, count in sorted(freq.items()):
        print(f"{n}\t{count}")


if __name__ == "__main__":
    main()
