#!/usr/bin/env python3
"""Choice-model simulations: the theory-vs-oracle scatter, the RMS error grid
over (set size, questionnaire count), and the pair-coverage comparison of the
cyclic diversifier against random partitioning."""

import argparse

import numpy as np

from choicescore.catalog import Profile
from choicescore.priors import parse_prior
from choicescore.questionnaires import (
    generate_questionnaires,
    pair_coverage,
    plan_study,
    random_questionnaires,
)
from choicescore.simulation import rms_study, scatter_study


def cmd_scatter(args):
    prior = parse_prior(args.prior)
    print("set_size\ty_true\tc_bar")
    for s in args.sizes:
        for y, c in scatter_study(args.n, s, args.q, prior, args.seed):
            print(f"{s}\t{y:.6f}\t{c:.6f}")


def cmd_rms(args):
    prior = parse_prior(args.prior)
    table = rms_study(
        args.n, args.sizes, list(range(1, args.q + 1)), prior,
        strategy=args.strategy, repeats=args.repeats, seed=args.seed,
    )
    print("s\tq\tmean_rms")
    for (s, q), v in sorted(table.cells.items()):
        print(f"{s}\t{q}\t{v:.6f}")


def cmd_coverage(args):
    plan = plan_study(args.n)
    profiles = [Profile(i, (0,)) for i in range(args.n)]
    cycle = generate_questionnaires(profiles, plan, seed=args.seed)
    _, _, group_curve = pair_coverage(cycle, args.n)
    rand = np.zeros(2 * plan.p)
    for k in range(args.seeds):
        quests = random_questionnaires(profiles, 4, 2 * plan.p, seed=args.seed + k)
        _, _, curve = pair_coverage(quests, args.n)
        rand += np.array(curve)
    rand /= args.seeds
    print("q\tgroup\trandom_mean")
    for t in range(2 * plan.p):
        g = f"{group_curve[t]:.6f}" if t < plan.p else ""
        print(f"{t + 1}\t{g}\t{rand[t]:.6f}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    sub = ap.add_subparsers(required=True)

    p = sub.add_parser("scatter", help="mean choice vs true label")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--sizes", type=int, nargs="+", default=[3, 4, 5, 6])
    p.add_argument("--q", type=int, default=25)
    p.add_argument("--prior", default="uniform:-1,1")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_scatter)

    p = sub.add_parser("rms", help="RMS error grid")
    p.add_argument("--n", type=int, default=188)
    p.add_argument("--sizes", type=int, nargs="+", default=[2, 3, 4, 5, 6])
    p.add_argument("--q", type=int, default=25)
    p.add_argument("--prior", default="normal:0,1")
    p.add_argument("--strategy", choices=["random", "group"], default="random")
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_rms)

    p = sub.add_parser("coverage", help="pair coverage: diversifier vs random")
    p.add_argument("--n", type=int, default=188)
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_coverage)

    args = ap.parse_args()
    args.fn(args)


if __name__ == "__main__":
    main()
