"""Optimized NOQ and ECS infidelities over a grid of qubit frequencies and couplings."""

import argparse

from rabivar import optimize
from rabivar.model import ModelParams


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--omega-q", type=float, nargs="+", default=[5.0, 20.0, 176.0])
    ap.add_argument("--ratios", type=float, nargs="+", default=[0.2, 0.5, 0.8, 1.0, 1.2, 1.5, 2.0, 3.0])
    ap.add_argument("--excited", action="store_true")
    args = ap.parse_args()

    print(f"{'omega_q':>8} {'g/g*':>6} {'1-F noq':>12} {'1-F ecs':>12}")
    for wq in args.omega_q:
        for x in args.ratios:
            p = ModelParams.from_ratio(wq, x)
            noq = optimize.fit_noq(p, excited=args.excited).opt.best_objective
            ecs = optimize.fit_ecs(p, excited=args.excited).opt.best_objective
            print(f"{wq:8.1f} {x:6.2f} {noq:12.4e} {ecs:12.4e}")


if __name__ == "__main__":
    main()
