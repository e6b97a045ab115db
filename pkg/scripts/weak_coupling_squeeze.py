"""Fidelity-optimized squeezing at weak coupling against the second-order prediction.

The relative gap shrinks roughly like w_c / w_q, so small qubit frequencies
show a visible offset.
"""

import argparse

from rabivar import model, optimize
from rabivar.model import ModelParams


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ratio", type=float, default=0.1, help="g / g*")
    ap.add_argument("--omega-q", type=float, nargs="+", default=[5.0, 20.0, 50.0, 176.0, 1000.0])
    args = ap.parse_args()

    print(f"{'omega_q':>8} {'r fit':>12} {'r pert':>12} {'rel':>8} {'alpha_c':>9}")
    for wq in args.omega_q:
        p = ModelParams.from_ratio(wq, args.ratio)
        q = optimize.fit_noq(p).params
        ref = model.weak_coupling_squeeze(p)
        print(f"{wq:8.1f} {q.r:12.6e} {ref:12.6e} {abs(q.r - ref) / ref:8.4f} {q.alpha_c:9.4f}")


if __name__ == "__main__":
    main()
