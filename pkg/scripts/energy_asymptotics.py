"""Energy-minimized NOQ parameters above the crossover vs the large-coupling closed forms."""

import argparse

import numpy as np

from rabivar import ansatz, optimize
from rabivar.model import ModelParams


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--omega-q", type=float, default=176.0)
    ap.add_argument("--ratios", type=float, nargs="+", default=list(np.round(np.linspace(1.1, 5.0, 14), 3)))
    args = ap.parse_args()

    print(f"{'g/g*':>6} {'alpha':>10} {'alpha asym':>10} {'purity':>8} {'purity asym':>11} {'r':>8}")
    for x in args.ratios:
        p = ModelParams.from_ratio(args.omega_q, x)
        s, _ = optimize.minimize_energy(p)
        print(
            f"{x:6.3f} {s.alpha_c:10.5f} {optimize.asymptotic_alpha(p):10.5f} "
            f"{ansatz.purity_noq(s.p_minus):8.5f} {optimize.asymptotic_purity(p):11.5f} {s.r:8.4f}"
        )


if __name__ == "__main__":
    main()
