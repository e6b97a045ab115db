"""Cavity purity needed for a given cat size, and where the energy minimum actually lands."""

import argparse
import math

from rabivar import ansatz, model, optimize
from rabivar.model import ModelParams


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--omega-q", type=float, default=176.0)
    ap.add_argument("--scale", type=float, default=0.24, help="alpha_c in units of sqrt(omega_q)")
    args = ap.parse_args()

    base = ModelParams(1.0, args.omega_q)
    alpha = args.scale * math.sqrt(args.omega_q)
    mu = optimize.purity_vs_displacement(alpha, base)
    g = optimize.coupling_for_alpha(alpha, base)
    p = ModelParams(1.0, args.omega_q, g)
    s, opt = optimize.minimize_energy(p)
    exact = ansatz.purity_from_state(optimize.exact_states(p)[0].vector(0))
    print(f"alpha_c={alpha:.5f} asymptotic purity={mu:.5f} at g={g:.5f} (g/g*={g / model.g_star(p):.4f})")
    print(f"energy minimum: p_minus={s.p_minus:.5f} alpha_c={s.alpha_c:.5f} r={s.r:.5f} purity={ansatz.purity_noq(s.p_minus):.5f}")
    print(f"exact ground-state purity={exact:.5f}")


if __name__ == "__main__":
    main()
