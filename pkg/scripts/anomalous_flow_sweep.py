"""Best anomalous heat flow and its COP as the initial correlation grows from zero to the PSD limit."""
import argparse
import csv
import sys

import numpy as np

from corrtherm import laws
from corrtherm.optimize import angle_grid, block_rotation
from corrtherm.process import two_bath_transition
from corrtherm.states import Hamiltonian, correlated_thermal_pair, max_correlation


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gap", type=float, default=1.0)
    ap.add_argument("--Ta", type=float, default=1.0)
    ap.add_argument("--Tb", type=float, default=2.0)
    ap.add_argument("--points", type=int, default=11)
    ap.add_argument("--grid", type=int, default=10_000)
    args = ap.parse_args()

    h = Hamiltonian.diagonal([0.0, args.gap])
    amax = max_correlation(h, h, args.Ta, args.Tb)
    w = csv.writer(sys.stdout)
    w.writerow(["alpha_frac", "alpha", "theta", "dQ_A", "dI", "clausius_slack", "eta", "carnot"])
    for frac in np.linspace(0.0, 1.0, args.points):
        rho = correlated_thermal_pair(h, h, args.Ta, args.Tb, frac * amax)
        g = angle_grid(rho, h, h, args.Ta, args.Tb, n=args.grid)
        k = g.argmax()
        t = two_bath_transition(rho, h, h, args.Ta, args.Tb, block_rotation(g.theta[k]))
        c = laws.clausius_report(t)
        try:
            eta = laws.cop_report(t, min_delta_i=1e-6).quantities["eta"]
        except laws.CopUndefinedError:
            eta = float("nan")
        q = c.quantities
        w.writerow([f"{frac:.2f}", f"{frac * amax:.6f}", f"{g.theta[k]:.6f}", f"{q['dQ_first']:.9f}",
                    f"{q['dI']:.9f}", f"{c.slack:.3e}", f"{eta:.6f}", laws.carnot_cop(args.Ta, args.Tb)])


if __name__ == "__main__":
    main()
