"""Print the heat and work ledger of the two memory-erasure examples and the uncorrelated erasure."""
import argparse
import math

from corrtherm import laws
from corrtherm.process import box1_ledger, erasure, example1, example2

KEYS = ("dS_first", "dS_second", "dS_cond", "I_initial", "heat_dissipated_to_bath",
        "heat_absorbed_by_system", "dW_first", "dF_first_local", "energetic_heat")


def show(name, t):
    q = laws.transition_quantities(t)
    print(f"== {name} (T={t.T_second})")
    for k in KEYS:
        print(f"  {k:26s} {q[k]: .9f}  ({q[k] / math.log(2): .4f} ln2)")
    land = laws.landauer_report(t)
    print(f"  generalized Landauer: {land.verdict}; classic bound violated: {land.flags['classic_landauer_violated']}")
    if t.label.startswith("example"):
        b = box1_ledger(t.initial, t.T_second, t.layout)
        print(f"  ancilla: {b.ancilla_qubits} qubit(s), work from correlations {b.work_extracted:.9f}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, nargs="+", default=[0.5, 0.5])
    ap.add_argument("--T", type=float, default=1.0)
    args = ap.parse_args()
    show("example 1: classically correlated memory", example1(args.p, args.T))
    show("example 2: entangled memory", example2(args.p, args.T))
    show("uncorrelated erasure", erasure(args.T))


if __name__ == "__main__":
    main()
