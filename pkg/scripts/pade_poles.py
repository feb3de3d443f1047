"""[1,1] Pade estimates of the critical coupling of a delta impurity, against the exact value."""
import argparse

import numpy as np

from sumrules import BOX, DeltaInBox, pade_extend, sum_rule_perturbative
from sumrules.impurity1d import critical_coupling


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cutoff", type=int, default=1000)
    ap.add_argument("--orders", default="1,2")
    args = ap.parse_args()
    orders = [int(x) for x in args.orders.split(",")]

    print(f"{'abar':>6} {'rho_c':>12} " + " ".join(f"{'pole s=' + str(s):>12}" for s in orders))
    for a in np.linspace(0.0, 0.4, 5):
        poles = []
        for s in orders:
            ev = sum_rule_perturbative(BOX, DeltaInBox(1.0, a), s, cutoff=args.cutoff)
            poles.append(pade_extend(ev).pole_location)
        print(f"{a:6.2f} {critical_coupling(a):12.6f} " + " ".join(f"{p:12.6f}" for p in poles))


if __name__ == "__main__":
    main()
