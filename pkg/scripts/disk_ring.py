"""Ring impurity in the unit disk: partial waves of Z(2), their sum and the critical couplings."""
import argparse
import math

from sumrules.impurity2d import (RingImpurity, critical_coupling_2d, denominator_root, verify_zero_mode,
                                 z2_partial_closed, z2_partial_numeric, z2_total)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--r0", type=float, default=0.5)
    ap.add_argument("--rho", type=float, default=0.0)
    ap.add_argument("--nmax", type=int, default=200)
    args = ap.parse_args()
    cfg = RingImpurity(args.rho, args.r0)

    print(f"r0 = {args.r0}, rho = {args.rho}")
    print(f"{'n':>3} {'z_n(2) closed':>18} {'numeric':>18} {'rho_c':>12} {'root':>12} {'zero mode':>9}")
    for n in range(4):
        rc = critical_coupling_2d(n, args.r0)
        print(f"{n:3d} {z2_partial_closed(n, cfg):18.12e} {z2_partial_numeric(n, cfg):18.12e} "
              f"{rc:12.6f} {denominator_root(n, args.r0):12.6f} {verify_zero_mode(n, args.r0):9.1e}")
    tot = z2_total(cfg, nmax=args.nmax)
    print(f"Z(2) = {tot.value:.15f} +- {tot.tail_bound:.1e}  (unit disk pi^2/48 - 5/32 = {math.pi**2 / 48 - 5 / 32:.15f})")


if __name__ == "__main__":
    main()
