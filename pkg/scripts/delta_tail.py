"""Z(1) at the coupling where it vanishes: truncated sums against sums completed with the asymptotic tail."""
import argparse

import numpy as np

from sumrules.impurity1d import (SingleImpurity, solve_spectrum, sum_rule_exact, tail_completed_sum,
                                 zero_coupling)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--a", type=float, default=0.0)
    ap.add_argument("--counts", default="100,500,1000,2000")
    args = ap.parse_args()
    cfg = SingleImpurity(zero_coupling(args.a), args.a)
    print(f"abar = {args.a}, rho = {cfg.rho:.12g}, closed form Z(1) = {sum_rule_exact(1, cfg)!r}")
    print(f"{'roots':>6} {'head only':>14} {'head + tail':>14} {'tail bound':>10}")
    for count in (int(c) for c in args.counts.split(",")):
        sp = solve_spectrum(cfg, count, symmetric_only=(args.a == 0.0))
        head = float(np.sum(1 / solve_spectrum(cfg, count).roots))
        total, bound = tail_completed_sum(1, sp, cfg, return_bound=True)
        print(f"{count:6d} {head:14.6e} {total:14.3e} {bound:10.1e}")


if __name__ == "__main__":
    main()
