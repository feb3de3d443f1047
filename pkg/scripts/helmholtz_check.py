"""Inhomogeneous strings mapped onto box problems: Z(1) on both sides and the transformed potential."""
import argparse

import numpy as np

from sumrules.helmholtz import (DensityProfile, helmholtz_Z1, length_map, schrodinger_Z1_const_potential,
                                transform)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--beta", type=float, default=1.0)
    ap.add_argument("--ell", type=float, default=1.0)
    args = ap.parse_args()
    u = np.linspace(-args.ell / 2, args.ell / 2, 401)

    print(f"{'alpha':>6} {'L':>10} {'string Z(1)':>16} {'box Z(1)':>16} {'diff':>8} {'max|V| borg':>11}")
    for alpha in np.linspace(-1.5, 1.5, 7) / args.ell:
        d = DensityProfile.inverse_square(alpha, args.beta, args.ell)
        L = length_map(d)
        lhs = helmholtz_Z1(d)
        rhs = schrodinger_Z1_const_potential(L, alpha**2 / (4 * args.beta))
        vb = np.max(np.abs(transform(DensityProfile.borg(alpha, args.beta, args.ell)).V_of_u(u)))
        print(f"{alpha:6.2f} {L:10.6f} {lhs:16.12f} {rhs:16.12f} {abs(lhs - rhs):8.1e} {vb:11.1e}")


if __name__ == "__main__":
    main()
