"""Write CSV curves for plotting: the eigenvalue condition, the gamma-shifted sum rule and two-impurity Z(1).

    python3 scripts/figures.py --outdir figures [--basis 2000]

Plotting is left to whatever reads the CSVs.
"""
import argparse
import sys
from pathlib import Path

from sumrules.cli import main as cli


def run(argv):
    code = cli(argv)
    if code:
        sys.exit(f"sumrules {' '.join(argv)} exited with {code}")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--outdir", default="figures")
    ap.add_argument("--basis", type=int, default=2000, help="Rayleigh-Ritz basis for the two-impurity dots")
    args = ap.parse_args()
    out = Path(args.outdir)

    # left-hand side of the eigenvalue condition at rho = -4, centred and off-centre impurity
    for a in ("0", "0.4"):
        run(["delta1", "--rho=-4", f"--a={a}", "--energy-sweep=-20:200:0.1", f"--out={out / f'eigen_lhs_a{a}.csv'}"])

    # Z_gamma(1) at rho = -4, abar = 0, plus the roots it has poles at
    run(["delta1", "--rho=-4", "--a=0", "--gamma-sweep=-200:40:0.05", f"--out={out / 'zgamma_rho-4.csv'}"])
    run(["delta1", "--rho=-4", "--a=0", "--spectrum=5", f"--out={out / 'roots_rho-4.json'}"])

    # two impurities at +-1/6 with mu = rho and mu = -rho: exact curve and RR dots
    for ratio, tag in (("1", "same"), ("-1", "opposite")):
        run(["delta2", f"--mu-ratio={ratio}", "--rho-sweep=-8:4:0.01",
             f"--out={out / f'delta2_{tag}_exact.csv'}"])
        run(["delta2", f"--mu-ratio={ratio}", "--rho-sweep=-8:4:0.25", "--rr",
             "--extrapolate", f"--basis={args.basis}", f"--out={out / f'delta2_{tag}_rr.csv'}"])


if __name__ == "__main__":
    main()
