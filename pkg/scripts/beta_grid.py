"""Print the measured beta of the canonical connection against 2(delta - 2 alpha) over a parameter grid."""

import argparse
from fractions import Fraction

from skewtorsion.catalog import load
from skewtorsion.sasaki import canonical_connection, measure_beta


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--model", default="sp2_s7", choices=("sp2_s7", "su2_3ad"))
    p.add_argument("--alphas", default="1/2,1,2")
    p.add_argument("--deltas", default="1/2,1,2,5")
    p.add_argument("--mode", choices=("float", "rational"), default="float")
    args = p.parse_args()
    exact = args.mode == "rational"
    print(f"{'alpha':>6} {'delta':>6} {'beta':>12} {'2(d-2a)':>10} {'fit residual':>13}")
    for a in map(Fraction, args.alphas.split(",")):
        for d in map(Fraction, args.deltas.split(",")):
            params = (a, d) if exact else (float(a), float(d))
            t = load(args.model, params, exact).triple
            beta, fit = measure_beta(canonical_connection(t), t)
            print(f"{str(a):>6} {str(d):>6} {str(beta):>12} {str(2 * (d - 2 * a)):>10} {float(fit):13.2e}")


if __name__ == "__main__":
    main()
