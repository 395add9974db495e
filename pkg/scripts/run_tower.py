"""Run the S^7 -> CP^3 -> S^4 tower and print every stage report."""

import argparse
import sys
from fractions import Fraction

from skewtorsion.catalog import sp2_s7
from skewtorsion.tower import run_tower


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--alpha", default="1", help="delta is set to 2 alpha")
    p.add_argument("--mode", choices=("float", "rational"), default="float")
    p.add_argument("--tol", type=float, default=1e-9)
    args = p.parse_args()
    exact = args.mode == "rational"
    a = Fraction(args.alpha) if exact else float(Fraction(args.alpha))
    res = run_tower(sp2_s7(a, 2 * a, exact).triple, args.tol)
    for name, rep in res.stages.items():
        print(f"[{name}]")
        print(rep.summary())
    if res.qk is not None:
        print(f"k = {res.qk.k}")
    return 0 if res.report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
