"""Search metric scalings of the Sp(2)/Sp(1) or SU(2) family that realize a target (alpha, delta)."""

import argparse
import sys
from fractions import Fraction

from skewtorsion.oracles import NoScalingError, solve_scalings


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("alpha")
    p.add_argument("delta")
    p.add_argument("--family", choices=("sp2", "su2"), default="sp2")
    p.add_argument("--grid", type=int, default=25)
    args = p.parse_args()
    try:
        found = solve_scalings(Fraction(args.alpha), Fraction(args.delta), args.family, args.grid)
    except NoScalingError as err:
        print(f"no solution: {err}")
        for k, v in err.landscape.items():
            print(f"  {k}: {v}")
        return 1
    print("scalings:", ", ".join(str(s) for s in found))
    return 0


if __name__ == "__main__":
    sys.exit(main())
