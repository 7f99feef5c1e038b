"""TASEP cumulants with a boundary parameter outside the unit circle (residue formulas).

    python3 scripts/low_density_tasep.py --alpha 0.4 --beta 0.8 --sizes 1-6
"""
import argparse

import numpy as np

from qasep import BoundaryRates, SystemSpec, bethe_cumulants, cumulants_oracle
from qasep.qspecial import ab_from_rates


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--alpha", type=float, default=0.4)
    p.add_argument("--beta", type=float, default=0.8)
    p.add_argument("--sizes", default="1-6")
    p.add_argument("--orders", type=int, default=3)
    args = p.parse_args()

    rates = BoundaryRates.tasep(args.alpha, args.beta)
    ab = ab_from_rates(rates, 0.0)
    print(f"a={ab.a:.4g} b={ab.b:.4g}")
    lo, _, hi = args.sizes.partition("-")
    for L in range(int(lo), int(hi or lo) + 1):
        spec = SystemSpec(L, 0.0, rates=rates)
        c = np.real(bethe_cumulants(spec, args.orders).values[1:])
        o = np.real(cumulants_oracle(spec, args.orders).values[1:])
        cols = "  ".join(f"{v:.10f}" for v in c)
        print(f"L={L}  {cols}  max rel diff {np.abs(c / o - 1).max():.1e}")


if __name__ == "__main__":
    main()
