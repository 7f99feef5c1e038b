"""Commutator residual of the open transfer matrix against the auxiliary cutoff N.

Shows the geometric decay of the raw truncation error and the gain from
the tail extrapolation.

    python3 scripts/truncation_convergence.py --L 3 --mu 0.3
"""
import argparse

from qasep import BoundaryRates
from qasep.transfer import open as op


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--L", type=int, default=2)
    p.add_argument("--q", type=float, default=0.5)
    p.add_argument("--mu", type=float, default=0.3)
    p.add_argument("--rates", default="0.6,0.7,0.2,0.1")
    p.add_argument("--x", type=float, default=0.2)
    p.add_argument("--y", type=float, default=0.1)
    p.add_argument("--cutoffs", default="8,16,24,32,48,64")
    args = p.parse_args()

    rates = BoundaryRates(*map(float, args.rates.split(",")))
    print(f"{'N':>4} {'raw':>12} {'extrapolated':>14}")
    for N in map(int, args.cutoffs.split(",")):
        raw, ext = (op.commutation_residual(args.x, args.y, args.mu, args.L, args.q, rates, N, flag)
                    for flag in (False, True))
        print(f"{N:>4} {raw:12.3e} {ext:14.3e}")


if __name__ == "__main__":
    main()
