"""Cumulants of the current versus system size, functional equation against diagonalization.

    python3 scripts/cumulant_sweep.py --q 0.3 --rates 0.6,0.7,0.2,0.1 --sizes 1-8 --out sweep.csv
"""
import argparse
import csv
import sys

import numpy as np

from qasep import BoundaryRates, SystemSpec, bethe_cumulants, cumulants_oracle


def parse_sizes(text):
    lo, _, hi = text.partition("-")
    return range(int(lo), int(hi or lo) + 1)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--q", type=float, default=0.3)
    p.add_argument("--rates", default="0.6,0.7,0.2,0.1")
    p.add_argument("--sizes", default="1-8")
    p.add_argument("--orders", type=int, default=4)
    p.add_argument("--oracle-max", type=int, default=10, help="largest L diagonalized")
    p.add_argument("--out", default=None, help="CSV path (stdout if omitted)")
    args = p.parse_args()

    rates = BoundaryRates(*map(float, args.rates.split(",")))
    header = ["L"] + [f"c{k}" for k in range(1, args.orders + 1)] + ["max_rel_diff"]
    rows = []
    for L in parse_sizes(args.sizes):
        spec = SystemSpec(L, args.q, rates=rates)
        c = np.real(bethe_cumulants(spec, args.orders).values[1:])
        diff = ""
        if L <= args.oracle_max:
            o = np.real(cumulants_oracle(spec, args.orders).values[1:])
            diff = format(np.abs(c / o - 1).max(), ".3e")
        rows.append([L, *(format(v, ".17g") for v in c), diff])

    out = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    if args.out:
        out.close()


if __name__ == "__main__":
    main()
