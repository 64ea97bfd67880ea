"""Fridge COP and cooling current as E1 approaches the reversibility point from the cooling side.

    python scripts/fridge_carnot_approach.py [--T 10,5,4] [--E3 1] [--g 0.01] [--p 1e-3]

Prints one line per point: distance to E1*, COP, Carnot COP, Q3.
"""

import argparse

import numpy as np

from qtm.sweeps import carnot_check_fridge, carnot_cop, reversibility_point_fridge, sweep_fridge


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--T", default="10,5,4")
    ap.add_argument("--E3", type=float, default=1.0)
    ap.add_argument("--g", type=float, default=0.01)
    ap.add_argument("--p", type=float, default=1e-3)
    args = ap.parse_args()
    T = tuple(float(x) for x in args.T.split(","))

    E1s = reversibility_point_fridge(*T, args.E3)
    cop_c = carnot_cop(*T)
    offsets = np.logspace(0, -6, 7)
    template = {"E1": E1s, "E3": args.E3, "T": T, "p": args.p, "g": args.g}
    table = sweep_fridge(template, "E1", E1s * (1 + offsets))
    print(f"E1* = {E1s!r}   Carnot COP = {cop_c!r}")
    print(f"{'E1/E1*-1':>10} {'COP':>20} {'COP_C-COP':>12} {'Q3':>12}")
    for off, row in zip(offsets, table.rows):
        print(f"{off:10.1e} {row.cop_or_eff:20.15f} {cop_c - row.cop_or_eff:12.3e} {row.Q3:12.3e}")
    check = carnot_check_fridge(*T, args.E3, args.g, args.p)
    print(f"at E1*: design COP {check.limit_performance!r}, max|Q| {check.current_at_point:.1e}, passed={check.passed}")


if __name__ == "__main__":
    main()
