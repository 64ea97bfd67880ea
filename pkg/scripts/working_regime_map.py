"""Sign of the cooling current Q3 over an (E1, T1) grid, next to the closed-form margin.

    python scripts/working_regime_map.py [--n 9] [--csv out.csv]

A '+' marks cooling (Q3 > 0), '-' heating; a '!' would mark disagreement with the
sign of E2/T2 - E1/T1 - E3/T3.
"""

import argparse
import csv
import sys

import numpy as np

from qtm.sweeps import fridge_point, working_margin


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=9)
    ap.add_argument("--csv", help="also write E1,T1,Q3,margin rows here")
    args = ap.parse_args()

    E1_grid = np.linspace(0.1, 2.0, args.n)
    T1_grid = np.linspace(5.5, 30.0, args.n)
    rows, disagreements = [], 0
    print("T1 \\ E1 " + " ".join(f"{e:5.2f}" for e in E1_grid))
    for T1 in T1_grid:
        marks = []
        for E1 in E1_grid:
            template = {"E1": E1, "E3": 1.0, "T": (T1, 5.0, 4.0), "p": 1e-3, "g": 1e-2}
            spec, rep = fridge_point(template, "E1", E1)
            margin = working_margin(spec)
            Q3 = rep.Q[2]
            agree = np.sign(Q3) == np.sign(margin)
            disagreements += not agree
            marks.append(("+" if Q3 > 0 else "-") if agree else "!")
            rows.append((E1, T1, Q3, margin))
        print(f"{T1:7.2f} " + " ".join(f"{m:>5}" for m in marks))
    print(f"disagreements with the closed-form margin: {disagreements}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("E1", "T1", "Q3", "margin"))
            w.writerows((repr(a), repr(b), repr(c), repr(d)) for a, b, c, d in rows)
    sys.exit(1 if disagreements else 0)


if __name__ == "__main__":
    main()
