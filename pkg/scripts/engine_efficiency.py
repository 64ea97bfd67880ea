"""Engine efficiency W/Q1 from time-domain runs along an E3 grid up to the reversibility point.

    python scripts/engine_efficiency.py [--T 10,5] [--E2 1] [--N 41] [--points 5]

Each run takes a few seconds at N = 41.
"""

import argparse

import numpy as np

from qtm.sweeps import carnot_efficiency_engine, engine_spec, reversibility_point_engine, run_engine


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--T", default="10,5")
    ap.add_argument("--E2", type=float, default=1.0)
    ap.add_argument("--g", type=float, default=0.005)
    ap.add_argument("--p", type=float, default=0.01)
    ap.add_argument("--N", type=int, default=41)
    ap.add_argument("--points", type=int, default=5)
    args = ap.parse_args()
    T1, T2 = (float(x) for x in args.T.split(","))

    E3s = reversibility_point_engine(T1, T2, args.E2)
    print(f"E3* = {E3s!r}   Carnot efficiency = {carnot_efficiency_engine(T1, T2)!r}")
    print(f"{'E3':>8} {'W':>12} {'W/Q1':>16} {'E3/E1':>16}")
    for E3 in np.linspace(E3s / args.points, E3s, args.points):
        spec = engine_spec(T1, T2, args.E2, E3, args.g, args.p, N=args.N)
        rep, _ = run_engine(spec)
        eta = "stalled" if rep.cop_or_eff is None else f"{rep.cop_or_eff:16.12f}"
        print(f"{E3:8.4f} {rep.W:12.3e} {eta:>16} {E3 / spec.qubit1.energy:16.12f}")


if __name__ == "__main__":
    main()
