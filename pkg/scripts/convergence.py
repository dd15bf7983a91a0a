"""Oblique-wave refinement study on the three mesh families.

Usage: python3 scripts/convergence.py --levels 32 64 128 256 --order 2
"""

import argparse
import math

from vortexfv.cases import ObliqueWave, convergence_study
from vortexfv.meshgen import generate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--levels", type=int, nargs="+", default=[32, 64, 128])
    ap.add_argument("--order", type=int, default=1)
    ap.add_argument("--kinds", nargs="+", default=["cartesian", "quad", "triquad"])
    ap.add_argument("--t-end", type=float, default=0.5)
    args = ap.parse_args()
    for kind in args.kinds:
        meshes = [generate(kind, n, seed=5) for n in args.levels]
        reports, rates = convergence_study(ObliqueWave(theta=math.pi / 4), meshes, order=args.order, t_end=args.t_end)
        print(f"{kind}, order {args.order}")
        for i, (n, rep) in enumerate(zip(args.levels, reports)):
            rate = rates[i - 1] if i else {}
            cols = "  ".join(f"{k}: {rep.errors[k]:.3e} ({rate[k]:5.2f})" if rate else f"{k}: {rep.errors[k]:.3e}"
                             for k in "uvp")
            print(f"  {n:5d}  {cols}")


if __name__ == "__main__":
    main()
