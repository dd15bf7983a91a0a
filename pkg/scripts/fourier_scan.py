"""Largest amplification factor as a function of the CFL number for each Cartesian symbol."""

import argparse

import numpy as np

from vortexfv.fourier import SCHEMES, stability_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=128)
    ap.add_argument("--cfl", type=float, nargs="+", default=list(np.round(np.arange(0.05, 1.01, 0.05), 2)))
    args = ap.parse_args()
    print("cfl    " + "  ".join(f"{s:>17s}" for s in SCHEMES))
    for cfl in args.cfl:
        print(f"{cfl:5.2f}  " + "  ".join(f"{stability_scan(s, cfl, args.samples):17.12f}" for s in SCHEMES))


if __name__ == "__main__":
    main()
