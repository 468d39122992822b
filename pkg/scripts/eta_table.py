"""Tabulate the numerical constant A, the radius r0 and psi(0) of the
eta construction for small dimensions."""
import argparse
import time

import numpy as np

from signlab.constructions import build_eta
from signlab.funcrep import evaluate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dims", type=int, nargs="+", default=[1, 2, 3, 4])
    ap.add_argument("--x-max", type=float, default=1e3)
    args = ap.parse_args()
    print(f"{'d':>3} {'A':>12} {'r0':>10} {'psi(0)':>12} {'eta(0)':>12} {'min weighted':>13} {'s':>6}")
    for d in args.dims:
        t = time.perf_counter()
        res = build_eta(d, x_max=args.x_max)
        past = res.weighted[res.grid >= res.r0]
        print(f"{d:>3} {res.A:>12.6g} {res.r0:>10.4g} {res.psi0:>12.6g} {float(evaluate(res.eta, 0.0)):>12.5g} "
              f"{float(np.min(past)):>13.5g} {time.perf_counter() - t:>6.1f}")


if __name__ == "__main__":
    main()
