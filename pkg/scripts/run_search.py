"""Run the LP bisection for several (dimension, sign, degree) triples and
write one JSON result and one bisection CSV per triple.

    python scripts/run_search.py --out results/ 1:-:40 1:+:60 8:-:30 12:+:30
"""
import argparse
import concurrent.futures as cf
import os
import time
from pathlib import Path

from signlab.cli import atomic_write
from signlab.lp.search import bisect_min_radius


def parse_triple(text):
    d, s, m = text.split(":")
    return int(d), (1 if s in ("+", "plus") else -1), int(m)


def run(d, s, m, tol):
    t = time.perf_counter()
    res = bisect_min_radius(d, s, m, tol=tol)
    return res, time.perf_counter() - t


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("triples", nargs="+", type=parse_triple, help="d:sign:degree, sign in {+,-}")
    ap.add_argument("--tol", type=float, default=1e-3)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    workers = int(os.environ.get("SIGNLAB_THREADS", "1"))
    with cf.ProcessPoolExecutor(max_workers=workers) as pool:
        futs = {pool.submit(run, d, s, m, args.tol): (d, s, m) for d, s, m in args.triples}
        for fut in cf.as_completed(futs):
            d, s, m = futs[fut]
            res, dt = fut.result()
            stem = f"search_d{d}_{'plus' if s > 0 else 'minus'}_m{m}"
            atomic_write(args.out / f"{stem}.json", res.to_json())
            atomic_write(args.out / f"{stem}_bisection.csv", res.trace_csv())
            ver = res.verification.radius if res.verification else float("nan")
            print(f"d={d:<3} s={s:+d} m={m:<3} r_upper={res.r_upper:.6f} verified={ver:.6f} "
                  f"status={res.status} {dt:.1f} s")


if __name__ == "__main__":
    main()
