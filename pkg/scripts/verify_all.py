"""Run every certificate suite under several seeds and print a summary."""
import argparse
import json
from pathlib import Path

from signlab.cli import atomic_write
from signlab.suites import SUITES, run_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--out", type=Path)
    args = ap.parse_args()
    reports = []
    for seed in args.seeds:
        for name in SUITES:
            rep = run_suite(name, seed)
            reports.append(rep)
            worst = min(c["margin"] for c in rep["checks"])
            print(f"seed {seed:<3} {name:<22} {'PASS' if rep['passed'] else 'FAIL'}  "
                  f"min margin {worst:.3e}  {rep['seconds']:.2f} s")
    if args.out:
        atomic_write(args.out, json.dumps(reports, indent=2, default=float))
    return 0 if all(r["passed"] for r in reports) else 1


if __name__ == "__main__":
    raise SystemExit(main())
