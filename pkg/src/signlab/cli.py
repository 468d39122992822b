"""Command line: ``signlab verify | search | transform``.

Exit codes: 0 success, 1 a certificate or verification failed, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .constructions import ConstructionError, run_pipeline, scan_radius
from .funcrep import SpecError, evaluate, parse_spec, spec_to_dict
from .transforms import TransformError, fourier_transform

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    suites: list = field(default_factory=list)
    dim: int | None = None
    sign: int | None = None
    degree: int | None = None
    tol: float | None = None
    grid: int | None = None
    out: Path | None = None
    seed: int = 0
    input: Path | None = None
    pipeline: Path | None = None

    def validate(self):
        if self.tol is not None and not self.tol > 0:
            raise UsageError("--tol must be positive")
        if self.grid is not None and self.grid < 2:
            raise UsageError("--grid must be at least 2")
        if self.command == "search":
            if self.dim is None or self.dim < 1:
                raise UsageError("--dim must be a positive integer")
            if self.sign is None:
                raise UsageError("--sign is required")
            if self.degree is not None and self.degree < 2:
                raise UsageError("--degree must be at least 2")
        if self.command == "verify" and not self.suites:
            raise UsageError("--suite is required")
        if self.command == "transform":
            for p in (self.input, self.pipeline):
                if p is not None and not p.is_file():
                    raise UsageError(f"no such file: {p}")
            if self.input is None:
                raise UsageError("--input is required")
        if self.out is not None and self.out.exists() and self.command != "verify" and not self.out.is_dir():
            raise UsageError(f"--out {self.out} exists and is not a directory")


def atomic_write(path: Path, text: str):
    """Write through a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("SIGNLAB_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# commands


def cmd_verify(cfg: RunConfig) -> int:
    from .suites import ALIASES, SUITES, resolve_suite, run_suite

    names = list(SUITES) if cfg.suites == ["all"] else cfg.suites
    try:
        keys = [resolve_suite(n) for n in names]
    except KeyError as exc:
        known = sorted(SUITES) + sorted(ALIASES)
        print(f"unknown suite {exc.args[0]!r}; known suites: {', '.join(known)}", file=sys.stderr)
        return EXIT_USAGE
    with ThreadPoolExecutor(max_workers=min(_threads(), len(keys))) as pool:
        reports = list(pool.map(lambda k: run_suite(k, cfg.seed), keys))
    for rep in reports:
        print(f"[{'PASS' if rep['passed'] else 'FAIL'}] {rep['suite']} ({rep['seconds']:.2f} s)")
        for c in rep["checks"]:
            print(f"    {'ok  ' if c['passed'] else 'FAIL'} {c['name']:<32} margin {c['margin']:.3e}")
    doc = {"seed": cfg.seed, "passed": all(r["passed"] for r in reports), "suites": reports}
    if cfg.out is not None:
        target = cfg.out / "verify.json" if cfg.out.is_dir() else cfg.out
        atomic_write(target, json.dumps(doc, indent=2, default=float))
    return EXIT_OK if doc["passed"] else EXIT_FAIL


def _default_degree(d: int, s: int) -> int:
    if d == 1:
        return 40 if s < 0 else 60
    return 30


def cmd_search(cfg: RunConfig) -> int:
    from .lp.search import SearchConfig, bisect_min_radius

    degree = cfg.degree or _default_degree(cfg.dim, cfg.sign)
    sc = SearchConfig() if cfg.grid is None else SearchConfig(points=cfg.grid)
    res = bisect_min_radius(cfg.dim, cfg.sign, degree, tol=cfg.tol or 1e-3, config=sc)
    ver = res.verification.radius if res.verification is not None else math.nan
    print(f"d={cfg.dim} sign={'+' if cfg.sign > 0 else '-'} degree={degree}: r_upper={res.r_upper:.6f} "
          f"verified={ver:.6f} status={res.status}")
    out = cfg.out or Path(".")
    stem = f"search_d{cfg.dim}_{'plus' if cfg.sign > 0 else 'minus'}"
    atomic_write(out / f"{stem}.json", res.to_json())
    atomic_write(out / f"{stem}_bisection.csv", res.trace_csv())
    return EXIT_OK if res.status == "ok" and math.isfinite(res.r_upper) else EXIT_FAIL


def _stage_report(f, xs: np.ndarray) -> dict:
    fv = evaluate(f, xs)
    try:
        fh = fourier_transform(f)
        hv = evaluate(fh, xs)
        fh0 = float(evaluate(fh, 0.0))
    except TransformError as exc:
        return {"f0": float(fv[0]), "transform": f"unavailable: {exc}"}
    R = float(xs[-1])
    r = scan_radius(f, R, grid=1024)
    return {
        "f0": float(fv[0]),
        "fhat0": fh0,
        "plus_eigen_deviation": float(np.max(np.abs(hv - fv))),
        "minus_eigen_deviation": float(np.max(np.abs(hv + fv))),
        "radius_scan": r if math.isfinite(r) else None,
        "scan_window": R,
        "membership": {
            "f0_nonpositive": float(fv[0]) <= 0,
            "fhat0_nonpositive": fh0 <= 0,
            "nonnegative_at_scan_end": bool(fv[-1] >= 0),
        },
    }


def cmd_transform(cfg: RunConfig) -> int:
    base = parse_spec(cfg.input.read_text())
    steps = []
    if cfg.pipeline is not None:
        raw = json.loads(cfg.pipeline.read_text())
        steps = raw["steps"] if isinstance(raw, dict) else raw
        if not isinstance(steps, list):
            raise UsageError("pipeline must be a list of {op, params} or {\"steps\": [...]}")
    n = cfg.grid or 401
    xs = np.linspace(0.0, 4.0, n)
    reports = [{"stage": "input", **_stage_report(base, xs)}]
    f = base
    for i, st in enumerate(steps):
        f, _ = run_pipeline(f, [st])
        reports.append({"stage": i, "op": st.get("op"), "params": st.get("params", {}), **_stage_report(f, xs)})
    out = cfg.out or Path(".")
    atomic_write(out / "result_spec.json", json.dumps(spec_to_dict(f), indent=2))
    atomic_write(out / "stages.json", json.dumps(reports, indent=2, default=float))
    fv = evaluate(f, xs)
    try:
        hv = evaluate(fourier_transform(f), xs)
    except TransformError:
        hv = np.full_like(xs, np.nan)
    lines = ["x,f,fhat"] + [f"{x!r},{a!r},{b!r}" for x, a, b in zip(xs.tolist(), fv.tolist(), hv.tolist())]
    atomic_write(out / "profile.csv", "\n".join(lines) + "\n")
    print(f"{len(steps)} stage(s); f(0) = {float(fv[0]):.6g}; outputs in {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _sign(text: str) -> int:
    table = {"plus": 1, "+": 1, "+1": 1, "minus": -1, "-": -1, "-1": -1}
    if text not in table:
        raise argparse.ArgumentTypeError("sign must be plus or minus")
    return table[text]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="signlab", description="Fourier sign uncertainty numerics")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--tol", type=float)
        sp.add_argument("--grid", type=int)
        sp.add_argument("--out", type=Path)
        sp.add_argument("--seed", type=int, default=0)

    v = sub.add_parser("verify", help="run named certificate suites")
    v.add_argument("--suite", action="append", default=[], help="suite name, alias or 'all' (repeatable)")
    common(v)
    s = sub.add_parser("search", help="LP upper bound for the eigenfunction problem")
    s.add_argument("--dim", type=int)
    s.add_argument("--sign", type=_sign)
    s.add_argument("--degree", type=int)
    common(s)
    t = sub.add_parser("transform", help="apply a construction pipeline to a function spec")
    t.add_argument("--input", type=Path, required=True)
    t.add_argument("--pipeline", type=Path)
    common(t)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    cfg = RunConfig(ns.command, suites=getattr(ns, "suite", []), dim=getattr(ns, "dim", None),
                    sign=getattr(ns, "sign", None), degree=getattr(ns, "degree", None), tol=ns.tol, grid=ns.grid,
                    out=ns.out, seed=ns.seed, input=getattr(ns, "input", None), pipeline=getattr(ns, "pipeline", None))
    try:
        cfg.validate()
        return {"verify": cmd_verify, "search": cmd_search, "transform": cmd_transform}[cfg.command](cfg)
    except ConstructionError as exc:
        print(f"signlab: construction failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, SpecError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        print(f"signlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
