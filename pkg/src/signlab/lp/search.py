"""Upper bounds for the eigenfunction sign-uncertainty problem by linear
programming over Laguerre-Gaussian expansions.

At a trial radius r the LP maximises t over coefficients |c_k| <= 1 of the
first ``degree`` basis functions with eigenvalue s, subject to

* f(0) = 0,
* f >= t on 400 Chebyshev points of [r, 2r],
* f >= kappa t on 400 Chebyshev points of (2r, R],
* a nonnegative leading coefficient of the polynomial part.

Rows use the polynomial part only (the Gaussian factor is a positive row
scale) and are normalised to unit max-norm.  Local minima with f < 0 found on
a fine grid are added as extra rows and the LP is re-solved.  A radius is
feasible when t > ``t_min`` and the candidate passes ``last_sign_change``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..funcrep import FunctionSpec, eigen, spec_to_dict
from ..signtools import NotEventuallyNonnegative, SignChangeReport, TailNotCertified, last_sign_change
from ..special import eigen_basis, laguerre_polys
from .simplex import LPOutcome, LPProblem, solve_lp

__all__ = [
    "SearchConfig",
    "RadiusOutcome",
    "SearchResult",
    "parity_indices",
    "feasibility_at_radius",
    "bisect_min_radius",
]


@dataclass(frozen=True)
class SearchConfig:
    points: int = 400  # Chebyshev points per window
    kappa: float = 1e-2  # margin factor on the outer window
    rounds: int = 30  # exchange rounds
    fine: int = 60_000  # fine grid for the exchange step
    t_min: float = 1e-6  # slack below this counts as infeasible
    verify_tol: float = 1e-6  # allowed excess of the verified radius over r
    initial_stride: int = 4  # constraint generation starts with every n-th row
    max_depth: int = 30

    def __post_init__(self):
        if self.points < 8 or self.kappa <= 0 or self.t_min <= 0 or self.fine < 100:
            raise ValueError("invalid search configuration")


@dataclass
class RadiusOutcome(LPOutcome):
    radius: float = math.nan
    slack: float = math.nan
    feasible: bool = False
    candidate: FunctionSpec | None = None
    verification: SignChangeReport | None = None
    rounds: int = 0


@dataclass
class SearchResult:
    sign: int
    dimension: int
    degree: int
    r_upper: float
    candidate: FunctionSpec | None
    verification: SignChangeReport | None
    bisection_trace: list = field(default_factory=list)  # (r, slack, feasible)
    status: str = "ok"

    def to_dict(self) -> dict:
        return {
            "sign": "+" if self.sign > 0 else "-",
            "dimension": self.dimension,
            "degree": self.degree,
            "r_upper": self.r_upper,
            "verified_radius": None if self.verification is None else self.verification.radius,
            "candidate": None if self.candidate is None else spec_to_dict(self.candidate),
            "verification": None if self.verification is None else self.verification.to_dict(),
            "bisection_trace": [[r, t, bool(ok)] for r, t, ok in self.bisection_trace],
            "status": self.status,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def trace_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "slack_t", "feasible"])
        for r, t, ok in self.bisection_trace:
            w.writerow([repr(float(r)), repr(float(t)), int(bool(ok))])
        return buf.getvalue()


def parity_indices(s: int, degree: int) -> np.ndarray:
    """The first ``degree`` basis indices k with (-1)^k = s."""
    if s not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if degree < 2:
        raise ValueError("need at least two basis functions")
    start = 0 if s == 1 else 1
    return np.arange(start, start + 2 * degree, 2)


def _rows(d: int, ks: np.ndarray, x: np.ndarray) -> np.ndarray:
    q, _ = laguerre_polys(d, int(ks[-1]), 2.0 * math.pi * x * x)
    q = q[:, ks]
    return q / np.max(np.abs(q), axis=1, keepdims=True)


def _cheb(a: float, b: float, n: int) -> np.ndarray:
    return a + (b - a) * 0.5 * (1.0 - np.cos(np.linspace(0.0, math.pi, n)))


def _outer_radius(ks: np.ndarray, r: float) -> float:
    # past this radius the basis polynomials are in their monotone regime
    return math.sqrt(2.0 * ks[-1] / math.pi) * 1.6 + 2.0 * r


def _solve_rows(G: np.ndarray, w: np.ndarray, z: np.ndarray, lead: np.ndarray, stride: int) -> LPOutcome:
    """max t s.t. G c >= w t, z c = 0, lead c >= 0, |c| <= 1, t <= 1, by
    constraint generation over the rows of G."""
    n = G.shape[1]
    active = np.zeros(G.shape[0], dtype=bool)
    active[::stride] = True
    active[-1] = True
    bounds = [(-1.0, 1.0)] * n + [(-math.inf, 1.0)]
    obj = np.zeros(n + 1)
    obj[-1] = 1.0
    total_it = 0
    while True:
        idx = np.nonzero(active)[0]
        rows = [(np.append(-G[i], w[i]), "<=", 0.0) for i in idx]
        rows.append((np.append(z, 0.0), "=", 0.0))
        rows.append((np.append(lead, 0.0), ">=", 0.0))
        out = solve_lp(LPProblem(obj, rows, bounds))
        total_it += out.iterations
        if not out.optimal:
            out.iterations = total_it
            return out
        c, t = out.solution[:-1], out.solution[-1]
        viol = w * t - G @ c
        bad = (viol > 1e-10) & ~active
        if not np.any(bad):
            out.iterations = total_it
            return out
        # add the worst violated rows, up to a batch of 64
        cand = np.nonzero(bad)[0]
        worst = cand[np.argsort(-viol[cand])][:64]
        active[worst] = True


def feasibility_at_radius(d: int, s: int, r: float, degree: int, config: SearchConfig | None = None,
                          _retry: bool = True) -> RadiusOutcome:
    """Solve the radius-r LP with exchange rounds and verify the candidate.

    If the LP is feasible but the verified radius exceeds r, the windows and
    the fine grid are doubled and the radius is tried once more.
    """
    cfg = config or SearchConfig()
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if not r > 0:
        raise ValueError("radius must be positive")
    ks = parity_indices(s, degree)
    R = _outer_radius(ks, r)
    xa = _cheb(r, 2.0 * r, cfg.points)
    xb = _cheb(2.0 * r, R, cfg.points)[1:]
    z = _rows(d, ks, np.array([0.0]))[0]
    lead = np.zeros(ks.size)
    lead[-1] = (-1.0) ** int(ks[-1])
    xfine = np.linspace(r, 1.5 * R, cfg.fine)
    Qf = _rows(d, ks, xfine)
    extra = np.array([])
    out: LPOutcome | None = None
    for rnd in range(cfg.rounds):
        xs = np.concatenate([xa, xb, extra])
        G = _rows(d, ks, xs)
        w = np.concatenate([np.ones(xa.size), np.full(xb.size + extra.size, cfg.kappa)])
        out = _solve_rows(G, w, z, lead, cfg.initial_stride)
        if not out.optimal:
            break
        c, t = out.solution[:-1], float(out.solution[-1])
        if t <= cfg.t_min:
            break
        f = Qf @ c
        lm = np.nonzero((f[1:-1] < f[:-2]) & (f[1:-1] <= f[2:]) & (f[1:-1] < 0))[0] + 1
        if lm.size == 0:
            res = _finish(d, s, r, ks, c, t, out, rnd + 1, cfg)
            if not res.feasible and _retry:
                wide = replace(cfg, points=2 * cfg.points, fine=2 * cfg.fine)
                res2 = feasibility_at_radius(d, s, r, degree, wide, _retry=False)
                res2.notes = ("retried on a doubled grid; " + res2.notes).strip("; ")
                return res2
            return res
        extra = np.concatenate([extra, xfine[lm]])
    else:
        rnd = cfg.rounds - 1
    t = float(out.solution[-1]) if out is not None and out.optimal else math.nan
    return RadiusOutcome(out.status if out else "stalled", t, out.solution if out else np.array([]),
                         out.iterations if out else 0, out.max_violation if out else 0.0,
                         out.notes if out else "", radius=r, slack=t, feasible=False, rounds=rnd + 1)


def _finish(d, s, r, ks, c, t, out, rounds, cfg) -> RadiusOutcome:
    coeffs = np.zeros(int(ks[-1]) + 1)
    coeffs[ks] = c
    # enforce f(0) = 0 to rounding through the lowest basis function
    ell0 = eigen_basis(d, int(ks[-1]), np.array([0.0]))[0]
    f0 = float(ell0 @ coeffs)
    coeffs[ks[0]] -= f0 / ell0[ks[0]]
    cand = eigen(d, s, coeffs, metadata=f"lp candidate d={d} s={s:+d} r={r:.6g}")
    try:
        ver = last_sign_change(cand)
    except (NotEventuallyNonnegative, TailNotCertified) as exc:
        return RadiusOutcome(out.status, t, out.solution, out.iterations, notes=f"verification: {exc}",
                             radius=r, slack=t, feasible=False, candidate=cand, rounds=rounds)
    ok = ver.radius <= r + cfg.verify_tol
    note = "" if ok else f"verified radius {ver.radius:.9f} exceeds r"
    return RadiusOutcome(out.status, t, out.solution, out.iterations, out.max_violation, note,
                         radius=r, slack=t, feasible=ok, candidate=cand, verification=ver, rounds=rounds)


def bisect_min_radius(d: int, s: int, degree: int, tol: float = 1e-3, config: SearchConfig | None = None,
                      bracket: tuple[float, float] | None = None) -> SearchResult:
    """Smallest feasible radius to within ``tol`` by bisection.

    Without a bracket the search starts at 0.9 sqrt(d / (2 pi e)) and moves
    geometrically (factor 1.25) until it straddles the feasibility threshold.
    """
    cfg = config or SearchConfig()
    if tol <= 0:
        raise ValueError("tol must be positive")
    trace: list = []
    best: RadiusOutcome | None = None

    def probe(r):
        nonlocal best
        o = feasibility_at_radius(d, s, r, degree, cfg)
        trace.append((r, o.slack if math.isfinite(o.slack) else 0.0, o.feasible))
        if o.feasible and (best is None or r < best.radius):
            best = o
        return o.feasible

    if bracket is not None:
        lo, hi = bracket
        if not (0 < lo < hi):
            raise ValueError("invalid bracket")
        if probe(lo) or not probe(hi):
            return SearchResult(s, d, degree, math.nan, None, None, trace, "invalid bracket")
    else:
        r = 0.9 * math.sqrt(d / (2.0 * math.pi * math.e))
        if probe(r):
            hi = r
            lo = r / 1.25
            while probe(lo):
                hi, lo = lo, lo / 1.25
                if len(trace) > cfg.max_depth:
                    break
        else:
            lo = r
            hi = r * 1.25
            while not probe(hi):
                lo, hi = hi, hi * 1.25
                if len(trace) > cfg.max_depth:
                    return SearchResult(s, d, degree, math.nan, None, None, trace, "no feasible radius found")
    depth = 0
    while hi - lo > tol and depth < cfg.max_depth:
        mid = 0.5 * (lo + hi)
        if probe(mid):
            hi = mid
        else:
            lo = mid
        depth += 1
    assert best is not None
    status = "ok" if best.verification.radius <= hi + cfg.verify_tol else "verification mismatch"
    return SearchResult(s, d, degree, hi, best.candidate, best.verification, trace, status)
