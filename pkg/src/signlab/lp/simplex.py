"""Dense two-phase simplex method.

Variables with a finite box are split into nonnegative parts so that zero
right-hand sides stay zero (this keeps the slack basis feasible for the
homogeneous constraints the radius search produces).  Pricing is Dantzig's
rule; after ``stall`` pivots without objective progress the method switches
to Bland's rule until progress resumes.  The tableau is rebuilt from the
original data every ``refactor`` pivots.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = ["LPProblem", "LPOutcome", "solve_lp", "LPError"]


class LPError(ValueError):
    pass


@dataclass
class LPProblem:
    """maximise (or minimise) objective . x subject to rows and bounds.

    rows: sequence of (coeffs, relation, rhs) with relation in {"<=", "=", ">="};
    bounds: per-variable (lo, hi), infinite values allowed.
    """

    objective: np.ndarray
    rows: Sequence[tuple] = ()
    bounds: Sequence[tuple] | None = None
    maximize: bool = True

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float).ravel()
        n = self.objective.size
        if n == 0:
            raise LPError("empty objective")
        if self.bounds is None:
            self.bounds = [(0.0, math.inf)] * n
        if len(self.bounds) != n:
            raise LPError(f"{len(self.bounds)} bounds for {n} variables")
        clean = []
        for i, (a, rel, b) in enumerate(self.rows):
            a = np.asarray(a, dtype=float).ravel()
            if a.size != n:
                raise LPError(f"row {i} has {a.size} coefficients, expected {n}")
            if rel not in ("<=", "=", ">="):
                raise LPError(f"row {i}: unknown relation {rel!r}")
            if np.any(np.isnan(a)) or math.isnan(b):
                raise LPError(f"row {i}: NaN entry")
            clean.append((a, rel, float(b)))
        self.rows = clean
        if np.any(np.isnan(self.objective)):
            raise LPError("NaN objective")
        for j, (lo, hi) in enumerate(self.bounds):
            if math.isnan(lo) or math.isnan(hi) or lo > hi:
                raise LPError(f"variable {j}: invalid bounds ({lo}, {hi})")

    @classmethod
    def from_arrays(cls, objective, A_ub=None, b_ub=None, A_eq=None, b_eq=None, A_lb=None, b_lb=None,
                    bounds=None, maximize=True) -> "LPProblem":
        rows = []
        for A, b, rel in ((A_ub, b_ub, "<="), (A_eq, b_eq, "="), (A_lb, b_lb, ">=")):
            if A is not None:
                rows.extend((a, rel, v) for a, v in zip(np.atleast_2d(A), np.atleast_1d(b)))
        return cls(objective, rows, bounds, maximize)


@dataclass
class LPOutcome:
    status: str  # optimal | infeasible | unbounded | stalled
    objective_value: float
    solution: np.ndarray
    iterations: int
    max_violation: float = 0.0
    notes: str = ""

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


@dataclass
class _Standard:
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray  # minimise
    recover: list  # per original variable: (offset, [(column, sign), ...])
    basis0: np.ndarray  # initial basic column per row, -1 where an artificial is needed


def _standardise(p: LPProblem) -> _Standard:
    n = p.objective.size
    cols = []  # columns of the structural part, as (orig index, sign)
    recover = []
    offsets = np.zeros(n)
    bound_rows = []
    for j, (lo, hi) in enumerate(p.bounds):
        parts = []
        if lo == -math.inf and hi == math.inf:
            parts = [(j, 1.0), (j, -1.0)]
            off = 0.0
        elif lo == -math.inf:
            if hi >= 0:
                parts = [(j, 1.0), (j, -1.0)]
                off = 0.0
                bound_rows.append((len(cols), hi))
            else:
                parts = [(j, -1.0)]
                off = hi
        elif lo == 0.0 and hi == math.inf:
            parts = [(j, 1.0)]
            off = 0.0
        elif hi == math.inf:
            if lo < 0:
                parts = [(j, 1.0), (j, -1.0)]
                off = 0.0
                bound_rows.append((len(cols) + 1, -lo))
            else:
                parts = [(j, 1.0)]
                off = lo
        elif lo <= 0 <= hi:
            # split around zero keeps homogeneous rows homogeneous
            parts = []
            if hi > 0:
                bound_rows.append((len(cols), hi))
                parts.append((j, 1.0))
            if lo < 0:
                bound_rows.append((len(cols) + len(parts), -lo))
                parts.append((j, -1.0))
            off = 0.0
        elif lo > 0:
            parts = [(j, 1.0)]
            off = lo
            bound_rows.append((len(cols), hi - lo))
        else:
            parts = [(j, -1.0)]
            off = hi
            bound_rows.append((len(cols), hi - lo))
        offsets[j] = off
        start = len(cols)
        cols.extend(parts)
        recover.append((off, [(start + i, s) for i, (_, s) in enumerate(parts)]))
    ns = len(cols)
    S = np.zeros((n, ns))
    for k, (j, s) in enumerate(cols):
        S[j, k] = s
    rows_A, rows_b, rels = [], [], []
    for a, rel, b in p.rows:
        rows_A.append(a @ S)
        rows_b.append(b - a @ offsets)
        rels.append(rel)
    for k, ub in bound_rows:
        e = np.zeros(ns)
        e[k] = 1.0
        rows_A.append(e)
        rows_b.append(ub)
        rels.append("<=")
    m = len(rows_A)
    A = np.array(rows_A).reshape(m, ns)
    b = np.array(rows_b, dtype=float)
    n_slack = sum(1 for r in rels if r != "=")
    full = np.zeros((m, ns + n_slack))
    full[:, :ns] = A
    basis0 = -np.ones(m, dtype=int)
    k = ns
    for i, rel in enumerate(rels):
        if rel == "<=":
            full[i, k] = 1.0
            if b[i] >= 0:
                basis0[i] = k
            k += 1
        elif rel == ">=":
            full[i, k] = -1.0
            if b[i] <= 0:
                basis0[i] = k
            k += 1
    neg = b < 0
    full[neg] *= -1.0
    b[neg] *= -1.0
    # after the sign flip, slack columns recorded in basis0 carry +1 in their row
    c = np.zeros(full.shape[1])
    sign = -1.0 if p.maximize else 1.0
    c[:ns] = sign * (p.objective @ S)
    return _Standard(full, b, c, recover, basis0)


class _Tableau:
    def __init__(self, A, b, basis, tol):
        self.A0, self.b0 = A, b
        self.basis = basis.copy()
        self.tol = tol
        self.refactor()

    def refactor(self):
        B = self.A0[:, self.basis]
        self.T = np.linalg.solve(B, np.hstack([self.A0, self.b0[:, None]]))
        self.T[np.abs(self.T) < 1e-14] = 0.0
        rhs = self.T[:, -1]
        rhs[rhs < 0] = np.where(rhs[rhs < 0] > -self.tol, 0.0, rhs[rhs < 0])

    def pivot(self, r, c):
        T = self.T
        row = T[r] / T[r, c]
        col = T[:, c].copy()
        T -= np.outer(col, row)
        T[r] = row
        self.basis[r] = c

    def run(self, cost, allowed, max_iter, stall, refactor_every, it0=0):
        """Minimise cost . x over the current basis; returns (status, iterations)."""
        it = it0
        best = math.inf
        since = 0
        bland = False
        while True:
            if it - it0 >= max_iter:
                return "stalled", it
            cb = cost[self.basis]
            red = cost - cb @ self.T[:, :-1]
            red[~allowed] = 0.0
            red[self.basis] = 0.0
            obj = float(cb @ self.T[:, -1])
            if obj < best - 1e-12 * max(1.0, abs(best) if math.isfinite(best) else 1.0):
                best, since, bland = obj, 0, False
            else:
                since += 1
                if since > stall:
                    bland = True
            cand = np.nonzero(red < -self.tol)[0]
            if cand.size == 0:
                return "optimal", it
            col = int(cand[0]) if bland else int(cand[np.argmin(red[cand])])
            a = self.T[:, col]
            pos = a > self.tol
            if not np.any(pos):
                return "unbounded", it
            ratios = np.full(a.shape, math.inf)
            ratios[pos] = self.T[pos, -1] / a[pos]
            rmin = ratios.min()
            ties = np.nonzero(ratios <= rmin + 1e-12 * max(1.0, rmin))[0]
            if bland:
                r = int(ties[np.argmin(self.basis[ties])])
            else:
                # among ties prefer the largest pivot element for stability
                r = int(ties[np.argmax(a[ties])])
            self.pivot(r, col)
            it += 1
            if (it - it0) % refactor_every == 0:
                self.refactor()

    def perturb(self, eps: float, rng):
        """Lift every basic value by eps * U[1, 2] through a matching change of
        the right-hand side, so degenerate vertices become nondegenerate."""
        lift = eps * (1.0 + rng.random(self.basis.size))
        self.b0 = self.b0 + self.A0[:, self.basis] @ lift
        self.refactor()

    def set_rhs(self, b):
        self.b0 = b
        self.refactor()

    def dual_run(self, cost, allowed, max_iter, it0=0):
        """Dual simplex from a basis with nonnegative reduced costs."""
        it = it0
        while True:
            if it - it0 >= max_iter:
                return "stalled", it
            rhs = self.T[:, -1]
            r = int(np.argmin(rhs))
            if rhs[r] >= -self.tol:
                return "optimal", it
            cb = cost[self.basis]
            red = cost - cb @ self.T[:, :-1]
            row = self.T[r, :-1]
            ok = allowed & (row < -self.tol)
            ok[self.basis] = False
            if not np.any(ok):
                return "infeasible", it
            cand = np.nonzero(ok)[0]
            ratios = np.maximum(red[cand], 0.0) / -row[cand]
            j = int(cand[np.argmin(ratios)])
            self.pivot(r, j)
            it += 1


def solve_lp(p: LPProblem, *, tol: float = 1e-9, max_iter: int = 50_000, stall: int = 50,
             refactor: int = 100, perturbation: float = 1e-7, feas_tol: float = 1e-7) -> LPOutcome:
    """Two-phase primal simplex on a perturbed right-hand side, followed by
    dual-simplex cleanup on the exact one.  Deterministic for a given input.

    ``tol`` is the pivoting tolerance; a returned point violating a row by
    more than ``feas_tol`` (relative to max(1, |rhs|)) is reported as stalled.
    """
    std = _standardise(p)
    A, b = std.A, std.b
    m, n = A.shape
    n_orig = p.objective.size
    if m == 0:
        # only sign constraints: the optimum sits at a vertex of the box
        x = np.array([(hi if (ci > 0) == p.maximize else lo) if ci != 0 else (0.0 if lo <= 0 <= hi else lo)
                      for ci, (lo, hi) in zip(p.objective, p.bounds)])
        if not np.all(np.isfinite(x)):
            return LPOutcome("unbounded", math.inf if p.maximize else -math.inf, x, 0)
        return LPOutcome("optimal", float(p.objective @ x), x, 0)
    rng = np.random.default_rng(12345)
    eps = perturbation * max(1.0, float(np.max(np.abs(b))))
    need = np.nonzero(std.basis0 < 0)[0]
    n_art = need.size
    Afull = np.hstack([A, np.zeros((m, n_art))])
    basis = std.basis0.copy()
    for k, i in enumerate(need):
        Afull[i, n + k] = 1.0
        basis[i] = n + k
    tab = _Tableau(Afull, b, basis, tol)
    it = 0

    def phase(cost, allowed, it):
        tab.perturb(eps, rng)
        status, it = tab.run(cost, allowed, max_iter, stall, refactor, it0=it)
        tab.set_rhs(b)
        if status != "optimal":
            return status, it
        return tab.dual_run(cost, allowed, max_iter, it0=it)

    if n_art:
        cost1 = np.zeros(n + n_art)
        cost1[n:] = 1.0
        status, it = phase(cost1, np.ones(n + n_art, dtype=bool), it)
        if status != "optimal":
            return LPOutcome("stalled", math.nan, np.full(n_orig, math.nan), it, notes=f"phase 1 {status}")
        infeas = float(cost1[tab.basis] @ tab.T[:, -1])
        if infeas > tol * max(1.0, float(np.max(np.abs(b)))):
            return LPOutcome("infeasible", math.nan, np.full(n_orig, math.nan), it,
                             notes=f"phase-1 residual {infeas:.3e}")
        # drive remaining artificials out of the basis where possible
        for r in range(m):
            if tab.basis[r] >= n:
                row = tab.T[r, :n]
                nz = np.nonzero(np.abs(row) > 1e-9)[0]
                if nz.size:
                    tab.pivot(r, int(nz[np.argmax(np.abs(row[nz]))]))
        tab.refactor()
    cost2 = np.zeros(n + n_art)
    cost2[:n] = std.c
    allowed = np.zeros(n + n_art, dtype=bool)
    allowed[:n] = True
    status, it = phase(cost2, allowed, it)
    xs = np.zeros(n + n_art)
    xs[tab.basis] = tab.T[:, -1]
    x = np.array([off + sum(s * xs[k] for k, s in parts) for off, parts in std.recover])
    viol = _violation(p, x)
    value = float(p.objective @ x)
    if status == "unbounded":
        return LPOutcome("unbounded", math.inf if p.maximize else -math.inf, x, it)
    if status == "infeasible":
        return LPOutcome("infeasible", math.nan, np.full(n_orig, math.nan), it, notes="dual cleanup")
    if status == "stalled":
        return LPOutcome("stalled", value, x, it, viol)
    if viol > feas_tol:
        return LPOutcome("stalled", value, x, it, viol, f"solution violates constraints by {viol:.3e}")
    return LPOutcome("optimal", value, x, it, viol)


def _violation(p: LPProblem, x: np.ndarray) -> float:
    worst = 0.0
    for a, rel, b in p.rows:
        v = float(a @ x) - b
        scale = max(1.0, abs(b))
        if rel == "<=":
            worst = max(worst, v / scale)
        elif rel == ">=":
            worst = max(worst, -v / scale)
        else:
            worst = max(worst, abs(v) / scale)
    for xi, (lo, hi) in zip(x, p.bounds):
        worst = max(worst, lo - xi, xi - hi)
    return worst
