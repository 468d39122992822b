"""Adaptive Gauss-Kronrod quadrature for scalar- or vector-valued integrands."""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

__all__ = ["QuadratureResult", "QuadratureError", "gauss_kronrod", "gauss_legendre", "integrate_piecewise"]

# 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15 tables)
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_KW = np.concatenate([_WK[:-1], _WK[::-1]])
_GW = np.zeros(15)
_GW[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


class QuadratureError(RuntimeError):
    """Raised when adaptive refinement fails to reach the requested tolerance."""


@dataclass(frozen=True)
class QuadratureResult:
    value: float | np.ndarray
    error_estimate: float
    evaluations: int
    rigorous: bool = False

    def __iter__(self):
        return iter((self.value, self.error_estimate))


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _rule(f, a, b):
    # apply G7/K15 to a batch of intervals at once
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    y = np.asarray(f(x.ravel()), dtype=float)
    y = y.reshape(x.shape + y.shape[1:])
    kron = np.tensordot(_KW, np.moveaxis(y, 1, 0), axes=1) * _bcast(half, y.ndim - 1)
    gauss = np.tensordot(_GW, np.moveaxis(y, 1, 0), axes=1) * _bcast(half, y.ndim - 1)
    err = np.abs(kron - gauss)
    if err.ndim > 1:
        err = err.reshape(err.shape[0], -1).max(axis=1)
    return kron, err


def _bcast(v, extra):
    return v.reshape(v.shape + (1,) * (extra - 1)) if extra > 1 else v


def gauss_kronrod(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    *,
    abs_tol: float = 1e-12,
    rel_tol: float = 1e-12,
    breakpoints=(),
    max_intervals: int = 4000,
    initial: int = 1,
    strict: bool = True,
) -> QuadratureResult:
    """Adaptive G7/K15 integration of ``f`` over [a, b].

    ``f`` maps a 1-D array of nodes to an array whose first axis matches the
    nodes; trailing axes give a vector-valued integral whose error is measured
    in the max norm.  An infinite upper limit is mapped to [0, 1) by
    x = a + t/(1-t).  Breakpoints split the initial partition.
    """
    if not (math.isfinite(a)):
        raise ValueError("lower limit must be finite")
    if math.isinf(b):
        g = f

        def f(t, g=g, a=a):  # noqa: E731
            t = np.asarray(t)
            x = a + t / (1.0 - t)
            jac = 1.0 / (1.0 - t) ** 2
            y = np.asarray(g(x), dtype=float)
            return y * jac.reshape(jac.shape + (1,) * (y.ndim - 1))

        pts = sorted({0.0, 1.0} | {(p - a) / (1.0 + p - a) for p in breakpoints if a < p})
        lo, hi = 0.0, 1.0
    else:
        pts = sorted({a, b} | {p for p in breakpoints if a < p < b})
        lo, hi = a, b
    if hi == lo:
        return QuadratureResult(0.0, 0.0, 0)
    edges = []
    for p, q in zip(pts[:-1], pts[1:]):
        e = np.linspace(p, q, initial + 1)
        edges.extend(zip(e[:-1], e[1:]))
    left = np.array([e[0] for e in edges])
    right = np.array([e[1] for e in edges])
    vals, errs = _rule(f, left, right)
    evals = 15 * left.size
    heap = [(-errs[i], i) for i in range(left.size)]
    heapq.heapify(heap)
    store = {i: (left[i], right[i], vals[i], errs[i]) for i in range(left.size)}
    total = np.sum(vals, axis=0)
    total_err = float(np.sum(errs))
    nxt = left.size
    while True:
        scale = float(np.max(np.abs(total))) if np.ndim(total) else abs(float(total))
        if total_err <= max(abs_tol, rel_tol * scale):
            break
        if len(store) >= max_intervals:
            if strict:
                raise QuadratureError(
                    f"no convergence after {len(store)} intervals: error {total_err:.3e}"
                )
            break
        # split the worst few intervals together to amortise the vectorised call
        batch = []
        while heap and len(batch) < 16:
            _, i = heapq.heappop(heap)
            batch.append(i)
        a_s = np.array([store[i][0] for i in batch])
        b_s = np.array([store[i][1] for i in batch])
        m_s = 0.5 * (a_s + b_s)
        if np.any(m_s <= a_s) or np.any(m_s >= b_s):
            if strict:
                raise QuadratureError("interval width underflow during refinement")
            break
        nv, ne = _rule(f, np.concatenate([a_s, m_s]), np.concatenate([m_s, b_s]))
        evals += 30 * len(batch)
        for j, i in enumerate(batch):
            _, _, v_old, e_old = store.pop(i)
            total = total - v_old
            total_err -= e_old
            for part, (lo_, hi_) in enumerate(((a_s[j], m_s[j]), (m_s[j], b_s[j]))):
                k = j + part * len(batch)
                store[nxt] = (lo_, hi_, nv[k], ne[k])
                total = total + nv[k]
                total_err += ne[k]
                heapq.heappush(heap, (-ne[k], nxt))
                nxt += 1
        # re-sum occasionally to keep the running totals honest
        if nxt % 512 < 32:
            total = np.sum([v[2] for v in store.values()], axis=0)
            total_err = float(sum(v[3] for v in store.values()))
    total = np.sum([v[2] for v in store.values()], axis=0)
    total_err = float(sum(v[3] for v in store.values()))
    value = float(total) if np.ndim(total) == 0 else total
    return QuadratureResult(value, total_err, evals)


def integrate_piecewise(f, edges, order: int = 32) -> tuple[np.ndarray, float]:
    """Fixed Gauss-Legendre rule on every cell of ``edges``; the error is the
    difference against a rule of half the order."""
    edges = np.asarray(edges, dtype=float)
    vals = []
    for n in (order, order // 2):
        x, w = gauss_legendre(n)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        y = np.asarray(f(nodes), dtype=float)
        y = y.reshape((mid.size, n) + y.shape[1:])
        wts = (half[:, None] * w[None, :])
        vals.append(np.tensordot(wts, y, axes=([0, 1], [0, 1])))
    err = float(np.max(np.abs(vals[0] - vals[1])))
    return vals[0], err
