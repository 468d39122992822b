"""Lattice sums, Poisson summation checks, Vaaler interpolation and the
periodisation of bandlimited functions to the torus.

Lattice sums are exact on a near range and closed analytically beyond it:
when f has a rational-trigonometric tail sum c cos(w x)/(x^2 - b^2) the far
terms split into residue classes on which the cosine is constant, and each
class is a rational series summed by Euler-Maclaurin.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .certificates import CertificateResult
from .funcrep import FunctionSpec, TailModel, decay_radius, evaluate, support_radius, tail_model
from .signtools import last_sign_change
from .transforms import fourier_transform

__all__ = [
    "LatticeSum",
    "lattice_sum",
    "PoissonSides",
    "poisson_sides",
    "poisson_residual",
    "NotBandlimited",
    "bandlimited_certificate",
    "lattice_samples",
    "vaaler_interpolate",
    "TorusPolynomial",
    "TorusMetrics",
    "periodize",
    "torus_metrics",
]

# Bernoulli numbers B_2, B_4, B_6, B_8 over (2k)!
_EM = ((1.0 / 6) / 2, (-1.0 / 30) / 24, (1.0 / 42) / 720, (-1.0 / 30) / 40320)


class NotBandlimited(ValueError):
    pass


@dataclass(frozen=True)
class LatticeSum:
    value: float
    error: float
    near_terms: int


def _rational_period(phi: float, max_den: int = 256) -> int | None:
    # smallest q with phi * q a multiple of 2 pi, if phi / 2 pi is a small-denominator rational
    t = phi / (2.0 * math.pi)
    fr = Fraction(t).limit_denominator(max_den)
    if abs(float(fr) - t) > 1e-13 * max(1.0, abs(t)):
        return None
    return fr.denominator


def _em_rational(A: float, B: float, b: float) -> tuple[float, float]:
    """sum_{i >= 0} 1 / ((A + B i)^2 - b^2) for A > b >= 0, B > 0."""
    if b == 0.0:
        integral = 1.0 / (A * B)
        derivs = [(-1) ** m * math.factorial(m + 1) * B**m * A ** (-m - 2) for m in (1, 3, 5, 7)]
        h0 = 1.0 / (A * A)
    else:
        lo, hi = A - b, A + b
        integral = math.log1p(2.0 * b / lo) / (2.0 * b * B)
        derivs = [
            (-1) ** m * math.factorial(m) * B**m * (lo ** (-m - 1) - hi ** (-m - 1)) / (2.0 * b)
            for m in (1, 3, 5, 7)
        ]
        h0 = 1.0 / (lo * hi)
    total = integral + 0.5 * h0 - sum(c * dv for c, dv in zip(_EM, derivs))
    # the first omitted term is of the size of the last one kept times (B/A)^2
    err = abs(_EM[-1] * derivs[-1]) * (B / A) ** 2 + 1e-16 * abs(total)
    return total, err


def _tail_sum(model: TailModel, alpha: float, beta: float, theta: float, n0: int) -> tuple[float, float]:
    """sum_{m >= n0} F(alpha m + beta) cos(theta m), F given by ``model``
    (requires alpha n0 + beta >= model.start)."""
    total, err = 0.0, 0.0
    for c, w, b in model.terms:
        for phi in (w * alpha + theta, w * alpha - theta):
            q = _rational_period(phi)
            if q is None:
                # incommensurate phase: bound the class sum by the envelope
                x0 = alpha * n0 + beta
                err += 0.5 * abs(c) * (1.0 / (alpha * (x0 - b)) + 1.0 / ((x0 - b) * (x0 + b)))
                continue
            for j in range(q):
                m0 = n0 + j
                phase = math.cos(phi * m0 + w * beta)
                if abs(phase) < 1e-15:
                    continue
                s, e = _em_rational(alpha * m0 + beta, alpha * q, b)
                total += 0.5 * c * phase * s
                err += 0.5 * abs(c) * e
    return total, err


def lattice_sum(F: FunctionSpec, alpha: float, beta: float = 0.0, theta: float = 0.0, N: int = 100_000) -> LatticeSum:
    """sum over n in Z of F(alpha n + beta) cos(theta n), one-dimensional.

    Terms with |n| <= N are summed directly (in order of increasing |n|); the
    rest come from the tail model or vanish past the support/decay radius.
    """
    if F.dim != 1:
        raise ValueError("lattice sums are implemented on the line")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    model = tail_model(F)
    if model is None:
        dr = decay_radius(F)
        if not math.isfinite(dr):
            raise ValueError("non-summable or unmodelled tail")
        model = TailModel(dr)
    if not model.terms:
        N = int(math.ceil((model.start + abs(beta)) / alpha)) + 1
    N = max(N, int(math.ceil((model.start + abs(beta)) / alpha)) + 1)
    n = np.concatenate([[0], np.stack([np.arange(1, N + 1), -np.arange(1, N + 1)], axis=1).ravel()])
    terms = evaluate(F, alpha * n + beta) * np.cos(theta * n)
    near = math.fsum(terms.tolist())
    err = 1e-16 * float(np.sum(np.abs(terms)))
    if model.terms:
        up, e1 = _tail_sum(model, alpha, beta, theta, N + 1)
        dn, e2 = _tail_sum(model, alpha, -beta, theta, N + 1)
        near += up + dn
        err += e1 + e2
    return LatticeSum(near, err, int(n.size))


@dataclass(frozen=True)
class PoissonSides:
    lhs: float
    rhs: float
    residual: float
    error: float


def poisson_sides(f: FunctionSpec, alpha: float, beta: float, N: int = 100_000) -> PoissonSides:
    """Both sides of alpha sum_n f(alpha n + beta) = sum_k fhat(k/alpha) e^(2 pi i beta k/alpha)."""
    fh = fourier_transform(f)
    left = lattice_sum(f, alpha, beta, 0.0, N)
    right = lattice_sum(fh, 1.0 / alpha, 0.0, 2.0 * math.pi * beta / alpha, N)
    lhs = alpha * left.value
    return PoissonSides(lhs, right.value, abs(lhs - right.value), alpha * left.error + right.error)


def poisson_residual(f: FunctionSpec, alpha: float, beta: float, N: int = 100_000) -> float:
    """|LHS - RHS| of the dilated and shifted Poisson summation formula."""
    return poisson_sides(f, alpha, beta, N).residual


def bandlimited_certificate(f: FunctionSpec, r_claimed: float | None = None, n_beta: int = 65,
                            n_terms: int = 1000, tol: float = 1e-9) -> CertificateResult:
    """For f in A_+(1) with supp fhat in [-1/2, 1/2]: on beta in [r, 1] the
    sum over n of f((2n+1) beta) equals fhat(0)/(2 beta) <= 0 while every term
    has |(2n+1) beta| >= r and so is >= 0.  Checks both facts on a beta grid;
    together they force f to vanish at every (2n+1) beta.
    """
    if f.dim != 1:
        raise ValueError("the odd-lattice certificate is one-dimensional")
    fh = fourier_transform(f)
    a = support_radius(fh)
    if not a <= 0.5 + 1e-12:
        raise NotBandlimited(f"fhat must be supported in [-1/2, 1/2]; support radius {a}")
    r = last_sign_change(f).radius if r_claimed is None else float(r_claimed)
    lo = min(max(r, 1e-6), 1.0)
    betas = np.linspace(lo, 1.0, n_beta) if lo < 1.0 else np.array([1.0])
    fh0 = float(evaluate(fh, 0.0))
    worst_sum, worst_term, worst_beta = -math.inf, 0.0, 1.0
    n = np.arange(-n_terms, n_terms)
    for beta in betas:
        s = lattice_sum(f, 2.0 * beta, beta)
        if s.value > worst_sum:
            worst_sum, worst_beta = s.value, float(beta)
        worst_term = max(worst_term, float(np.max(np.abs(evaluate(f, (2 * n + 1) * beta)))))
    margin = tol - max(worst_sum, worst_term)
    notes = [f"fhat(0)={fh0:.3e}", f"max sum {worst_sum:.3e} at beta={worst_beta:.4f}",
             f"max |f((2n+1)beta)| {worst_term:.3e}"]
    if margin > 0 and lo < 1.0:
        notes.append(f"forced vanishing on [{lo:.6f}, 1]: a nonzero bandlimited f cannot have r(f) < 1")
    return CertificateResult("odd_lattice_vanishing", margin > 0, margin,
                             {"r": r, "n_beta": int(betas.size), "tol": tol}, "; ".join(notes))


# ---------------------------------------------------------------------------
# Vaaler interpolation


def lattice_samples(f: FunctionSpec, a: float, b: float, nodes, h: float = 1e-3) -> tuple[dict, dict]:
    """Samples g(n) = f(a n + b) and g'(n) by an 8th-order central difference."""
    nodes = np.asarray(nodes)
    x = a * nodes + b
    w = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])
    offs = np.arange(-4, 5) * h
    vals = evaluate(f, x[:, None] + offs[None, :])
    dg = a * (vals @ w) / h
    return dict(zip(nodes.tolist(), vals[:, 4].tolist())), dict(zip(nodes.tolist(), dg.tolist()))


def vaaler_interpolate(values: dict, derivatives: dict, truncation: int | None = None):
    """g(x) = sum g(m) sinc^2(x - m) + sum g'(n) (x - n) sinc^2(x - n).

    This is (sin(pi x)/pi)^2 (sum g(m)/(x-m)^2 + sum g'(n)/(x-n)) with the
    node limits built in.  ``truncation`` keeps nodes with |n| <= truncation.
    """
    def keep(d):
        items = sorted((int(k), float(v)) for k, v in d.items() if v != 0.0)
        if truncation is not None:
            items = [(k, v) for k, v in items if abs(k) <= truncation]
        return (np.array([k for k, _ in items], dtype=float), np.array([v for _, v in items]))

    mv, gv = keep(values)
    md, gd = keep(derivatives)

    def g(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        if mv.size:
            t = x[..., None] - mv
            out = out + np.sinc(t) ** 2 @ gv
        if md.size:
            t = x[..., None] - md
            out = out + (t * np.sinc(t) ** 2) @ gd
        return out

    return g


# ---------------------------------------------------------------------------
# torus


@dataclass
class TorusPolynomial:
    """Even trigonometric polynomial g(x) = sum ghat(n) e^(2 pi i n.x) on T^d."""

    dim: int
    indices: np.ndarray  # (M, d) integers
    values: np.ndarray  # (M,)
    tail_bound: float = 0.0  # sup-norm bound on the discarded coefficients
    notes: str = ""

    def __post_init__(self):
        self.indices = np.asarray(self.indices, dtype=np.int64).reshape(-1, self.dim)
        self.values = np.asarray(self.values, dtype=float).ravel()
        if self.indices.shape[0] != self.values.size:
            raise ValueError("indices and values differ in length")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("non-finite coefficient")
        a = np.lexsort(self.indices.T[::-1])
        b = np.lexsort((-self.indices).T[::-1])
        if not (np.array_equal(self.indices[a], -self.indices[b]) and np.allclose(self.values[a], self.values[b], rtol=0, atol=0)):
            raise ValueError("coefficients must be even under n -> -n")

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float).reshape(-1, self.dim))
        out = np.empty(x.shape[0])
        for i in range(0, x.shape[0], 64):
            ph = 2.0 * math.pi * x[i:i + 64] @ self.indices.T
            out[i:i + 64] = np.cos(ph) @ self.values
        return out

    def to_dict(self) -> dict:
        return {"dim": self.dim, "entries": [[n.tolist(), float(v)] for n, v in zip(self.indices, self.values)]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, obj: dict) -> "TorusPolynomial":
        d = int(obj["dim"])
        ent = obj["entries"]
        idx = np.array([e[0] for e in ent], dtype=np.int64).reshape(-1, d)
        return cls(d, idx, np.array([e[1] for e in ent], dtype=float))

    def grid_values(self, M: int) -> np.ndarray:
        """g at the points j/M, j in {0..M-1}^d, exactly, by folding and FFT."""
        flat = np.ravel_multi_index(tuple((self.indices % M).T), (M,) * self.dim)
        folded = np.bincount(flat, weights=self.values, minlength=M**self.dim).reshape((M,) * self.dim)
        return np.real(np.fft.ifftn(folded)) * M**self.dim


def _tail_envelope_sum(model: TailModel, lam: float, K: int) -> float:
    # 2 sum_{k > K} env(lam k) <= 2 int_K^inf env(lam t) dt for the decreasing envelope
    tot = 0.0
    for c, _, b in model.terms:
        x = lam * K
        tot += abs(c) * (math.log1p(2 * b / (x - b)) / (2 * b * lam) if b else 1.0 / (lam * x))
    return 2.0 * tot


def periodize(f: FunctionSpec, lam: float, s: int, K: int | None = None, rel_cut: float = 1e-14) -> TorusPolynomial:
    """Torus polynomial with ghat(k) = s f(lam |k|), i.e. g = s fhat_lam.

    Requires supp(fhat(. / lam)) inside (-1/2, 1/2)^d, i.e. 2 a lam < 1 for
    supp fhat in the ball of radius a.  Coefficients are cut where
    |f(lam k)| < rel_cut max|f| or at |k_i| <= K; the discarded absolute sum
    is recorded as ``tail_bound``.
    """
    if s not in (1, -1):
        raise ValueError("s must be +1 or -1")
    if not lam > 0:
        raise ValueError("lam must be positive")
    d = f.dim
    fh = fourier_transform(f)
    a = support_radius(fh)
    if not math.isfinite(a):
        raise NotBandlimited("periodisation needs a bandlimited function")
    if not 2.0 * a * lam < 1.0:
        raise ValueError(f"aliasing: 2 a lam = {2 * a * lam} >= 1")
    model = tail_model(f)
    dr = decay_radius(f, eps=rel_cut)
    default_cap = {1: 2**20, 2: 256, 3: 48}.get(d, 12)
    if math.isfinite(dr):
        Kc = int(math.ceil(dr / lam)) + 1
        K = min(Kc, K or Kc)
        tail = 0.0 if K >= Kc else math.inf
    else:
        if d != 1 or model is None or not model.terms:
            raise ValueError("coefficients are not absolutely summable at this dimension")
        K = K or default_cap
        K = max(K, int(math.ceil(model.start / lam)) + 1)
        tail = _tail_envelope_sum(model, lam, K)
    axis = np.arange(-K, K + 1)
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    idx = np.stack([g.ravel() for g in grids], axis=1)
    # radial: evaluate once per distinct |k|^2
    sq, inv = np.unique(np.sum(idx * idx, axis=1), return_inverse=True)
    vals = s * evaluate(f, lam * np.sqrt(sq.astype(float)))[inv.ravel()]
    if math.isfinite(dr):
        keep = np.abs(vals) >= rel_cut * np.max(np.abs(vals))
        tail += float(np.sum(np.abs(vals[~keep])))
        idx, vals = idx[keep], vals[keep]
    if not math.isfinite(tail):
        raise ValueError("truncation K below the decay radius with no tail estimate")
    return TorusPolynomial(d, idx, vals, tail,
                           f"periodised with lam={lam}, s={s:+d}, |k_i| <= {K}; abs sum {np.sum(np.abs(vals)):.6e}")


@dataclass
class TorusMetrics:
    r_torus: float
    k_s: int
    product: float
    radius_tolerance: float
    value_tolerance: float
    notes: str = ""

    def __iter__(self):
        return iter((self.r_torus, self.k_s, self.product))

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("r_torus", "k_s", "product", "radius_tolerance", "value_tolerance", "notes")}


def _k_s(g: TorusPolynomial, s: int) -> int:
    scale = float(np.max(np.abs(g.values))) if g.values.size else 0.0
    neg = s * g.values < -1e-15 * scale
    if not np.any(neg):
        return 1
    norms = np.sqrt(np.sum(g.indices[neg].astype(float) ** 2, axis=1))
    return int(math.floor(float(np.max(norms)) + 1e-12)) + 1


def torus_metrics(g: TorusPolynomial, s: int, grid: int | None = None, seed: int = 0,
                  samples: int = 1 << 16) -> TorusMetrics:
    """r(g; T^d) = inf{r : g >= 0 on r <= |x| <= sqrt(d)/2} and
    k_s = min{k >= 1 : s ghat(n) >= 0 for |n| >= k}.

    Values within the coefficient-truncation bound (plus rounding) of zero
    count as nonnegative; d = 1 refines the last negative grid cell by
    bisection on the exact trigonometric sum.
    """
    d = g.dim
    k = _k_s(g, s)
    vtol = g.tail_bound + 64 * np.finfo(float).eps * float(np.sum(np.abs(g.values)))
    rmax = math.sqrt(d) / 2.0
    if d <= 3:
        M = grid or {1: 1 << 14, 2: 512, 3: 96}[d]
        vals = g.grid_values(M)
        j = np.arange(M)
        wrap = np.minimum(j, M - j) / M
        norms = np.sqrt(sum(np.meshgrid(*([wrap ** 2] * d), indexing="ij")))
        neg = vals < -vtol
        if not np.any(neg):
            return TorusMetrics(0.0, k, 0.0, 1.0 / M, vtol, f"grid {M}^{d}: g >= -{vtol:.1e} everywhere")
        r_neg = float(np.max(norms[neg]))
        rtol = math.sqrt(d) / M
        if d == 1:
            lo, hi = r_neg, min(r_neg + 1.0 / M, 0.5)
            if g(np.array([hi]))[0] < -vtol:
                lo = hi
            else:
                while hi - lo > 1e-11:
                    mid = 0.5 * (lo + hi)
                    if g(np.array([mid]))[0] < -vtol:
                        lo = mid
                    else:
                        hi = mid
            r_neg, rtol = hi, hi - lo
        r_t = min(r_neg, rmax)
        note = f"grid {M}^{d}"
    else:
        rng = np.random.default_rng(seed)
        x = rng.uniform(-0.5, 0.5, size=(samples, d))
        vals = g(x)
        neg = vals < -vtol
        r_t = float(np.max(np.linalg.norm(x[neg], axis=1))) if np.any(neg) else 0.0
        rtol = math.nan
        note = f"{samples} random samples (seed {seed}); radius is a sampled lower estimate"
    return TorusMetrics(r_t, k, r_t * k, rtol, vtol, note)
