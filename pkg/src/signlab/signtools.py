"""Sign structure of radial functions: the last sign change r(f), positive
mass inside a ball, superlevel measures, negative points and dilation
balancing.

Eventual nonnegativity is never assumed: ``tail_certificate`` produces a
radius R with f >= 0 on [R, inf) from catalog facts, a polynomial root bound
(eigen expansions) or a declared tail, and the scan only covers [0, R].
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .funcrep import (
    Combination,
    Convolution,
    DiracSym,
    DiracWeight,
    Dilation,
    EigenExpansion,
    FunctionSpec,
    Kind,
    NONNEG_KINDS,
    Product,
    SampledProfile,
    dilate,
    evaluate,
    l1_norm,
    support_radius,
)
from .special import ball_volume, basis_norms, jacobi_coefficients, laguerre_polys, sphere_area

__all__ = [
    "SignChangeReport",
    "MassReport",
    "TailCertificate",
    "NotEventuallyNonnegative",
    "TailNotCertified",
    "tail_certificate",
    "eigen_root_data",
    "sign_samples",
    "last_sign_change",
    "sigma_plus_mass",
    "superlevel_measure",
    "find_negative_point",
    "negative_point_bound",
    "balance_scale",
    "UnresolvedOscillationWarning",
]

EPS = np.finfo(float).eps


class NotEventuallyNonnegative(ValueError):
    pass


class TailNotCertified(ValueError):
    pass


class UnresolvedOscillationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class TailCertificate:
    radius: float
    argument: str  # closed-form-positivity | polynomial-root-bound | decay-bound
    constants: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SignChangeReport:
    radius: float
    brackets: list
    tail_argument: str
    tolerance: float
    tail_constants: dict = field(default_factory=dict)
    touches: list = field(default_factory=list)
    scan_radius: float = 0.0

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "brackets": [list(b) for b in self.brackets],
            "tail_argument": self.tail_argument,
            "tail_constants": self.tail_constants,
            "tolerance": self.tolerance,
            "touches": list(self.touches),
            "scan_radius": self.scan_radius,
        }


@dataclass(frozen=True)
class MassReport:
    sigma: float
    ratio: float
    r_used: float
    error_estimate: float = 0.0


# ---------------------------------------------------------------------------
# tail certificates


def _power_coefficients(d: int, c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # power-basis coefficients of p(u) = sum c_k L_k^(alpha)(u) / N_k, with a
    # rounding envelope for each coefficient
    alpha = 0.5 * d - 1.0
    K = c.size - 1
    norms = basis_norms(d, K)
    a = np.zeros(K + 1)
    env = np.zeros(K + 1)
    for k in np.nonzero(c)[0]:
        j = np.arange(k + 1)
        logmag = gammaln(k + alpha + 1) - gammaln(k - j + 1) - gammaln(alpha + j + 1) - gammaln(j + 1)
        term = c[k] * ((-1.0) ** j) * np.exp(logmag) / norms[k]
        a[: k + 1] += term
        env[: k + 1] += np.abs(term)
    return a, env * (K + 1) * EPS


def eigen_root_data(d: int, coeffs) -> dict:
    """Leading sign, real-root seeds and an upper bound on the roots of the
    polynomial part p(u), u = 2 pi r^2, of an eigen expansion."""
    c = np.array(coeffs, dtype=float)
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        return {"degree": 0, "leading_sign": 0, "root_bound_u": 0.0, "real_roots_u": np.array([])}
    K = int(nz[-1])
    c = c[: K + 1]
    lead = int(np.sign(c[K] * (-1) ** K))
    if K == 0:
        return {"degree": 0, "leading_sign": lead, "root_bound_u": 0.0, "real_roots_u": np.array([]),
                "cauchy_bound": 0.0, "gershgorin_bound": 0.0}
    a_pow, env = _power_coefficients(d, c)
    cauchy = 1.0 + float(np.max((np.abs(a_pow[:K]) + env[:K]) / (abs(a_pow[K]) - env[K])))
    diag, off = jacobi_coefficients(d, K)
    T = np.diag(diag[:K]) - np.diag(off[: K - 1], 1) - np.diag(off[: K - 1], -1)
    T[K - 1, :] += off[K - 1] * c[:K] / c[K]
    gersh = float(np.max(np.sum(np.abs(T), axis=1)))
    eig = np.linalg.eigvals(T)
    real = np.sort(eig.real[np.abs(eig.imag) <= 1e-6 * np.maximum(1.0, np.abs(eig.real))])
    return {
        "degree": K,
        "leading_sign": lead,
        "cauchy_bound": cauchy,
        "gershgorin_bound": gersh,
        "root_bound_u": min(cauchy, gersh),
        "real_roots_u": real,
    }


def tail_certificate(f: FunctionSpec) -> TailCertificate:
    """Radius R with f >= 0 on [R, inf), with the argument that proves it."""
    rep = f.rep
    if isinstance(rep, EigenExpansion):
        data = eigen_root_data(f.dim, rep.coeffs)
        if data["leading_sign"] < 0:
            raise NotEventuallyNonnegative("leading coefficient is negative: f is eventually negative")
        if data["leading_sign"] == 0:
            return TailCertificate(0.0, "closed-form-positivity", {"zero": True})
        ub = max(data["root_bound_u"], 0.0)
        return TailCertificate(
            math.sqrt(ub / (2.0 * math.pi)),
            "polynomial-root-bound",
            {"root_bound_u": ub, "cauchy": data["cauchy_bound"], "gershgorin": data["gershgorin_bound"],
             "degree": data["degree"]},
        )
    if isinstance(rep, SampledProfile):
        R = rep.radii[-1]
        if rep.tail.kind == "zero":
            return TailCertificate(R, "decay-bound", {"tail": "zero"})
        if rep.values[-1] < 0:
            raise NotEventuallyNonnegative("declared decay tail continues a negative sample")
        return TailCertificate(R, "decay-bound", {"tail": "decay", "c": rep.tail.c, "p": rep.tail.p})
    if rep.kind is not Kind.CUSTOM:
        a = rep.amplitude
        sup = support_radius(f)
        if a == 0.0:
            return TailCertificate(0.0, "closed-form-positivity", {"kind": rep.kind.value})
        if rep.kind in NONNEG_KINDS and a > 0:
            return TailCertificate(0.0, "closed-form-positivity", {"kind": rep.kind.value})
        if math.isfinite(sup):
            return TailCertificate(sup, "closed-form-positivity", {"kind": rep.kind.value, "support": sup})
        if rep.kind is Kind.BANDLIMITED and a > 0:
            return TailCertificate(1.0 / rep.dilation, "closed-form-positivity", {"kind": rep.kind.value})
        if rep.kind in NONNEG_KINDS or rep.kind is Kind.BANDLIMITED:
            raise NotEventuallyNonnegative(f"negative multiple of {rep.kind.value} is eventually negative")
        raise TailNotCertified(f"{rep.kind.value} changes sign at arbitrarily large radii")
    return _node_certificate(f, rep.expr)


def _globally_nonneg(f: FunctionSpec) -> bool:
    try:
        return tail_certificate(f).radius == 0.0
    except ValueError:
        return False


def _node_certificate(f: FunctionSpec, node) -> TailCertificate:
    if isinstance(node, Combination):
        R, parts = 0.0, []
        for c, g in node.terms:
            if c > 0:
                try:
                    cert = tail_certificate(g)
                    R = max(R, cert.radius)
                    parts.append(cert.argument)
                    continue
                except NotEventuallyNonnegative:
                    pass
            sup = support_radius(g)
            if math.isfinite(sup):
                R = max(R, sup)
                parts.append("compact-support")
                continue
            if c < 0:
                try:
                    neg = tail_certificate(g)
                except ValueError:
                    neg = None
                if neg is not None and neg.radius == 0.0 and _globally_nonneg(g):
                    raise TailNotCertified("a negative multiple of a positive non-compact term may dominate the tail")
            raise TailNotCertified("combination term without a tail argument; pass an explicit certificate")
        arg = "polynomial-root-bound" if "polynomial-root-bound" in parts else (
            "decay-bound" if "decay-bound" in parts else "closed-form-positivity")
        return TailCertificate(R, arg, {"terms": parts})
    if isinstance(node, Dilation):
        cert = tail_certificate(node.spec)
        return TailCertificate(cert.radius / node.factor, cert.argument, cert.constants)
    if isinstance(node, Product):
        cands = []
        for a, b in ((node.left, node.right), (node.right, node.left)):
            if _globally_nonneg(b):
                try:
                    cands.append(tail_certificate(a))
                except ValueError:
                    pass
            sup = support_radius(a)
            if math.isfinite(sup):
                cands.append(TailCertificate(sup, "closed-form-positivity", {"support": sup}))
        if not cands:
            raise TailNotCertified("product without a nonnegative or compact factor")
        return min(cands, key=lambda t: t.radius)
    if isinstance(node, Convolution):
        for a, b in ((node.left, node.right), (node.right, node.left)):
            sup = support_radius(b)
            if math.isfinite(sup) and _globally_nonneg(b):
                cert = tail_certificate(a)
                return TailCertificate(cert.radius + sup, cert.argument, dict(cert.constants, kernel_support=sup))
        raise TailNotCertified("convolution without a compact nonnegative factor")
    if isinstance(node, DiracSym):
        cert = tail_certificate(node.spec)
        return TailCertificate(cert.radius + node.x0, cert.argument, dict(cert.constants, shift=node.x0))
    if isinstance(node, DiracWeight):
        cert = tail_certificate(node.spec)
        return cert
    raise TailNotCertified(f"no tail rule for {type(node).__name__}")


# ---------------------------------------------------------------------------
# sign sampling


_SUP = {
    Kind.TENT: 1.0, Kind.SINC_SQ: 1.0, Kind.BANDLIMITED: 1.0, Kind.BANDLIMITED_HAT: 0.5 * math.pi,
    Kind.GAUSSIAN: 1.0, Kind.CHI: 1.0, Kind.BUMP: math.exp(-1.0),
}
_QUAD_KINDS = {Kind.BUMP_HAT, Kind.BUMP_AUTOCORR, Kind.BUMP_AUTOCORR_HAT}


@lru_cache(maxsize=64)
def _kind_scale(kind: Kind, d: int) -> float:
    if kind in _SUP:
        return _SUP[kind]
    if kind in (Kind.CHI_HAT, Kind.BALL_AUTOCORR):
        return ball_volume(d)
    if kind is Kind.BALL_AUTOCORR_HAT:
        return ball_volume(d) ** 2
    from .funcrep import _base

    return float(abs(_base(kind, d, np.zeros(1))[0]))


def _noise(f: FunctionSpec, x: np.ndarray) -> np.ndarray:
    """Rounding-level uncertainty of evaluate(f, x)."""
    rep = f.rep
    if isinstance(rep, EigenExpansion):
        c = np.abs(rep.array)
        K = int(np.nonzero(c)[0][-1]) if np.any(c) else 0
        from .special import eigen_basis

        return 64 * EPS * (np.abs(eigen_basis(f.dim, K, x)) @ c[: K + 1])
    if isinstance(rep, SampledProfile):
        return np.full_like(x, 64 * EPS * max(abs(v) for v in rep.values))
    if rep.kind is not Kind.CUSTOM:
        rel = 1e-12 if rep.kind in _QUAD_KINDS else 64 * EPS
        return np.full_like(x, rel * abs(rep.amplitude) * _kind_scale(rep.kind, f.dim))
    node = rep.expr
    if isinstance(node, Combination):
        return sum(abs(c) * _noise(g, x) for c, g in node.terms)
    if isinstance(node, Dilation):
        return _noise(node.spec, node.factor * x)
    if isinstance(node, Product):
        fl, fr = np.abs(evaluate(node.left, x)), np.abs(evaluate(node.right, x))
        return _noise(node.left, x) * fr + fl * _noise(node.right, x) + 64 * EPS * fl * fr
    if isinstance(node, DiracWeight):
        return 4.0 * _noise(node.spec, x)
    if isinstance(node, DiracSym):
        return 4.0 * np.max(_noise(node.spec, np.concatenate([x, x + node.x0])))
    # convolutions: quadrature-limited
    return np.full_like(x, 1e-11)


def sign_samples(f: FunctionSpec, x) -> tuple[np.ndarray, np.ndarray]:
    """(value, noise) at radii x.  Eigen expansions are evaluated through their
    polynomial part, rescaled per point, so the sign survives underflow of
    exp(-pi r^2)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    rep = f.rep
    if isinstance(rep, EigenExpansion):
        c = rep.array
        nz = np.nonzero(c)[0]
        if nz.size == 0:
            return np.zeros_like(x), np.zeros_like(x)
        K = int(nz[-1])
        q, _ = laguerre_polys(f.dim, K, 2.0 * math.pi * x * x)
        val = q @ c[: K + 1]
        noise = 64 * EPS * (np.abs(q) @ np.abs(c[: K + 1]))
        return val, noise
    return np.asarray(evaluate(f, x), dtype=float), _noise(f, x)


def _classify(f, x):
    v, n = sign_samples(f, x)
    s = np.where(v < -n, -1, np.where(v > n, 1, 0))
    return s, v


def _bisect(f, a: float, b: float, tol: float, sa: int, zero_as: int = 0) -> tuple[float, float]:
    # keep sign(f(a)) == sa and sign(f(b)) != sa
    while b - a > tol:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        sm = _classify(f, np.array([m]))[0][0]
        if sm == 0:
            sm = zero_as
        if sm == sa:
            a = m
        else:
            b = m
    return a, b


def _scan_grid(R: float, n: int, seeds=()) -> np.ndarray:
    if R <= 0:
        return np.array([0.0])
    uni = np.linspace(0.0, R, n)
    geo = np.geomspace(R * 1e-6, R, max(n // 4, 2))
    extra = []
    for s in seeds:
        if 0 < s < R:
            h = max(1e-7 * s, 1e-9)
            extra.extend((s - h, s, s + h))
    return np.unique(np.concatenate([uni, geo, np.array(extra, dtype=float)]))


def _crossings(x, s):
    """Brackets (a, b) between nonzero samples of opposite sign, and touches
    (zero runs flanked by equal signs)."""
    nz = np.nonzero(s)[0]
    brackets, touches = [], []
    for i, j in zip(nz[:-1], nz[1:]):
        if s[i] != s[j]:
            brackets.append((i, j))
        elif j > i + 1:
            touches.append(float(x[(i + j) // 2]))
    return brackets, touches


def last_sign_change(f: FunctionSpec, tol: float = 1e-9, grid: int = 4096, certificate: TailCertificate | None = None) -> SignChangeReport:
    """r(f) = inf{r : f >= 0 on |x| >= r}, with all isolated crossings in the
    scan window refined to ``tol`` by bisection."""
    cert = certificate or tail_certificate(f)
    R = cert.radius
    seeds = ()
    if isinstance(f.rep, EigenExpansion):
        roots = eigen_root_data(f.dim, f.rep.coeffs)["real_roots_u"]
        seeds = np.sqrt(np.maximum(roots[roots > 0], 0.0) / (2.0 * math.pi))
    x = _scan_grid(R, grid, seeds)
    s, v = _classify(f, x)
    if s[-1] < 0 and R > 0:
        raise NotEventuallyNonnegative(f"f({x[-1]:.6g}) = {v[-1]:.3e} < 0 at the certified radius")
    pairs, touches = _crossings(x, s)
    brackets = []
    for i, j in pairs:
        a, b = _bisect(f, float(x[i]), float(x[j]), tol, int(s[i]))
        brackets.append((a, b))
    neg = np.nonzero(s < 0)[0]
    if neg.size == 0:
        radius = 0.0
    else:
        i = int(neg[-1])
        # the first nonnegative sample after the last negative one
        j = i + 1
        a, b = _bisect(f, float(x[i]), float(x[j]), tol, -1)
        radius = b
        if not brackets or abs(brackets[-1][1] - b) > tol:
            brackets.append((a, b))
    return SignChangeReport(radius, brackets, cert.argument, tol, dict(cert.constants), touches, R)


def _sign_segments(f: FunctionSpec, r: float, grid: int, tol: float):
    """Partition [0, r] into maximal pieces of constant sign (zero samples join
    the nonnegative side); returns (edges, signs, oscillation_flag)."""
    x = np.linspace(0.0, r, grid)
    s, _ = _classify(f, x)
    s = np.where(s == 0, 1, s)
    edges, signs = [0.0], [int(s[0])]
    for i in range(1, x.size):
        if s[i] != s[i - 1]:
            a, b = _bisect(f, float(x[i - 1]), float(x[i]), tol, int(s[i - 1]), zero_as=1)
            edges.append(0.5 * (a + b))
            signs.append(int(s[i]))
    edges.append(r)
    runs = np.diff(np.nonzero(np.diff(s))[0])
    oscillating = bool(runs.size and np.min(runs) <= 1)
    return np.array(edges), np.array(signs), oscillating


def sigma_plus_mass(f: FunctionSpec, r: float, grid: int = 2048) -> MassReport:
    """sigma = int_{B_r} f_+ and its ratio to ||f||_1."""
    from .transforms import integrate

    if r < 0:
        raise ValueError("radius must be nonnegative")
    if r == 0:
        return MassReport(0.0, 0.0, 0.0)
    edges, signs, _ = _sign_segments(f, r, grid, 1e-13)
    total, err = 0.0, 0.0
    for a, b, sg in zip(edges[:-1], edges[1:], signs):
        if sg > 0 and b > a:
            res = integrate(f, "r^(d-1)", (a, b), positive_part=True)
            total += res.value
            err += res.error_estimate
    cst = sphere_area(f.dim)
    sigma = cst * total
    norm = l1_norm(f).value
    ratio = min(max(sigma / norm, 0.0), 1.0) if norm > 0 else 0.0
    return MassReport(sigma, ratio, r, cst * err)


def superlevel_measure(f: FunctionSpec, r: float, grid: int = 4096, tol: float = 1e-12) -> float:
    """|{x in B_r : f(x) >= 0}| from sign-bracketed shells."""
    if r <= 0:
        return 0.0
    edges, signs, osc = _sign_segments(f, r, grid, tol)
    if osc:
        warnings.warn("sign oscillation at grid resolution; measure may be off by a grid cell",
                      UnresolvedOscillationWarning, stacklevel=2)
    nu = ball_volume(f.dim)
    d = f.dim
    return float(sum(nu * (b ** d - a ** d) for a, b, sg in zip(edges[:-1], edges[1:], signs) if sg > 0))


def negative_point_bound(d: int, r: float) -> float:
    """(r^d - 1/(2 nu_d))^(1/d): the radius inside which a normalised
    self-dual f with f(0) = 0 must take a negative value."""
    v = r ** d - 1.0 / (2.0 * ball_volume(d))
    if v <= 0:
        raise ValueError("r^d <= 1/(2 nu_d): the bound is vacuous")
    return v ** (1.0 / d)


def find_negative_point(f: FunctionSpec, tol: float = 1e-9, grid: int = 4096, check_bound: bool = False,
                        window: float | None = None) -> tuple[float, float]:
    """Smallest located radius x0 with f(x0) < 0, and f(x0).

    The scan covers [0, r(f)], or [0, window] when given.  With
    ``check_bound`` the result is checked against negative_point_bound(d, r(f)),
    which holds for ||f||_1 = 1, fhat = f, f(0) = 0.
    """
    s0, _ = _classify(f, np.array([0.0]))
    if s0[0] < 0:
        return 0.0, float(evaluate(f, 0.0))
    R = window if window is not None else last_sign_change(f, tol=tol, grid=grid).radius
    if R <= 0:
        raise ValueError("no negative value on the scan window: f is nonnegative")
    x = np.linspace(0.0, R, grid)
    s, _ = _classify(f, x)
    neg = np.nonzero(s < 0)[0]
    if neg.size == 0:
        raise ValueError("no negative value on the scan window")
    i = int(neg[0])
    a, b = _bisect(f, float(x[i - 1]), float(x[i]), tol, 1, zero_as=1)
    x0 = b
    val = float(evaluate(f, x0))
    if check_bound:
        bound = negative_point_bound(f.dim, last_sign_change(f, tol=tol, grid=grid).radius)
        if x0 > bound + tol:
            raise AssertionError(f"negative point {x0:.9f} exceeds the bound {bound:.9f}")
    return x0, val


def balance_scale(f: FunctionSpec, tol: float = 1e-9) -> FunctionSpec:
    """f(lam .) with lam = sqrt(r(f) / r(fhat)), so that both radii equal
    sqrt(r(f) r(fhat))."""
    from .transforms import fourier_transform

    if isinstance(f.rep, EigenExpansion):
        return f
    r1 = last_sign_change(f, tol=tol).radius
    r2 = last_sign_change(fourier_transform(f), tol=tol).radius
    if r1 == 0.0 or r2 == 0.0:
        raise ValueError("already degenerate-balanced: r(f) or r(fhat) vanishes")
    lam = math.sqrt(r1 / r2)
    if abs(lam - 1.0) <= tol:
        return f
    return dilate(f, lam)
