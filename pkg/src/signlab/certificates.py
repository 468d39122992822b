"""Quantitative inequality checks.

Each check returns a :class:`CertificateResult` whose ``margin`` is a signed
slack (positive means satisfied).  The numerical ones are desk-scale sweeps
with heuristic quadrature errors, not interval-arithmetic proofs.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .funcrep import FunctionSpec, evaluate, l1_norm
from .quadrature import QuadratureResult, gauss_kronrod
from .signtools import last_sign_change, sigma_plus_mass
from .special import ball_volume, sphere_area
from .transforms import TransformError, integrate

__all__ = [
    "CertificateResult",
    "MomentDivergence",
    "second_moment",
    "second_moment_certificate",
    "positive_part_bound",
    "phi",
    "mass_inequality",
    "phi_contradiction",
    "rearrangement_bounds",
    "bathtub_radii",
    "BathtubSolution",
    "bathtub_minimize",
    "convexity_gap",
    "improvement_factor",
    "ball_integral_check",
]


@dataclass
class CertificateResult:
    name: str
    passed: bool
    margin: float
    inputs: dict = field(default_factory=dict)
    notes: str = ""

    def __post_init__(self):
        self.margin = float(self.margin)
        self.passed = bool(self.passed)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), default=float)


class MomentDivergence(ValueError):
    """The second moment of f is infinite, so the moment inequality has no content."""


# ---------------------------------------------------------------------------
# second moment


def second_moment(f: FunctionSpec) -> QuadratureResult:
    """omega_{d-1} int_0^inf r^(d+1) f(r) dr with its error estimate."""
    try:
        res = integrate(f, weight="r^(d+1)")
    except TransformError as exc:
        raise MomentDivergence(f"second-moment hypothesis fails: {exc}") from exc
    w = sphere_area(f.dim)
    return QuadratureResult(w * res.value, w * res.error_estimate, res.evaluations)


def second_moment_certificate(f: FunctionSpec, tol: float = 1e-8) -> CertificateResult:
    """Pass iff the second moment is <= tol (the sign forced on functions with
    fhat = s f, f(0) = 0 and s f >= 0 on a sequence of radii tending to 0)."""
    m = second_moment(f)
    return CertificateResult(
        "second_moment",
        m.value <= tol,
        tol - m.value,
        {"dim": f.dim},
        f"moment {m.value:.6e} +- {m.error_estimate:.1e}",
    )


# ---------------------------------------------------------------------------
# the one-dimensional +1 chain


def _sine_ratio(a: float, x: np.ndarray) -> np.ndarray:
    # sin(2 pi a x) / (pi x), with the limit 2a at x = 0
    x = np.asarray(x, dtype=float)
    return 2.0 * a * np.sinc(2.0 * a * x)


def positive_part_bound(r: float, x) -> np.ndarray | float:
    """Pointwise ceiling 1/2 + [sin(2 pi (r-1/4) x) - sin(2 pi r x)] / (pi x)
    for f_+ on [0, r]; equals 0 at x = 0."""
    if not (0.25 <= r <= 1.0 / math.sqrt(2.0) + 1e-15):
        raise ValueError(f"r must lie in [1/4, 1/sqrt(2)], got {r}")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0) or np.any(xa > r + 1e-15):
        raise ValueError("x must lie in [0, r]")
    out = 0.5 + _sine_ratio(r - 0.25, xa) - _sine_ratio(r, xa)
    return float(out) if np.ndim(out) == 0 else out


def phi(r: float, abs_tol: float = 1e-13) -> QuadratureResult:
    """Phi(r) = int_{1/4}^r (1/2 + [sin(2 pi (r-1/4) x) - sin(2 pi r x)] / (pi x)) dx."""
    if r < 0.25:
        raise ValueError("phi needs r >= 1/4")

    def integrand(x):
        return 0.5 + _sine_ratio(r - 0.25, x) - _sine_ratio(r, x)

    return gauss_kronrod(integrand, 0.25, r, abs_tol=abs_tol, rel_tol=0.0)


def mass_inequality(r: float, sigma: float) -> CertificateResult:
    """(r + 1/4) sigma (r + 1/4 - sigma) >= r / 8; margin = LHS - RHS."""
    if r <= 0 or sigma < 0:
        raise ValueError("need r > 0 and sigma >= 0")
    lhs = (r + 0.25) * sigma * (r + 0.25 - sigma)
    rhs = r / 8.0
    return CertificateResult("mass_inequality", lhs >= rhs, lhs - rhs, {"r": r, "sigma": sigma},
                             f"lhs={lhs:.6g} rhs={rhs:.6g}")


def phi_contradiction(r_low: float, r_high: float, sigma_bound: float, step: float = 1e-3) -> CertificateResult:
    """Pass iff Phi(r_high) <= sigma_bound and the mass inequality fails at
    sigma_bound for every r on a ``step`` grid of [r_low, r_high].

    Since the left side of the mass inequality increases in sigma below 1/4,
    failing at sigma_bound means failing for every admissible sigma(f).  If
    Phi is found non-monotone on the grid, each grid point is checked with its
    own bound Phi(r) instead.
    """
    if not (0.25 <= r_low <= r_high <= 1.0 / math.sqrt(2.0)):
        raise ValueError("need 1/4 <= r_low <= r_high <= 1/sqrt(2)")
    if sigma_bound < 0:
        raise ValueError("sigma_bound must be nonnegative")
    n = max(1, int(round((r_high - r_low) / step)))
    grid = np.linspace(r_low, r_high, n + 1)
    phis = np.array([phi(r).value for r in grid])
    monotone = bool(np.all(np.diff(phis) >= -1e-12))
    top = phi(r_high)
    phi_margin = sigma_bound - top.value
    notes = [f"Phi(r_high)={top.value:.12f} (err {top.error_estimate:.1e})"]
    if monotone:
        sig = np.full_like(grid, sigma_bound)
    else:
        notes.append("Phi not monotone on grid; using per-point bounds")
        sig = np.minimum(phis, sigma_bound)
    if sigma_bound >= 0.25:
        notes.append("sigma_bound >= 1/4: monotonicity in sigma not available")
    margins = np.array([mass_inequality(r, s).margin for r, s in zip(grid, sig)])
    worst = float(np.max(margins))
    notes.append(f"max mass-inequality margin {worst:.6e} at r={grid[int(np.argmax(margins))]:.4f}")
    margin = min(phi_margin, -worst, 0.25 - sigma_bound)
    return CertificateResult(
        "phi_contradiction",
        margin > 0,
        margin,
        {"r_low": r_low, "r_high": r_high, "sigma_bound": sigma_bound, "step": step},
        "; ".join(notes),
    )


def rearrangement_bounds(f: FunctionSpec, r: float | None = None) -> list[CertificateResult]:
    """Check the three one-dimensional rearrangement bounds for an
    L^1-normalised f with ||f||_inf <= 1:

    int_0^r y^2 f_+ >= sigma^3/3,  int_0^r y^2 f_- <= (r^3 - (r-1/4)^3)/3,
    int_r^inf y^2 f >= ((r + 1/4 - sigma)^3 - r^3)/3.
    """
    if f.dim != 1:
        raise ValueError("rearrangement bounds are one-dimensional")
    if r is None:
        r = last_sign_change(f).radius
    sigma = sigma_plus_mass(f, r).sigma / 2.0  # one half-line
    plus = integrate(f, weight="r^(d+1)", interval=(0.0, r), positive_part=True).value
    neg = plus - integrate(f, weight="r^(d+1)", interval=(0.0, r)).value
    try:
        outer = integrate(f, weight="r^(d+1)", interval=(r, math.inf)).value
    except TransformError:
        outer = math.inf
    out = [
        CertificateResult("rearrangement_plus", plus >= sigma**3 / 3 - 1e-12, plus - sigma**3 / 3, {"r": r}),
        CertificateResult("rearrangement_minus", neg <= (r**3 - (r - 0.25) ** 3) / 3 + 1e-12,
                          (r**3 - (r - 0.25) ** 3) / 3 - neg, {"r": r}),
    ]
    rhs3 = ((r + 0.25 - sigma) ** 3 - r**3) / 3
    out.append(CertificateResult("rearrangement_outer", outer >= rhs3 - 1e-12, outer - rhs3, {"r": r}))
    return out


# ---------------------------------------------------------------------------
# bathtub estimates


def bathtub_radii(d: int, r: float) -> tuple[float, float]:
    """Radii s < r < t with |B_r minus B_s| = |B_t minus B_r| = 1/2."""
    nu = ball_volume(d)
    h = 1.0 / (2.0 * nu)
    rd = r**d
    if not rd > h:
        raise ValueError("half-mass shell does not fit inside B_r")
    return (rd - h) ** (1.0 / d), (rd + h) ** (1.0 / d)


@dataclass
class BathtubSolution:
    """Minimiser 1_{h < s} + c 1_{h = s} of int g h over 0 <= g <= 1, int g = G."""

    s: float
    c: float
    below: float  # |{h < s}|
    level: float  # |{h = s}|
    value: float  # int g h
    radial_grid: np.ndarray
    weights: np.ndarray  # g on each cell of radial_grid (cell average)

    def mass(self) -> float:
        return self.below + self.c * self.level


def _shell(d: int, a, b):
    nu = ball_volume(d)
    return nu * (np.asarray(b, dtype=float) ** d - np.asarray(a, dtype=float) ** d)


def _sublevel(d: int, r: np.ndarray, h: np.ndarray, t: float, strict: bool) -> tuple[float, np.ndarray]:
    # exact measure of {h < t} (or {h <= t}) for piecewise-linear h on the radial grid
    a, b = r[:-1], r[1:]
    ha, hb = h[:-1], h[1:]
    cmp = (lambda u: u < t) if strict else (lambda u: u <= t)
    ina, inb = cmp(ha), cmp(hb)
    lo = np.where(ina, a, b)
    hi = np.where(inb, b, a)
    cross = ina != inb
    with np.errstate(divide="ignore", invalid="ignore"):
        xc = a + (t - ha) / (hb - ha) * (b - a)
    lo = np.where(cross & inb, xc, lo)
    hi = np.where(cross & ina, xc, hi)
    both = ina & inb
    lo = np.where(both, a, lo)
    hi = np.where(both, b, hi)
    vol = np.where(hi > lo, _shell(d, lo, hi), 0.0)
    return float(np.sum(vol)), vol


def bathtub_minimize(h: Callable | FunctionSpec | tuple, G: float, d: int = 1, radius: float | None = None,
                     n: int = 4096) -> BathtubSolution:
    """Solve min int g h over 0 <= g <= 1, int g = G for a radial cost h.

    ``h`` is a callable of the radius (sampled on ``n`` cells of [0, radius])
    or a (radii, values) pair; h is taken piecewise linear between samples and
    +inf beyond the last radius.
    """
    if G <= 0:
        raise ValueError("G must be positive")
    if isinstance(h, tuple):
        r, hv = (np.asarray(v, dtype=float) for v in h)
    else:
        if radius is None:
            raise ValueError("radius is required for callable costs")
        r = np.linspace(0.0, radius, n + 1)
        hv = np.asarray(evaluate(h, r) if isinstance(h, FunctionSpec) else h(r), dtype=float)
    total = float(_shell(d, 0.0, r[-1]))
    if G > total * (1 + 1e-14):
        raise ValueError(f"G={G} exceeds the available measure {total}")
    lo, hi = float(np.min(hv)), float(np.max(hv))
    if _sublevel(d, r, hv, hi, strict=True)[0] <= G:
        s = hi
    else:
        # m(t) = |{h < t}| is nondecreasing and left-continuous
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            if _sublevel(d, r, hv, mid, strict=True)[0] <= G:
                lo = mid
            else:
                hi = mid
        s = lo
    below, vol_below = _sublevel(d, r, hv, s, strict=True)
    upto, vol_upto = _sublevel(d, r, hv, s, strict=False)
    level = upto - below
    if level > 0:
        c = min(1.0, max(0.0, (G - below) / level))
    else:
        c = 0.0
    cells = _shell(d, r[:-1], r[1:])
    g_mass = vol_below + c * (vol_upto - vol_below)
    weights = np.divide(g_mass, cells, out=np.zeros_like(cells), where=cells > 0)
    # int g h by the trapezoid of h against the filled mass on each cell
    hmid = 0.5 * (hv[:-1] + hv[1:])
    value = float(np.sum(g_mass * hmid))
    return BathtubSolution(s, c, below, level, value, r, weights)


def _second_difference(p: float, u: float) -> float:
    # (1+u)^p + (1-u)^p - 2 for 0 < u <= 1 without cancellation
    if u < 0.1:
        total, c, k = 0.0, p * (p - 1.0) / 2.0, 2
        uk = u * u
        while True:
            term = c * uk
            total += term
            if abs(term) <= 1e-18 * abs(total):
                return 2.0 * total
            c *= (p - k) * (p - k - 1.0) / ((k + 1.0) * (k + 2.0))
            uk *= u * u
            k += 2
    return math.expm1(p * math.log1p(u)) + math.expm1(p * math.log1p(-u)) if u < 1 else 2.0 ** p - 2.0


def convexity_gap(d: int, r: float) -> CertificateResult:
    """nu_d / (1 + 2/d) (t^(d+2) + s^(d+2) - 2 r^(d+2)) with the bathtub radii;
    strictly positive by convexity of x -> x^(1+2/d)."""
    s, t = bathtub_radii(d, r)
    nu = ball_volume(d)
    # with X = r^d and u = |shell| / (nu X): X^p ((1+u)^p + (1-u)^p - 2), p = 1 + 2/d
    p = 1.0 + 2.0 / d
    X = r**d
    u = 1.0 / (2.0 * nu * X)
    gap = nu / p * X**p * _second_difference(p, u)
    return CertificateResult("convexity_gap", gap > 0, gap, {"d": d, "r": r}, f"s={s:.12g} t={t:.12g}")


def improvement_factor(d: int, A_plus: float) -> tuple[float, float]:
    """theta = (2 nu_d A^d)^(-1) and factor = 1 + (1 - theta)^(1/d)."""
    nu = ball_volume(d)
    denom = 2.0 * nu * A_plus**d
    if not denom > 1.0:
        raise ValueError("need 2 nu_d A^d > 1")
    theta = 1.0 / denom
    factor = 1.0 + math.exp(math.log1p(-theta) / d)
    if factor > 2.0 - theta / d + 1e-15:
        raise AssertionError("factor exceeds 2 - theta/d")
    return theta, factor


def ball_integral_check(f: FunctionSpec, r: float, K: float) -> CertificateResult:
    """Check int_{B_r} f <= -K for a user-supplied constant K > 0."""
    if K <= 0:
        raise ValueError("K must be positive")
    res = integrate(f, weight="r^(d-1)", interval=(0.0, r))
    val = sphere_area(f.dim) * res.value
    return CertificateResult("ball_integral", val <= -K, -K - val, {"r": r, "K": K, "dim": f.dim},
                             f"ball integral {val:.6e}; L1 norm {l1_norm(f).value:.6e}")
