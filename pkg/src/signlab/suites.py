"""Named verification suites, each a list of pass/fail certificates.

Every suite is deterministic given its seed.  The canonical names describe
what is checked; the short aliases are accepted by the command line too.
"""
from __future__ import annotations

import math
import time
from typing import Callable

import numpy as np

from .certificates import (
    CertificateResult,
    bathtub_minimize,
    bathtub_radii,
    convexity_gap,
    improvement_factor,
    mass_inequality,
    phi,
    phi_contradiction,
)
from .funcrep import Kind, closed, combine, evaluate
from .poisson_torus import (
    bandlimited_certificate,
    lattice_samples,
    periodize,
    poisson_residual,
    torus_metrics,
    vaaler_interpolate,
)
from .signtools import last_sign_change
from .special import ball_volume
from .transforms import fourier_transform, numeric_fourier

__all__ = ["SUITES", "ALIASES", "resolve_suite", "run_suite", "greedy_bathtub_value", "sign_minus_minimizer"]


def sign_minus_minimizer():
    """sinc^2 - tent in d = 1: a -1 eigenfunction vanishing at 0 with r = 1."""
    return combine([(1.0, closed(Kind.SINC_SQ, 1)), (-1.0, closed(Kind.TENT, 1))])


def _check(name, passed, margin, **inputs) -> CertificateResult:
    notes = inputs.pop("notes", "")
    return CertificateResult(name, bool(passed), float(margin), inputs, notes)


def suite_minus_minimizer(seed: int = 0) -> list[CertificateResult]:
    g = sign_minus_minimizer()
    rep = last_sign_change(g)
    out = [_check("last_sign_change", abs(rep.radius - 1.0) <= 1e-6, 1e-6 - abs(rep.radius - 1.0),
                  radius=rep.radius)]
    xi = np.linspace(0.0, 4.0, 201)
    num = numeric_fourier(g, xi).value
    dev = float(np.max(np.abs(num + evaluate(g, xi))))
    out.append(_check("transform_is_minus_g", dev < 1e-8, 1e-8 - dev, max_deviation=dev))
    g0 = float(evaluate(g, 0.0))
    out.append(_check("vanishes_at_origin", g0 == 0.0, -abs(g0), value=g0))
    return out


def suite_bandlimited(seed: int = 0) -> list[CertificateResult]:
    f = closed(Kind.BANDLIMITED, 1)
    fh = fourier_transform(f)
    rep = last_sign_change(f)
    out = [_check("last_sign_change", abs(rep.radius - 1.0) <= 1e-6, 1e-6 - abs(rep.radius - 1.0),
                  radius=rep.radius)]
    xi = np.linspace(0.0, 2.0, 200)
    dev = float(np.max(np.abs(numeric_fourier(f, xi).value - evaluate(fh, xi))))
    out.append(_check("numeric_transform", dev < 1e-8, 1e-8 - dev, max_deviation=dev))
    worst = 0.0
    for a in (0.5, 1.0, 2.0):
        for b in (0.0, 0.5, 1.0):
            worst = max(worst, poisson_residual(f, a, b))
    out.append(_check("poisson_summation", worst < 1e-8, 1e-8 - worst, max_residual=worst))
    out.append(bandlimited_certificate(f))
    nodes = np.arange(-60, 61)
    vals, ders = lattice_samples(f, 2.0, 1.0, nodes)
    g = vaaler_interpolate(vals, ders)
    x = np.linspace(-3.0, 3.0, 601)
    err = float(np.max(np.abs(g(x) - evaluate(f, 2.0 * x + 1.0))))
    out.append(_check("interpolation", err < 1e-8, 1e-8 - err, max_error=err))
    return out


def suite_phi(seed: int = 0) -> list[CertificateResult]:
    q = phi(0.595)
    out = [_check("phi_bound", q.value < 0.121 and q.error_estimate < 1e-10, 0.121 - q.value,
                  phi=q.value, error=q.error_estimate)]
    grid = np.round(np.arange(0.45, 0.595 + 5e-4, 1e-3), 12)
    margins = [mass_inequality(float(r), 0.121).margin for r in grid]
    worst = max(margins)
    out.append(_check("mass_inequality_fails_on_grid", worst < 0, -worst, points=len(grid), worst_margin=worst))
    out.append(phi_contradiction(0.45, 0.595, 0.121))
    return out


def greedy_bathtub_value(h: Callable, G: float, d: int, radius: float, n: int = 200_000) -> float:
    """Fill the cheapest cells of a fine midpoint discretisation first."""
    r = np.linspace(0.0, radius, n + 1)
    vol = ball_volume(d) * (r[1:] ** d - r[:-1] ** d)
    hv = h(0.5 * (r[1:] + r[:-1]))
    order = np.argsort(hv, kind="stable")
    cum = np.cumsum(vol[order])
    k = int(np.searchsorted(cum, G))
    full = order[:k]
    rest = G - (cum[k - 1] if k else 0.0)
    return float(np.sum(hv[full] * vol[full]) + (rest * hv[order[k]] if k < n else 0.0))


def _random_cost(rng):
    a, b, c = rng.uniform(-1, 1, 3)
    w = rng.uniform(1, 6)
    return lambda x: a * x + b * np.cos(w * x) + c * x * x


def suite_bathtub(seed: int = 0) -> list[CertificateResult]:
    rng = np.random.default_rng(seed)
    out = []
    worst_vol, worst_gap = 0.0, math.inf
    for _ in range(20):
        d = int(rng.integers(1, 25))
        rmin = (1.0 / (2.0 * ball_volume(d))) ** (1.0 / d)
        r = float(rmin * rng.uniform(1.05, 3.0))
        s, t = bathtub_radii(d, r)
        nu = ball_volume(d)
        inner = nu * (r ** d - s ** d)
        outer = nu * (t ** d - r ** d)
        worst_vol = max(worst_vol, abs(inner - 0.5) / max(1.0, nu * r ** d), abs(outer - 0.5) / max(1.0, nu * t ** d))
        worst_gap = min(worst_gap, convexity_gap(d, r).margin)
    out.append(_check("shell_volumes", worst_vol <= 1e-12, 1e-12 - worst_vol, instances=20, max_error=worst_vol,
                      notes="error relative to max(1, |B_r|)"))
    out.append(_check("convexity_gap_positive", worst_gap > 0, worst_gap, instances=20))
    g11 = convexity_gap(1, 1.0).margin
    out.append(_check("gap_d1_r1", abs(g11 - 0.25) <= 1e-12, 1e-12 - abs(g11 - 0.25), gap=g11))
    worst = 0.0
    for _ in range(10):
        d = int(rng.integers(1, 5))
        h = _random_cost(rng)
        R = float(rng.uniform(1.0, 2.5))
        G = float(rng.uniform(0.1, 0.9)) * ball_volume(d) * R ** d
        sol = bathtub_minimize(h, G, d=d, radius=R)
        ref = greedy_bathtub_value(h, G, d, R)
        worst = max(worst, abs(sol.value - ref))
    out.append(_check("bathtub_vs_greedy", worst < 1e-3, 1e-3 - worst, instances=10, max_difference=worst))
    return out


def suite_improvement(seed: int = 0) -> list[CertificateResult]:
    theta, factor = improvement_factor(12, math.sqrt(2.0))
    ok = 1.9994 <= factor <= 1.9996 and factor <= 2.0 - theta / 12
    return [_check("improvement_factor", ok, min(factor - 1.9994, 1.9996 - factor), theta=theta, factor=factor)]


def suite_torus(seed: int = 0) -> list[CertificateResult]:
    f = closed(Kind.BANDLIMITED, 1)
    P = periodize(f, 0.5, 1)
    m = torus_metrics(P, 1, seed=seed)
    margin = 0.5 + 1e-6 - m.product
    return [_check("torus_product", margin >= 0, margin, r_torus=m.r_torus, k_plus=m.k_s, product=m.product,
                   torus_bound=math.sqrt(m.product) if m.product > 0 else 0.0,
                   notes="r_torus * k_+ <= 1/2 bounds the torus constant by sqrt(1/2)")]


SUITES: dict[str, Callable[[int], list[CertificateResult]]] = {
    "minus-minimizer": suite_minus_minimizer,
    "bandlimited-extremal": suite_bandlimited,
    "phi-contradiction": suite_phi,
    "bathtub": suite_bathtub,
    "improvement": suite_improvement,
    "torus-bridge": suite_torus,
}

ALIASES = {
    "fig1-minimizer": "minus-minimizer",
    "prop1": "bandlimited-extremal",
    "step1": "phi-contradiction",
}


def resolve_suite(name: str) -> str:
    name = ALIASES.get(name, name)
    if name not in SUITES:
        raise KeyError(name)
    return name


def run_suite(name: str, seed: int = 0) -> dict:
    key = resolve_suite(name)
    t = time.perf_counter()
    results = SUITES[key](seed)
    return {
        "suite": key,
        "seed": seed,
        "passed": all(r.passed for r in results),
        "seconds": time.perf_counter() - t,
        "checks": [r.to_dict() for r in results],
    }
