"""Acceptance suite: one PASS/FAIL line per criterion, with measured values
and runtimes.  The lines are collected in ``REPORT`` and printed in the
terminal summary (see conftest.py); ``python tests/test_acceptance.py``
prints them directly."""
import math
import time
import warnings

import numpy as np
import pytest
from scipy.optimize import linprog

from signlab.constructions import gaussian_correct, dirac_symmetrize, mollifier, mollify_bandlimit, schwartz_smooth
from signlab.funcrep import Kind, closed, combine, dilate, eigen, evaluate
from signlab.lp.search import bisect_min_radius
from signlab.lp.simplex import LPProblem, solve_lp
from signlab.signtools import last_sign_change
from signlab.suites import run_suite
from signlab.transforms import fourier_transform, numeric_fourier

REPORT: list[str] = []
SEED = 20240611


def _report(n: int, ok: bool, text: str, seconds: float, warn_only: bool = False):
    tag = "PASS" if ok else ("WARN" if warn_only else "FAIL")
    REPORT.append(f"[{tag}] criterion {n}: {text} ({seconds:.1f} s)")


def _suite(n: int, name: str, budget: float, summary):
    t = time.perf_counter()
    rep = run_suite(name, SEED)
    dt = time.perf_counter() - t
    checks = {c["name"]: c for c in rep["checks"]}
    ok = rep["passed"] and dt < budget
    _report(n, ok, f"{name}: {summary(checks)}; budget {budget:g} s", dt)
    assert rep["passed"], [c for c in rep["checks"] if not c["passed"]]
    assert dt < budget


def test_criterion_1_minus_minimizer():
    _suite(1, "minus-minimizer", 5.0, lambda c: (
        f"r = {c['last_sign_change']['inputs']['radius']:.12f}, "
        f"max |ghat + g| = {c['transform_is_minus_g']['inputs']['max_deviation']:.2e}, "
        f"g(0) = {c['vanishes_at_origin']['inputs']['value']}"))


def test_criterion_2_bandlimited_extremal():
    _suite(2, "bandlimited-extremal", 30.0, lambda c: (
        f"r = {c['last_sign_change']['inputs']['radius']:.12f}, "
        f"transform error {c['numeric_transform']['inputs']['max_deviation']:.2e}, "
        f"max Poisson residual {c['poisson_summation']['inputs']['max_residual']:.2e}, "
        f"odd-lattice certificate {'ok' if c['odd_lattice_vanishing']['passed'] else 'failed'}, "
        f"interpolation error {c['interpolation']['inputs']['max_error']:.2e}"))


def test_criterion_3_phi_contradiction():
    _suite(3, "phi-contradiction", 5.0, lambda c: (
        f"Phi(0.595) = {c['phi_bound']['inputs']['phi']:.12f} (error {c['phi_bound']['inputs']['error']:.1e}), "
        f"worst mass-inequality margin on {c['mass_inequality_fails_on_grid']['inputs']['points']} radii "
        f"{c['mass_inequality_fails_on_grid']['inputs']['worst_margin']:.3e}"))


def _search(d, s, degree, tol):
    t = time.perf_counter()
    res = bisect_min_radius(d, s, degree, tol=tol)
    return res, time.perf_counter() - t


@pytest.mark.slow
def test_criterion_4_lp_search_one_dimension():
    minus, t1 = _search(1, -1, 40, 1e-3)
    plus, t2 = _search(1, 1, 60, 1e-3)
    vm, vp = minus.verification.radius, plus.verification.radius
    ok_m = minus.status == "ok" and 0.995 <= minus.r_upper <= 1.01 and vm <= minus.r_upper + 1e-6 and t1 < 300
    ok_p = plus.status == "ok" and plus.r_upper <= 0.60 and vp <= plus.r_upper + 1e-6 and t2 < 300
    _report(4, ok_m and ok_p,
            f"sign -1 degree 40: r_upper = {minus.r_upper:.6f} (verified {vm:.6f}, {t1:.0f} s); "
            f"sign +1 degree 60: r_upper = {plus.r_upper:.6f} (verified {vp:.6f}, {t2:.0f} s)", t1 + t2)
    assert ok_m and ok_p


@pytest.mark.slow
def test_criterion_5_lp_search_stretch():
    m8, t1 = _search(8, -1, 30, 5e-3)
    p12, t2 = _search(12, 1, 30, 5e-3)
    ok = (m8.status == "ok" and m8.r_upper <= 1.45 and t1 < 1200
          and p12.status == "ok" and p12.r_upper <= 1.46 and t2 < 1200)
    _report(5, ok, f"d=8 sign -1: r_upper = {m8.r_upper:.5f} (target sqrt 2 = 1.41421); "
                   f"d=12 sign +1: r_upper = {p12.r_upper:.5f}", t1 + t2, warn_only=True)
    if not ok:
        warnings.warn("stretch LP bounds missed their tolerance at degree 30", stacklevel=1)


def test_criterion_6_bathtub():
    _suite(6, "bathtub", 10.0, lambda c: (
        f"max shell volume error {c['shell_volumes']['inputs']['max_error']:.1e}, "
        f"gap(1, 1) = {c['gap_d1_r1']['inputs']['gap']!r}, "
        f"min convexity gap {c['convexity_gap_positive']['margin']:.3e}, "
        f"max greedy difference {c['bathtub_vs_greedy']['inputs']['max_difference']:.1e}"))


def test_criterion_7_improvement():
    _suite(7, "improvement", 1.0, lambda c: (
        f"theta = {c['improvement_factor']['inputs']['theta']:.9f}, "
        f"factor = {c['improvement_factor']['inputs']['factor']:.10f}"))


def test_criterion_8_torus_bridge():
    _suite(8, "torus-bridge", 5.0, lambda c: (
        f"r_torus = {c['torus_product']['inputs']['r_torus']:.9f}, k_+ = {c['torus_product']['inputs']['k_plus']}, "
        f"product = {c['torus_product']['inputs']['product']:.9f}, "
        f"torus bound {c['torus_product']['inputs']['torus_bound']:.5f}"))


def _involution(rng):
    worst = 0.0
    x = np.linspace(0, 3, 61)
    for kind in (Kind.TENT, Kind.SINC_SQ, Kind.BANDLIMITED, Kind.GAUSSIAN, Kind.BALL_AUTOCORR, Kind.BUMP):
        for d in (1, 3):
            if kind in (Kind.TENT, Kind.SINC_SQ, Kind.BANDLIMITED) and d > 1:
                continue
            f = dilate(closed(kind, d), float(rng.uniform(0.5, 2.0)))
            worst = max(worst, float(np.max(np.abs(evaluate(fourier_transform(fourier_transform(f)), x)
                                                   - evaluate(f, x)))))
    num = float(np.max(np.abs(numeric_fourier(closed(Kind.TENT), x).value - evaluate(closed(Kind.SINC_SQ), x))))
    return max(worst, num), f"involution and numeric transform error {max(worst, num):.1e}"


def _parity(rng):
    worst = 0.0
    x = np.linspace(0, 4, 41)
    for _ in range(20):
        d, s = int(rng.integers(1, 9)), int(rng.choice([-1, 1]))
        c = np.zeros(12)
        c[(0 if s == 1 else 1)::2] = rng.normal(size=6)
        f = eigen(d, s, c)
        worst = max(worst, float(np.max(np.abs(evaluate(fourier_transform(f), x) - s * evaluate(f, x)))))
    return worst, f"eigen parity error {worst:.1e}"


def _dilation(rng):
    g = combine([(1, closed(Kind.SINC_SQ)), (-1, closed(Kind.TENT))])
    worst = 0.0
    for lam in rng.uniform(0.3, 3.0, 5):
        worst = max(worst, abs(last_sign_change(dilate(g, float(lam))).radius - 1.0 / lam))
    return worst, f"dilation covariance error {worst:.1e}"


def _mollify(rng):
    f = closed(Kind.BANDLIMITED)
    g = mollify_bandlimit(f, 0.5)
    xi = rng.uniform(0.0, 0.5, 100)
    fh = evaluate(fourier_transform(f), xi)
    gh = evaluate(fourier_transform(g), xi)
    ph = evaluate(mollifier(1, 0.5), xi)
    mask = np.abs(fh) > 1e-8
    bad = int(np.sum(np.sign(gh[mask]) != np.sign(fh[mask])))
    return (0.0 if bad == 0 and np.allclose(gh, fh * ph, atol=1e-10) else 1.0), f"{bad} sign flips at 100 frequencies"


def _schwartz(rng):
    h = gaussian_correct(dirac_symmetrize(closed(Kind.BANDLIMITED), 0.3))
    s = schwartz_smooth(h, 0.01)
    x = np.linspace(0, 10, 50)
    dev = float(np.max(np.abs(evaluate(fourier_transform(s), x) - evaluate(s, x))))
    return (dev if float(evaluate(s, 0.0)) < 0 else math.inf), f"self-duality error {dev:.1e} on [0, 10]"


def _lp_oracle(rng):
    worst = 0.0
    for _ in range(20):
        A = rng.normal(size=(20, 40))
        b = rng.normal(size=20) + 3.0
        c = rng.normal(size=40)
        ref = linprog(-c, A_ub=A, b_ub=b, bounds=[(-1, 1)] * 40, method="highs")
        out = solve_lp(LPProblem.from_arrays(c, A_ub=A, b_ub=b, bounds=[(-1, 1)] * 40))
        worst = max(worst, abs(out.objective_value + ref.fun) if out.optimal else math.inf)
    return worst, f"simplex vs reference LP objective gap {worst:.1e}"


PROPERTIES = [("involution", _involution, 1e-8), ("parity", _parity, 1e-12), ("dilation", _dilation, 1e-8),
              ("mollifier", _mollify, 0.5), ("schwartz", _schwartz, 1e-7), ("lp", _lp_oracle, 1e-7)]


def test_criterion_9_property_suites():
    rng = np.random.default_rng(SEED)
    t = time.perf_counter()
    parts, ok = [], True
    for name, fn, tol in PROPERTIES:
        err, text = fn(rng)
        good = err < tol
        ok &= good
        parts.append(f"{name} {'ok' if good else 'FAILED'} ({text})")
    _report(9, ok, "; ".join(parts), time.perf_counter() - t)
    assert ok, parts


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
