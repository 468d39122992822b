import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate as sint

from signlab.certificates import (
    MomentDivergence,
    ball_integral_check,
    bathtub_minimize,
    bathtub_radii,
    convexity_gap,
    improvement_factor,
    mass_inequality,
    phi,
    phi_contradiction,
    positive_part_bound,
    rearrangement_bounds,
    second_moment,
    second_moment_certificate,
)
from signlab.funcrep import Kind, closed, combine, eigen, evaluate, l1_norm, scale
from signlab.special import ball_volume, eigen_basis
from signlab.suites import greedy_bathtub_value


def _phi_simpson(r, n=1_000_001):
    x = np.linspace(0.25, r, n)
    y = 0.5 + (np.sin(2 * np.pi * (r - 0.25) * x) - np.sin(2 * np.pi * r * x)) / (np.pi * x)
    return sint.simpson(y, x=x)


def test_positive_part_bound():
    assert positive_part_bound(0.5, 0.0) == pytest.approx(0.0, abs=1e-15)
    ref = 0.5 + (math.sqrt(2) / 2 - 1) * 2 / math.pi
    assert positive_part_bound(0.5, 0.5) == pytest.approx(ref, rel=1e-14)
    with pytest.raises(ValueError):
        positive_part_bound(0.8, 0.1)
    with pytest.raises(ValueError):
        positive_part_bound(0.5, 0.6)


def test_phi_values():
    assert phi(0.25).value == 0.0
    q = phi(0.595)
    assert q.value < 0.121 and q.error_estimate < 1e-10
    assert q.value == pytest.approx(0.1206723502374772, abs=1e-12)
    assert phi(0.45).value == pytest.approx(_phi_simpson(0.45), abs=1e-11)
    with pytest.raises(ValueError):
        phi(0.2)


def test_phi_monotone_on_window():
    vals = [phi(r).value for r in np.arange(0.45, 0.5951, 1e-3)]
    assert np.all(np.diff(vals) >= 0)


def test_mass_inequality():
    ok = mass_inequality(0.5, 0.25)
    assert ok.passed and ok.margin == pytest.approx(0.09375 - 0.0625)
    bad = mass_inequality(0.45, 0.121)
    assert not bad.passed and bad.margin == pytest.approx(0.7 * 0.121 * 0.579 - 0.05625)
    assert not mass_inequality(0.3, 0.0).passed
    for r in (0.3, 0.5, 0.6):
        m = [mass_inequality(r, s).margin for s in np.linspace(0, 0.2499, 50)]
        assert np.all(np.diff(m) > 0)


def test_phi_contradiction():
    assert phi_contradiction(0.45, 0.595, 0.121).passed
    assert not phi_contradiction(0.45, 0.595, 0.25).passed
    # sigma = 0 satisfies the mass condition, but Phi(0.26) > 0 fails the bound
    res = phi_contradiction(0.26, 0.26, 0.0)
    assert phi(0.26).value > 0 and not res.passed
    with pytest.raises(ValueError):
        phi_contradiction(0.6, 0.5, 0.1)
    with pytest.raises(ValueError):
        phi_contradiction(0.45, 0.8, 0.1)


def test_certificate_json_roundtrip():
    import json

    doc = json.loads(phi_contradiction(0.45, 0.595, 0.121).to_json())
    assert set(doc) == {"name", "passed", "margin", "inputs", "notes"}
    assert doc["passed"] == (doc["margin"] >= 0)


def test_second_moment():
    g = closed(Kind.GAUSSIAN)
    assert second_moment(g).value == pytest.approx(1 / (2 * math.pi), rel=1e-10)
    with pytest.raises(MomentDivergence):
        second_moment(combine([(1, closed(Kind.SINC_SQ)), (-1, closed(Kind.TENT))]))


def test_second_moment_sign_for_plus_eigenfunction():
    # f = a l0 - l2 with f(0) = 0; then f''(0) >= 0 and the moment is -f''(0)/(4 pi^2)
    b0 = eigen_basis(1, 2, np.array([0.0]))[0]
    f = eigen(1, 1, [b0[2] / b0[0], 0.0, -1.0])
    assert abs(float(evaluate(f, 0.0))) < 1e-14
    h = 1e-3
    f2 = 2 * (float(evaluate(f, h)) - float(evaluate(f, 0.0))) / h**2
    assert f2 > 0
    m = second_moment(f).value
    assert m == pytest.approx(-f2 / (4 * math.pi**2), rel=1e-5)
    assert second_moment_certificate(f).passed


def test_bathtub_radii():
    assert bathtub_radii(1, 1.0) == pytest.approx((0.75, 1.25))
    s, t = bathtub_radii(2, 1.0)
    assert s == pytest.approx(math.sqrt(1 - 1 / (2 * math.pi)))
    assert t == pytest.approx(math.sqrt(1 + 1 / (2 * math.pi)))
    with pytest.raises(ValueError, match="does not fit"):
        bathtub_radii(1, 0.2)


@given(st.integers(1, 24), st.floats(1.05, 3.0))
def test_shell_volumes(d, k):
    r = k * (1 / (2 * ball_volume(d))) ** (1 / d)
    s, t = bathtub_radii(d, r)
    nu = ball_volume(d)
    assert nu * (r**d - s**d) == pytest.approx(0.5, abs=1e-12 * max(1, nu * r**d))
    assert nu * (t**d - r**d) == pytest.approx(0.5, abs=1e-12 * max(1, nu * t**d))
    assert convexity_gap(d, r).margin > 0


def test_convexity_gap_values():
    assert convexity_gap(1, 1.0).margin == pytest.approx(0.25, abs=1e-14)
    import mpmath as mp

    mp.mp.dps = 50
    d, r = 8, mp.sqrt(2)
    nu = mp.pi**4 / 24
    s = (r**d - 1 / (2 * nu)) ** (mp.mpf(1) / d)
    t = (r**d + 1 / (2 * nu)) ** (mp.mpf(1) / d)
    ref = nu / (1 + mp.mpf(2) / d) * (t ** (d + 2) + s ** (d + 2) - 2 * r ** (d + 2))
    gap = convexity_gap(8, math.sqrt(2))
    assert gap.passed and gap.margin == pytest.approx(float(ref), rel=1e-12)


def test_bathtub_examples():
    sol = bathtub_minimize(lambda y: y * y, 1.0, d=1, radius=2.0, n=20000)
    assert sol.s == pytest.approx(0.25, abs=1e-6)
    assert sol.mass() == pytest.approx(1.0, abs=1e-10)
    const = bathtub_minimize((np.array([0.0, 2.0]), np.array([3.0, 3.0])), 1.0, d=1)
    assert const.s == 3.0 and const.c == pytest.approx(1.0 / 4.0)
    assert const.value == pytest.approx(3.0)
    with pytest.raises(ValueError):
        bathtub_minimize(lambda y: y, 10.0, d=1, radius=1.0)
    with pytest.raises(ValueError):
        bathtub_minimize(lambda y: y, -1.0, d=1, radius=1.0)


def test_bathtub_vs_greedy(rng):
    for _ in range(10):
        d = int(rng.integers(1, 4))
        a, b, w = rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(1, 6)
        h = lambda x: a * x + b * np.cos(w * x)  # noqa: E731
        R = float(rng.uniform(1.0, 2.5))
        G = float(rng.uniform(0.1, 0.9)) * ball_volume(d) * R**d
        sol = bathtub_minimize(h, G, d=d, radius=R)
        assert np.all(sol.weights <= 1 + 1e-12) and np.all(sol.weights >= -1e-12)
        assert sol.mass() == pytest.approx(G, abs=1e-10 * max(1, G))
        assert sol.value == pytest.approx(greedy_bathtub_value(h, G, d, R, n=10_000), abs=1e-3)


def test_improvement_factor():
    theta, factor = improvement_factor(12, math.sqrt(2))
    nu = math.pi**6 / 720
    assert theta == pytest.approx(1 / (2 * nu * 64), rel=1e-14)
    assert factor == pytest.approx(1.9995111118855502, abs=1e-13)
    assert factor < 2 - theta / 12 + 1e-15
    _, f_big = improvement_factor(12, 10.0)
    assert 2 - f_big < 1e-12
    with pytest.raises(ValueError):
        improvement_factor(1, 0.1)


@given(st.integers(1, 30), st.floats(1.0, 3.0))
def test_improvement_factor_below_two(d, k):
    A = k * (1 / (2 * ball_volume(d))) ** (1 / d) * 1.01
    theta, factor = improvement_factor(d, A)
    assert factor < 2 and factor <= 2 - theta / d + 1e-15


def test_rearrangement_bounds_on_normalised_minimizer():
    f = closed(Kind.BANDLIMITED)
    g = scale(f, 1 / l1_norm(f).value)
    res = rearrangement_bounds(g, r=1.0)
    names = [c.name for c in res]
    assert names == ["rearrangement_plus", "rearrangement_minus", "rearrangement_outer"]
    assert all(c.passed == (c.margin >= -1e-12) for c in res)
    with pytest.raises(ValueError):
        rearrangement_bounds(closed(Kind.GAUSSIAN, 2))


def test_ball_integral_check():
    g = closed(Kind.GAUSSIAN, 1, -1.0)
    ref = -math.erf(math.sqrt(math.pi))
    assert ball_integral_check(g, 1.0, 0.5).passed
    assert ball_integral_check(g, 1.0, 0.9).margin == pytest.approx(-0.9 - ref, abs=1e-10)
    res = ball_integral_check(g, 1.0, 0.99)
    assert not res.passed and res.margin == pytest.approx(-0.99 - ref, abs=1e-10)
    with pytest.raises(ValueError):
        ball_integral_check(g, 1.0, 0.0)
