import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from signlab.funcrep import Kind, closed, combine, dilate, evaluate
from signlab.poisson_torus import (
    NotBandlimited,
    TorusPolynomial,
    bandlimited_certificate,
    lattice_samples,
    lattice_sum,
    periodize,
    poisson_residual,
    poisson_sides,
    torus_metrics,
    vaaler_interpolate,
)
from signlab.signtools import last_sign_change
from signlab.transforms import fourier_transform

F = closed(Kind.BANDLIMITED)


def test_poisson_gaussian():
    assert poisson_residual(closed(Kind.GAUSSIAN), 1.0, 0.0) < 1e-12
    ref = math.fsum(math.exp(-math.pi * n * n) for n in range(-30, 31))
    assert lattice_sum(closed(Kind.GAUSSIAN), 1.0).value == pytest.approx(ref, abs=1e-15)


def test_poisson_minimizer_odd_lattice():
    sides = poisson_sides(F, 2.0, 1.0)
    assert sides.residual < 1e-9
    assert abs(sides.lhs) < 1e-9
    # every odd integer is a zero of f
    assert np.max(np.abs(evaluate(F, 2 * np.arange(-50, 50) + 1.0))) < 1e-12


@pytest.mark.parametrize("alpha,beta", [(1.0, 0.0), (0.5, 0.3), (2.0, 0.25), (1.5, 0.7)])
def test_poisson_tent(alpha, beta):
    tent = closed(Kind.TENT)
    assert poisson_residual(tent, alpha, beta) < 1e-9
    # direct oracle: finitely many tent values on the left
    n = np.arange(-20, 21)
    lhs = alpha * np.sum(np.maximum(0.0, 1 - np.abs(alpha * n + beta)))
    assert poisson_sides(tent, alpha, beta).lhs == pytest.approx(lhs, abs=1e-14)


@given(st.floats(0.3, 2.0), st.floats(-1.0, 1.0))
def test_poisson_bandlimited_collapses(alpha, beta):
    # supp fhat in [-1/2, 1/2] and alpha <= 2: the right side is fhat(0) = 0
    s = poisson_sides(F, alpha, beta)
    assert abs(s.rhs) < 1e-12
    assert s.residual < 1e-8


def test_bandlimited_certificate():
    res = bandlimited_certificate(F)
    assert res.passed and res.inputs["r"] == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(NotBandlimited):
        bandlimited_certificate(dilate(F, 2.0))
    bump = combine([(1.0, F), (0.05, dilate(closed(Kind.SINC_SQ), 0.5))])
    assert float(evaluate(bump, 3.0)) > 0
    bad = bandlimited_certificate(bump, r_claimed=1.0)
    assert not bad.passed and bad.margin < 0


def test_vaaler_two_derivatives():
    a, b = 0.7, -1.3
    g = vaaler_interpolate({}, {-1: a, 0: b})
    x = np.linspace(-3.3, 3.3, 76)
    ref = (np.sin(np.pi * x) / np.pi) ** 2 * (a / (x + 1) + b / x)
    assert np.max(np.abs(g(x) - ref)) < 1e-14
    assert abs(g(np.array([0.0]))[0]) < 1e-30
    zero = vaaler_interpolate({0: 0.0, 3: 0.0}, {})
    assert np.all(zero(x) == 0.0)


def test_vaaler_reproduces_nodes(rng):
    vals = {int(k): float(v) for k, v in zip(range(-5, 6), rng.normal(size=11))}
    ders = {int(k): float(v) for k, v in zip(range(-5, 6), rng.normal(size=11))}
    g = vaaler_interpolate(vals, ders)
    nodes = np.arange(-5, 6, dtype=float)
    assert np.max(np.abs(g(nodes) - np.array([vals[k] for k in range(-5, 6)]))) < 1e-15
    h = 1e-6
    dg = (g(nodes + h) - g(nodes - h)) / (2 * h)
    assert np.max(np.abs(dg - np.array([ders[k] for k in range(-5, 6)]))) < 1e-6


def test_vaaler_minimizer_reconstruction():
    nodes = np.arange(-60, 61)
    vals, ders = lattice_samples(F, 2.0, 1.0, nodes)
    # only g'(-1) and g'(0) survive: g(n) = f(2n+1) = 0
    assert max(abs(v) for v in vals.values()) < 1e-12
    big = {k for k, v in ders.items() if abs(v) > 1e-9}
    assert big == {-1, 0}
    g = vaaler_interpolate(vals, ders)
    x = np.linspace(-3, 3, 601)
    assert np.max(np.abs(g(x) - evaluate(F, 2 * x + 1))) < 1e-8


def test_periodize_minimizer():
    P = periodize(F, 0.5, 1)
    k = P.indices[:, 0]
    v = P.values
    assert np.allclose(v, evaluate(F, 0.5 * np.abs(k)), atol=0)
    assert np.all(v[np.abs(k) >= 2] >= -1e-15)
    m = torus_metrics(P, 1)
    assert m.k_s <= 2
    assert m.r_torus == pytest.approx(0.25, abs=1e-6)
    assert m.product <= 0.5 + 1e-6
    # the bridge inequality on this input
    r_f = last_sign_change(F).radius
    r_fh = last_sign_change(fourier_transform(F)).radius
    assert m.product <= r_f * r_fh + 1e-6


def test_periodize_errors():
    with pytest.raises(ValueError, match="aliasing"):
        periodize(F, 1.0, 1)
    with pytest.raises(NotBandlimited):
        periodize(closed(Kind.GAUSSIAN), 0.5, 1)
    with pytest.raises(ValueError):
        periodize(F, 0.5, 0)


def test_torus_polynomial_roundtrip_and_evenness():
    P = TorusPolynomial(2, [[0, 0], [1, 0], [-1, 0], [0, 2], [0, -2]], [-1.0, 0.3, 0.3, 0.2, 0.2])
    Q = TorusPolynomial.from_dict(json.loads(P.to_json()))
    x = np.array([[0.1, 0.2], [0.4, -0.3]])
    assert np.allclose(P(x), Q(x))
    ref = -1 + 0.6 * np.cos(2 * np.pi * x[:, 0]) + 0.4 * np.cos(4 * np.pi * x[:, 1])
    assert np.allclose(P(x), ref, atol=1e-15)
    grid = P.grid_values(8)
    assert grid[1, 2] == pytest.approx(-1 + 0.6 * math.cos(2 * math.pi / 8) + 0.4 * math.cos(4 * math.pi * 2 / 8))
    with pytest.raises(ValueError, match="even"):
        TorusPolynomial(1, [[1]], [1.0])


def test_torus_metrics_trivial_cases():
    neg = TorusPolynomial(1, [[0]], [-1.0])
    m = torus_metrics(neg, 1)
    # negative everywhere: the whole fundamental domain up to sqrt(d)/2
    assert m.r_torus == pytest.approx(0.5)
    pos = TorusPolynomial(1, [[0], [1], [-1]], [-0.1, 1.0, 1.0])
    assert torus_metrics(pos, 1).k_s == 1
    assert torus_metrics(pos, -1).k_s == 2
    # cos(2 pi x) - 0.1 < 0 beyond arccos(0.1)/(2 pi)
    assert torus_metrics(pos, 1).r_torus == pytest.approx(0.5)
    nonneg = TorusPolynomial(1, [[0], [1], [-1]], [1.0, 0.2, 0.2])
    assert torus_metrics(nonneg, 1).r_torus == 0.0


def test_torus_radius_one_dimensional_oracle():
    # g(x) = cos(2 pi x) + 0.5: negative exactly for |x| in (1/3, 1/2]
    g = TorusPolynomial(1, [[0], [1], [-1]], [0.5, 0.5, 0.5])
    assert torus_metrics(g, 1).r_torus == pytest.approx(0.5)
    h = TorusPolynomial(1, [[0], [1], [-1]], [-0.5, -0.5, -0.5])
    # -cos - 0.5 < 0 for |x| < 1/3
    assert torus_metrics(h, 1).r_torus == pytest.approx(1 / 3, abs=1e-9)


def test_two_dimensional_periodization_needs_summable_coefficients():
    # the transform of the ball autocorrelation decays like |x|^-3 in d = 2
    f = fourier_transform(closed(Kind.BALL_AUTOCORR, 2))
    with pytest.raises(ValueError, match="aliasing"):
        periodize(f, 0.4, 1)
    with pytest.raises(ValueError, match="not absolutely summable"):
        periodize(f, 0.2, 1)
