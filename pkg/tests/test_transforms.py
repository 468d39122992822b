import math

import mpmath as mp
import numpy as np
import pytest
from scipy import integrate as sint
from scipy import special

from signlab.funcrep import Kind, Product, closed, combine, custom, dilate, eigen, evaluate, sampled
from signlab.special import bessel_j
from signlab.transforms import (
    TransformError,
    convolution_values,
    convolve_radial,
    fourier_transform,
    hankel_radial_ft,
    hankel_values,
    integrate,
    numeric_fourier,
)

ALPHA = 8 / math.pi ** 2
X = np.linspace(0.0, 4.0, 81)


def test_catalog_pairs():
    assert fourier_transform(closed(Kind.TENT)).kind == "sinc_sq"
    g = closed(Kind.GAUSSIAN, 3)
    assert fourier_transform(g) == g
    fh = fourier_transform(closed(Kind.BANDLIMITED, 1, amplitude=ALPHA))
    xi = np.linspace(0, 1, 101)
    ref = np.where(xi <= 0.5, -(4 / math.pi) * np.sin(2 * math.pi * xi), 0.0)
    assert np.allclose(evaluate(fh, xi), ref, atol=1e-15)


def test_dilation_rule():
    f = dilate(closed(Kind.TENT), 2.0)
    fh = fourier_transform(f)
    assert np.allclose(evaluate(fh, X), 0.5 * np.sinc(X / 2) ** 2)


@pytest.mark.parametrize("f", [
    closed(Kind.TENT), closed(Kind.SINC_SQ, 1, 2.0, 0.7), closed(Kind.BANDLIMITED),
    closed(Kind.GAUSSIAN, 2, 1.0, 1.3), closed(Kind.CHI_HAT, 3), closed(Kind.BALL_AUTOCORR, 2),
    closed(Kind.BUMP, 1), eigen(3, -1, [0, 1, 0, -0.4]),
    combine([(1, closed(Kind.SINC_SQ)), (-1, closed(Kind.TENT))]),
])
def test_involution(f):
    ff = fourier_transform(fourier_transform(f))
    assert np.allclose(evaluate(ff, X), evaluate(f, X), atol=1e-8)


@pytest.mark.parametrize("f", [closed(Kind.TENT), closed(Kind.BANDLIMITED), closed(Kind.GAUSSIAN, 1, 1.0, 0.8),
                               closed(Kind.SINC_SQ, 1, 1.0, 0.5)])
def test_numeric_fourier_matches_catalog(f):
    xi = np.linspace(0, 3, 61)
    res = numeric_fourier(f, xi)
    assert np.allclose(res.value, evaluate(fourier_transform(f), xi), atol=1e-9)


def test_hankel_tent_profile():
    r = np.linspace(0, 1, 401)
    prof = sampled(1, r, 1 - r, interpolation="linear")
    rho = np.linspace(0, 4, 201)
    res = hankel_values(prof, 1, rho)
    assert np.max(np.abs(res.value - np.sinc(rho) ** 2)) < 1e-8


@pytest.mark.parametrize("d", [1, 2, 3, 5, 8])
def test_hankel_gaussian_any_dimension(d):
    rho = np.linspace(0, 3, 31)
    F = hankel_radial_ft(closed(Kind.GAUSSIAN, d), rho=rho)
    assert np.max(np.abs(np.array(F.rep.values) - np.exp(-math.pi * rho ** 2))) < 1e-8


def test_hankel_ball_autocorr_d2():
    rho = np.array([0.0, 0.5, 1.0, 2.0])
    F = hankel_radial_ft(closed(Kind.BALL_AUTOCORR, 2), rho=rho)
    # transform of the unit-disc indicator is J_1(2 pi rho) / rho
    ref = (special.j1(2 * math.pi * rho[1:]) / rho[1:]) ** 2
    assert np.allclose(F.rep.values[1:], ref, atol=1e-8)


@pytest.mark.parametrize("prof", [
    sampled(1, np.linspace(0, 1, 201), 1 - np.linspace(0, 1, 201), interpolation="linear"),
    sampled(1, np.linspace(0, 6, 601), np.exp(-math.pi * np.linspace(0, 6, 601) ** 2)),
])
def test_hankel_d1_agrees_with_cosine_transform(prof):
    rho = np.linspace(0, 3, 31)
    a = np.array(hankel_radial_ft(prof, rho=rho).rep.values)
    b = numeric_fourier(prof, rho).value
    assert np.max(np.abs(a - b)) < 1e-9


def test_hankel_divergent_tail():
    from signlab.funcrep import Tail

    with pytest.raises(TransformError, match="divergent"):
        hankel_values(sampled(2, [0, 1], [1, 1], tail=Tail("decay", 1.0, 1.5)), 2, [0.5])


def test_bessel_examples():
    assert bessel_j(0.5, math.pi / 2) == pytest.approx(2 / math.pi, rel=1e-15)
    assert bessel_j(0, 0.0) == 1.0
    mp.mp.dps = 40
    assert bessel_j(6, 10.0) == pytest.approx(float(mp.besselj(6, 10)), abs=1e-14)


def test_convolution_ball_indicators_d1():
    chi = closed(Kind.CHI, 1)
    x = np.linspace(0, 2.5, 26)
    assert np.allclose(convolution_values(chi, chi, x), np.maximum(2 - x, 0), atol=1e-12)


@pytest.mark.parametrize("d", [1, 2])
def test_convolution_gaussians(d):
    a, b = 1.0, 1.5
    ga, gb = closed(Kind.GAUSSIAN, d, 1.0, a), closed(Kind.GAUSSIAN, d, 1.0, b)
    c = 1 / math.sqrt(1 / a ** 2 + 1 / b ** 2)
    x = np.linspace(0, 2, 9)
    ref = (c / (a * b)) ** d * np.exp(-math.pi * c * c * x * x)
    assert np.allclose(convolution_values(ga, gb, x, route="transform"), ref, atol=1e-11)


def test_convolution_routes_agree():
    f, g = closed(Kind.GAUSSIAN, 1), closed(Kind.TENT, 1)
    x = np.linspace(0, 3, 13)
    v1, e1 = convolution_values(f, g, x, route="direct", with_error=True)
    v2, e2 = convolution_values(f, g, x, route="transform", with_error=True)
    assert np.max(np.abs(v1 - v2)) <= max(e1 + e2, 1e-11)


def test_chi_conv_chihat_at_zero():
    chi, chih = closed(Kind.BALL_AUTOCORR, 1), closed(Kind.BALL_AUTOCORR_HAT, 1)
    v = convolution_values(chi, chih, [0.0])[0]
    # int chi(y) chihat(y) dy over the support, split at the zeros of sin(2 pi y)
    ref = 2 * sum(sint.quad(lambda y: (2 - y) * (math.sin(2 * math.pi * y) / (math.pi * y)) ** 2, k / 2, (k + 1) / 2,
                            epsabs=1e-15)[0] for k in range(4))
    assert v == pytest.approx(ref, abs=1e-11)


def test_convolution_dimension_mismatch():
    with pytest.raises(ValueError):
        convolve_radial(closed(Kind.TENT, 1), closed(Kind.GAUSSIAN, 2))


def test_integrate_examples():
    assert integrate(closed(Kind.GAUSSIAN), "1").value == pytest.approx(0.5, abs=1e-13)
    assert integrate(closed(Kind.TENT), "r^(d+1)", (0, 1)).value == pytest.approx(1 / 12, abs=1e-14)
    with pytest.raises(ValueError):
        integrate(closed(Kind.TENT), "r^3")


def test_plancherel_pairs(rng):
    # f and fhat decay fast so both products have a finite truncation radius
    left = [closed(Kind.GAUSSIAN, 1, 1.0, 1.2), closed(Kind.GAUSSIAN, 1, 2.0, 0.6), closed(Kind.BUMP, 1, 1.0, 0.9)]
    right = left + [closed(Kind.TENT, 1, 1.0, 0.8), closed(Kind.BANDLIMITED), closed(Kind.SINC_SQ, 1, 1.0, 1.5), closed(Kind.CHI, 1, 1.0, 0.7)]
    for _ in range(20):
        f = left[rng.integers(0, len(left))]
        g = right[rng.integers(0, len(right))]
        lhs = integrate(custom(1, Product(f, fourier_transform(g))), "1").value
        rhs = integrate(custom(1, Product(fourier_transform(f), g)), "1").value
        assert abs(lhs - rhs) < 1e-8
