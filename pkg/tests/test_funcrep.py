import glob
import json
import math
import os

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from signlab.funcrep import (
    Kind,
    SpecError,
    Tail,
    closed,
    combine,
    dilate,
    eigen,
    evaluate,
    l1_norm,
    parse_spec,
    sampled,
    scale,
    serialize_spec,
    spec_to_dict,
)
from signlab.transforms import TransformError, fourier_transform

from conftest import FIXTURES

ALPHA = 8 / math.pi ** 2


def test_tent_and_sinc():
    assert evaluate(closed(Kind.TENT), 0.0) == 1.0
    assert evaluate(closed(Kind.TENT), 1.5) == 0.0
    assert evaluate(closed(Kind.SINC_SQ), 0.5) == pytest.approx(4 / math.pi ** 2)


def test_bandlimited_minimizer_values():
    f = closed(Kind.BANDLIMITED, 1, amplitude=ALPHA)
    assert evaluate(f, 0.0) == pytest.approx(-8 / math.pi ** 2, abs=1e-15)
    assert evaluate(f, 1.0) == 0.0
    mp.mp.dps = 40

    def oracle(x):
        x = mp.mpf(x)
        return mp.mpf(8) / mp.pi ** 2 * mp.sin(mp.pi * (x - 1) / 2) ** 2 / (x * x - 1)

    for x in (1 - 9e-4, 1 - 1e-6, 1 + 1e-9, 1 + 5e-4, 1.0011, 0.3, 2.7, 11.2):
        assert evaluate(f, x) == pytest.approx(float(oracle(x)), rel=1e-13, abs=1e-300)


def test_negative_radius_is_absolute():
    f = closed(Kind.GAUSSIAN, 2)
    assert evaluate(f, -0.7) == evaluate(f, 0.7)


def test_nan_rejected():
    with pytest.raises(ValueError):
        evaluate(closed(Kind.TENT), float("nan"))
    with pytest.raises(SpecError):
        closed(Kind.TENT, 1, amplitude=float("nan"))


def test_sampled_profile_tail_and_grid():
    f = sampled(1, [0, 1, 2], [1.0, 0.5, 0.25], interpolation="linear")
    assert evaluate(f, 3.0) == 0.0
    assert evaluate(f, 1.5) == pytest.approx(0.375)
    g = sampled(1, [0, 1, 2], [1.0, 0.5, 0.25], tail=Tail("decay", 1.0, 2.0))
    assert evaluate(g, 4.0) == pytest.approx(0.25 * (2 / 4) ** 2)
    with pytest.raises(SpecError):
        sampled(1, [0, 2, 1], [1, 2, 3])
    with pytest.raises(SpecError):
        sampled(1, [0.1, 1], [1, 2])


def test_eigen_parity_checked():
    with pytest.raises(SpecError, match=r"coeffs\[1\]"):
        eigen(1, 1, [1.0, 0.5])
    with pytest.raises(SpecError):
        parse_spec({"dim": 1, "eigen": {"sign": "+", "coeffs": [0.0, 1.0]}})


@given(st.integers(1, 6), st.sampled_from([1, -1]), st.lists(st.floats(-2, 2), min_size=1, max_size=8))
def test_eigen_transform_is_sign_times_f(d, s, raw):
    k0 = 0 if s == 1 else 1
    c = np.zeros(k0 + 2 * len(raw))
    c[k0::2] = raw
    f = eigen(d, s, c)
    x = np.random.default_rng(len(raw)).uniform(0, 4, 100)
    assert np.allclose(evaluate(fourier_transform(f), x), s * evaluate(f, x), atol=1e-14, rtol=0)


def test_parse_minimal_and_errors():
    f = parse_spec('{"dim":1,"closed_form":{"kind":"tent"}}')
    assert f.kind == "tent"
    with pytest.raises(SpecError, match=r"\$\.closed_form\.kind"):
        parse_spec({"dim": 1, "closed_form": {"kind": "triangle"}})
    with pytest.raises(SpecError, match="exactly one"):
        parse_spec({"dim": 1})
    with pytest.raises(SpecError, match="dim"):
        parse_spec({"dim": 0, "closed_form": {"kind": "tent"}})
    with pytest.raises(SpecError, match="invalid JSON"):
        parse_spec("{not json")


@pytest.mark.parametrize("path", sorted(p for p in glob.glob(os.path.join(FIXTURES, "*.json")) if "pipeline" not in p))
def test_fixture_round_trip(path):
    doc = json.load(open(path))
    if isinstance(doc, list):
        pytest.skip("pipeline description")
    f = parse_spec(doc)
    assert json.loads(serialize_spec(f)) == doc
    assert parse_spec(serialize_spec(f)) == f


def test_combine_merges_and_flattens():
    t = closed(Kind.TENT)
    g = combine([(1.0, t), (2.0, t)])
    assert g.kind == "tent" and g.rep.amplitude == 3.0
    e = combine([(1.0, eigen(1, 1, [1.0])), (1.0, eigen(1, 1, [0, 0, 2.0]))])
    assert e.rep.coeffs == (1.0, 0.0, 2.0)
    h = combine([(1.0, combine([(1.0, t), (1.0, closed(Kind.SINC_SQ))])), (-1.0, t)])
    assert h.kind == "sinc_sq"


def test_scale_dilate():
    g = closed(Kind.GAUSSIAN, 2)
    x = np.linspace(0, 3, 7)
    assert np.allclose(evaluate(dilate(scale(g, 3.0), 2.0), x), 3 * np.exp(-4 * math.pi * x * x))
    s = sampled(1, [0, 1, 2], [1, 2, 3])
    assert evaluate(dilate(s, 2.0), 0.5) == pytest.approx(2.0)


def test_l1_norm_examples():
    assert l1_norm(closed(Kind.GAUSSIAN)).value == pytest.approx(1.0, abs=1e-12)
    assert l1_norm(closed(Kind.TENT)).value == pytest.approx(1.0, abs=1e-12)
    g = combine([(1, closed(Kind.SINC_SQ)), (-1, closed(Kind.TENT))])
    # piecewise scipy quadrature up to |x| = 1e4 plus the 1/(2 pi^2 x) tail
    assert l1_norm(g).value == pytest.approx(0.268531166508156, abs=1e-10)


@pytest.mark.parametrize("lam", [0.5, 2.0])
@pytest.mark.parametrize("f", [closed(Kind.GAUSSIAN, 3), closed(Kind.TENT), eigen(2, -1, [0, 1, 0, 0.3])])
def test_l1_dilation_scaling(f, lam):
    d = f.dim
    assert l1_norm(dilate(f, lam)).value == pytest.approx(lam ** (-d) * l1_norm(f).value, rel=1e-8)


def test_l1_not_integrable():
    with pytest.raises((TransformError, ValueError), match="integrable"):
        l1_norm(sampled(1, [0, 1], [1, 1], tail=Tail("decay", 1.0, 0.5)))


def test_spec_to_dict_custom():
    g = combine([(1, closed(Kind.SINC_SQ)), (-1, closed(Kind.TENT))])
    d = spec_to_dict(g)
    assert d["closed_form"]["expr"]["op"] == "combination"
