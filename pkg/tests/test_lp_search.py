import csv
import io
import json

import numpy as np
import pytest

from signlab.funcrep import evaluate, parse_spec
from signlab.lp.search import SearchConfig, bisect_min_radius, feasibility_at_radius, parity_indices
from signlab.signtools import last_sign_change
from signlab.transforms import fourier_transform


def test_parity_indices():
    assert parity_indices(1, 3).tolist() == [0, 2, 4]
    assert parity_indices(-1, 3).tolist() == [1, 3, 5]
    with pytest.raises(ValueError):
        parity_indices(0, 3)
    with pytest.raises(ValueError):
        parity_indices(1, 1)


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(points=2)
    with pytest.raises(ValueError):
        SearchConfig(kappa=0.0)


def _check_candidate(o, s):
    f = o.candidate
    assert abs(float(evaluate(f, 0.0))) <= 1e-9
    x = np.linspace(0, 3, 61)
    assert np.allclose(evaluate(fourier_transform(f), x), s * evaluate(f, x), atol=1e-12)
    assert o.verification.radius <= o.radius + 1e-6


def test_minus_one_dimension_feasible_above_one():
    o = feasibility_at_radius(1, -1, 1.02, 40)
    assert o.optimal and o.feasible and o.slack > 0
    _check_candidate(o, -1)


def test_minus_one_dimension_infeasible_below_one():
    o = feasibility_at_radius(1, -1, 0.90, 40)
    assert not o.feasible


def test_plus_one_dimension_feasible_at_060():
    o = feasibility_at_radius(1, 1, 0.60, 60)
    assert o.feasible
    _check_candidate(o, 1)
    assert last_sign_change(o.candidate).radius <= 0.60 + 1e-6


def test_feasibility_monotone_in_radius():
    flags = [feasibility_at_radius(1, -1, r, 12).feasible for r in (0.9, 1.1, 1.2, 1.4)]
    first = flags.index(True)
    assert all(flags[first:])


def test_invalid_arguments():
    with pytest.raises(ValueError):
        feasibility_at_radius(0, 1, 1.0, 10)
    with pytest.raises(ValueError):
        feasibility_at_radius(1, 1, -1.0, 10)
    with pytest.raises(ValueError):
        bisect_min_radius(1, 1, 10, tol=0.0)
    with pytest.raises(ValueError):
        bisect_min_radius(1, 1, 10, bracket=(1.0, 0.5))


def test_invalid_bracket_reported():
    res = bisect_min_radius(1, -1, 12, bracket=(1.3, 1.4))
    assert res.status == "invalid bracket"


def test_bisection_dimension_eight_and_outputs():
    res = bisect_min_radius(8, -1, 20, tol=5e-3)
    assert res.status == "ok"
    assert res.r_upper <= 1.45 and res.r_upper >= 2**0.5 - 5e-3
    assert res.verification.radius <= res.r_upper + 1e-6
    doc = json.loads(res.to_json())
    assert doc["sign"] == "-" and doc["dimension"] == 8
    cand = parse_spec(json.dumps(doc["candidate"]))
    assert last_sign_change(cand).radius == pytest.approx(doc["verified_radius"], abs=1e-9)
    rows = list(csv.reader(io.StringIO(res.trace_csv())))
    assert rows[0] == ["r", "slack_t", "feasible"] and len(rows) == len(res.bisection_trace) + 1
    feas = [float(r) for r, _, ok in rows[1:] if ok == "1"]
    infeas = [float(r) for r, _, ok in rows[1:] if ok == "0"]
    assert min(feas) == pytest.approx(res.r_upper)
    assert max(infeas) < res.r_upper


@pytest.mark.slow
def test_radius_nonincreasing_in_degree():
    vals = [bisect_min_radius(8, -1, m, tol=5e-3).r_upper for m in (10, 20, 30)]
    assert vals[0] >= vals[1] >= vals[2]
