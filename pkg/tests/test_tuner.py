import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groundtrack.config import TrackerConfig
from groundtrack.errors import ConfigError, ObjectiveFailure
from groundtrack.tuner import (
    MIN_STEP_FRACTION,
    ParamSpec,
    SearchSpace,
    format_trace,
    parse_bounds,
    pattern_search,
)


def one_d(start=0.0, step=1.0, lo=-100.0, hi=100.0):
    return SearchSpace([ParamSpec("x", start, step, lo, hi)])


def test_one_dimensional_parabola():
    r = pattern_search(lambda p: -((p["x"] - 3.0) ** 2), one_d(), 200)
    assert abs(r.best["x"] - 3.0) < 1e-3
    assert r.iterations <= 200


def test_zero_iterations_returns_initial_point():
    r = pattern_search(lambda p: -((p["x"] - 3.0) ** 2), one_d(0.5), 0)
    assert r.best == {"x": 0.5}
    assert len(r.trace) == 1


def test_constant_objective_contracts_steps():
    r = pattern_search(lambda p: 1.0, one_d(2.0), 200)
    assert r.best == {"x": 2.0}
    assert r.steps[0] < MIN_STEP_FRACTION


def test_bounds_clamp_trials():
    seen = []

    def f(p):
        seen.append(p["x"])
        return p["x"]

    r = pattern_search(f, one_d(0.0, 0.7, -1.0, 1.0), 50)
    assert r.best["x"] == 1.0
    assert all(-1.0 <= x <= 1.0 for x in seen)


def test_first_improvement_polls_in_parameter_order():
    calls = []

    def f(p):
        calls.append((p["a"], p["b"]))
        return p["a"] + p["b"]

    sp = SearchSpace([ParamSpec("a", 0, 1, -5, 5), ParamSpec("b", 0, 1, -5, 5)])
    pattern_search(f, sp, 1)
    # +a improves and is kept before b is polled from the new point
    assert calls == [(0, 0), (1, 0), (1, 1)]


def test_integer_parameters_stay_integral():
    sp = SearchSpace.for_config(TrackerConfig(), {"omega": (1, 100, 7)})
    r = pattern_search(lambda p: -abs(p["omega"] - 44), sp, 200)
    assert r.best["omega"] == 44 and isinstance(r.best["omega"], int)


def test_objective_failure_names_the_point():
    def f(p):
        if p["x"] > 0.5:
            raise RuntimeError("boom")
        return p["x"]

    with pytest.raises(ObjectiveFailure) as exc:
        pattern_search(f, one_d(0.0), 10)
    assert exc.value.config == {"x": 1.0}


def test_nan_objective_is_a_failure():
    with pytest.raises(ObjectiveFailure):
        pattern_search(lambda p: float("nan"), one_d(), 5)


@settings(max_examples=20)
@given(
    st.lists(st.floats(-3, 3), min_size=3, max_size=3),
    st.lists(st.floats(-3, 3), min_size=3, max_size=3),
)
def test_trace_properties(centre, start):
    c = np.array(centre)
    sp = SearchSpace([ParamSpec(n, s, 0.5, -4, 4) for n, s in zip("abc", start)])

    def f(p):
        return -float(np.sum((np.array([p["a"], p["b"], p["c"]]) - c) ** 2))

    r1 = pattern_search(f, sp, 40)
    r2 = pattern_search(f, sp, 40)
    bests = [e.best for e in r1.trace]
    assert bests == sorted(bests)
    assert all(-4 <= v <= 4 for e in r1.trace for v in e.vector)
    assert [(e.vector, e.value) for e in r1.trace] == [(e.vector, e.value) for e in r2.trace]
    assert r1.value == max(e.value for e in r1.trace)


def test_for_config_follows_field_order():
    sp = SearchSpace.for_config(TrackerConfig(), {"p_dd": (0, 1, 0.1), "sigma_x": (0, 20, 1), "alpha2": (0, 1, 0.1)})
    assert sp.names == ["sigma_x", "alpha2", "p_dd"]
    with pytest.raises(ConfigError):
        SearchSpace.for_config(TrackerConfig(), {"stage2_score": (0, 1, 1)})
    with pytest.raises(ConfigError):
        SearchSpace.for_config(TrackerConfig(), {"alpha1": (0.6, 1, 0.1)})


def test_parse_bounds():
    b = parse_bounds("# comment\nalpha1 = 0, 1, 0.1\n\np_ss=0.5,0.99,0.05\n")
    assert b == {"alpha1": (0.0, 1.0, 0.1), "p_ss": (0.5, 0.99, 0.05)}
    with pytest.raises(ConfigError, match=":1:"):
        parse_bounds("alpha1 = 1, 0, 0.1")
    with pytest.raises(ConfigError):
        parse_bounds("alpha1 = 0, 1")


def test_format_trace():
    r = pattern_search(lambda p: -abs(p["x"]), one_d(1.0), 1)
    lines = format_trace(r.trace).splitlines()
    assert lines[0] == "iter,param_vector,value"
    assert lines[1] == "0,1.0,-1.0"
