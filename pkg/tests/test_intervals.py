import pytest
from hypothesis import given, settings, strategies as st

from pptlsl.ast import Box, Chop, Diamond, Eps, Prj, Star, TAnd, TNot, TOr, T_TRUE
from pptlsl.intervals import (
    IndexOutOfRange, Interpretation, NonMonotone, eval_interval, make_evaluator,
    models, project,
)
from pptlsl.semantics import Config, MemoryState, enumerate_states
from pptlsl.syntax import parse_formula

from formula_gen import data_choose, sl_formula

CFG = Config(2)
S = [MemoryState.of({"x": i}) for i in range(5)]


def test_projection_drops_repeated_indices():
    assert project(S, (0, 0, 2, 2, 2, 3)) == (S[0], S[2], S[3])
    assert project(S, (0,)) == (S[0],)
    assert project(S, ()) == ()


def test_projection_errors():
    with pytest.raises(IndexOutOfRange):
        project(S, (0, 7))
    with pytest.raises(NonMonotone):
        project(S, (2, 1))


def test_eps_on_point_interval():
    for k in range(3):
        assert eval_interval(Interpretation(tuple(S), k, k), Eps(), CFG)


def test_next_or_always_on_two_states():
    sigma = (MemoryState.of({"x": 1}, {1: 0}), MemoryState.of({"x": 0}))
    assert models(sigma, parse_formula("X x=0 || [] x|->0"), CFG)


def test_single_state_intervals():
    s = (MemoryState.of({"x": 0}),)
    assert models(s, Eps(), CFG)
    assert not models(s, parse_formula("X true"), CFG)


def test_true_chop_true():
    assert models(tuple(S[:2]), Chop(T_TRUE, T_TRUE), CFG)


def test_create_then_reverse_length_one():
    trace = (
        MemoryState.of({"x": 0, "y": 0}),
        MemoryState.of({"x": 1, "y": 0}, {1: 0}),
        MemoryState.of({"x": 0, "y": 1}, {1: 0}),
    )
    assert models(trace, parse_formula("<> ls(x,0) ; <> ls(y,0)"), CFG)
    assert not models(trace, parse_formula("<> ls(y,0) ; <> ls(x,0) ; <> ls(y, 0)"), CFG)


def _intervals(max_len):
    states = [MemoryState.of({"x": v, "y": w}, h) for v in range(2) for w in range(2) for h in ({}, {1: 0})]
    out = []
    for n in range(1, max_len + 2):
        def go(prefix):
            if len(prefix) == n:
                out.append(tuple(prefix))
                return
            for s in states:
                go(prefix + [s])
        go([])
    return out


INTERVALS = _intervals(2)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_chop_is_projection_onto_eps(data):
    choose = data_choose(data)
    p, q = sl_formula(choose, 2), sl_formula(choose, 2)
    ev = make_evaluator(CFG)
    for sigma in INTERVALS:
        assert models(sigma, Chop(p, q), CFG, ev) == models(sigma, Prj((p, q), Eps()), CFG, ev)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_diamond_and_box(data):
    p = sl_formula(data_choose(data), 2)
    ev = make_evaluator(CFG)
    for sigma in INTERVALS:
        assert models(sigma, Diamond(p), CFG, ev) == models(sigma, Chop(T_TRUE, p), CFG, ev)
        assert models(sigma, Box(p), CFG, ev) == (not models(sigma, Diamond(TNot(p)), CFG, ev))


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_star_unfolds_once(data):
    p = sl_formula(data_choose(data), 2)
    ev = make_evaluator(CFG)
    # finite intervals: P* = eps or (P and more) ; P*
    more = TNot(Eps())
    unfolded = TOr(Eps(), Chop(TAnd(p, more), Star(p)))
    for sigma in INTERVALS:
        assert models(sigma, Star(p), CFG, ev) == models(sigma, unfolded, CFG, ev)


def test_models_rejects_empty_interval():
    with pytest.raises(ValueError):
        models((), Eps(), CFG)


def test_enumerated_states_are_accepted():
    p = parse_formula("<> x |-> 0")
    assert any(models((s,), p, CFG) for s in enumerate_states(["x"], CFG, 1))
