import pytest
from hypothesis import given, settings, strategies as st

from pptlsl.ast import Const, Disj, Emp, Eq, ListSeg, PointsTo, Sep, State, Var
from pptlsl.derived import expand_derived
from pptlsl.semantics import (
    Config, MemoryState, UnboundVariable, enumerate_heaps, enumerate_states,
    eval_state, eval_term, vh,
)
from pptlsl.syntax import parse_state

from formula_gen import core_state, data_choose

CFG = Config(2)
CFG3 = Config(3)
x, y = Var("x"), Var("y")


def core(phi, cfg=CFG):
    return expand_derived(State(phi), cfg).formula


def test_eval_term():
    assert eval_term(MemoryState.of({"x": 1}), x) == 1
    assert eval_term(MemoryState.of(), Const(3)) == 3
    with pytest.raises(UnboundVariable):
        eval_term(MemoryState.of(), x)


def test_points_to_needs_singleton_heap():
    phi = PointsTo(x, Const(0))
    assert eval_state(MemoryState.of({"x": 1}, {1: 0}), phi, CFG)
    assert not eval_state(MemoryState.of({"x": 1}, {1: 0, 2: 0}), phi, CFG)


def test_separating_conjunction_splits_heap():
    phi = Sep(PointsTo(x, Const(0)), PointsTo(y, Const(0)))
    assert eval_state(MemoryState.of({"x": 1, "y": 2}, {1: 0, 2: 0}), phi, CFG)
    assert not eval_state(MemoryState.of({"x": 1, "y": 1}, {1: 0}), phi, CFG)


def test_list_segment_examples():
    ls = core(ListSeg(x, Const(0)), CFG3)
    assert eval_state(MemoryState.of({"x": 1}, {1: 2, 2: 0}), ls, CFG3)
    assert not eval_state(MemoryState.of({"x": 1}, {1: 2, 2: 0, 3: 3}), ls, CFG3)


def test_vh_examples():
    assert vh(((1, 2), (0, 7))) == {1: 2}
    assert vh(((1, 2), (1, 3))) is None
    assert vh(((0, 0), (0, 0))) == {}


def test_enumerate_counts():
    assert len(list(enumerate_states([], Config(1), 0))) == 1
    assert len(list(enumerate_states(["x"], Config(1), 0))) == 2
    states = list(enumerate_states(["x"], CFG, 1))
    assert len(states) == 21
    assert len(set(states)) == 21


def _chain_oracle(s: MemoryState, start: int) -> bool:
    """Heap is exactly a non-empty acyclic null-terminated chain from ``start``."""
    heap = s.heap_map
    if start == 0:
        return False
    seen = []
    cur = start
    while cur != 0:
        if cur in seen or cur not in heap:
            return False
        seen.append(cur)
        cur = heap[cur]
    return set(seen) == set(heap)


def test_list_segment_matches_graph_walk():
    ls = core(ListSeg(x, Const(0)))
    for s in enumerate_states(["x"], CFG, 2):
        assert eval_state(s, ls, CFG) == _chain_oracle(s, s.stack_map["x"])


def test_emp_iff_empty_heap():
    emp = core(Emp())
    for s in enumerate_states(["x"], CFG, 2):
        assert eval_state(s, emp, CFG) == (not s.heap_map)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_sep_commutative_and_associative(data):
    choose = data_choose(data)
    a, b, c = (core_state(choose, 2) for _ in range(3))
    for s in enumerate_states(["x", "y"], CFG3, 2):
        if len(s.heap_map) > 2:
            continue
        assert eval_state(s, Sep(a, b), CFG3) == eval_state(s, Sep(b, a), CFG3)
        assert eval_state(s, Sep(Sep(a, b), c), CFG3) == eval_state(s, Sep(a, Sep(b, c)), CFG3)


def test_points_to_precision():
    phi = PointsTo(x, y)
    for s in enumerate_states(["x", "y"], CFG, 2):
        if eval_state(s, phi, CFG):
            assert len(s.heap_map) == 1


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2)), max_size=3))
def test_vh_validity(pairs):
    firsts = [a for a, _ in pairs if a != 0]
    heap = vh(tuple(pairs))
    assert (heap is None) == (len(firsts) != len(set(firsts)))
    if heap is not None:
        assert len(heap) <= len(pairs)
        assert heap in list(enumerate_heaps(CFG, len(pairs)))


def test_disjunction_and_equality():
    phi = parse_state("x = 0 || x = y")
    assert phi == Disj(Eq(x, Const(0)), Eq(x, y))
    assert eval_state(MemoryState.of({"x": 2, "y": 2}), phi, CFG)
