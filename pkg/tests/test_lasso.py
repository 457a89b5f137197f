import pytest

from pptlsl.brute import find_model, leaf_classes, bounded_states, translation_mismatches
from pptlsl.lasso import Word, check_lasso
from pptlsl.semantics import Config, MemoryState
from pptlsl.syntax import parse_formula
from pptlsl.translate import make_vector

CFG = Config(2)


def st(x, heap=None):
    return MemoryState.of({"x": x}, heap or {})


def test_word_successor_wraps_to_loop():
    w = Word((5, 6, 7), 1)
    assert [w.next(t) for t in range(3)] == [1, 2, 1]
    with pytest.raises(ValueError):
        Word((1,), 1)


def test_word_suffix_keeps_period():
    w = Word((5, 6, 7), 1)
    s = w.suffix((9,), 2)
    assert s == Word((9, 7, 6), 1)


def test_recurrence_on_alternating_lasso():
    cycle = [st(0), st(1)]
    assert check_lasso(parse_formula("[] <> x = 1"), [], cycle, CFG)
    assert not check_lasso(parse_formula("<> [] x = 1"), [], cycle, CFG)


def test_star_of_unit_pieces_runs_forever():
    assert check_lasso(parse_formula("(x = 0 && X eps)^*"), [], [st(0)], CFG)
    assert not check_lasso(parse_formula("(x = 0 && X eps)^*"), [st(0)], [st(1)], CFG)


def test_chop_needs_finite_left_part():
    p = parse_formula("[] x = 0 ; x = 1")
    assert not check_lasso(p, [], [st(0)], CFG)
    assert check_lasso(parse_formula("x = 0 ; [] x = 1"), [st(0)], [st(1)], CFG)


def test_infinite_models_never_satisfy_eps_bounded_formulas():
    assert not check_lasso(parse_formula("<> eps"), [], [st(0)], CFG)
    assert check_lasso(parse_formula("! <> eps"), [], [st(0)], CFG)


def test_heap_states_in_lassos():
    p = parse_formula("[] (x |-> 0 || emp)")
    assert check_lasso(p, [st(1, {1: 0})], [st(0)], CFG)
    assert not check_lasso(p, [st(1, {1: 0, 2: 0})], [st(0)], CFG)


def test_bounded_search_examples():
    assert find_model(parse_formula("x|->0 * x|->0"), CFG, 3) is None
    sigma = find_model(parse_formula("<> ls(x, 0)"), CFG, 2)
    assert sigma is not None


def test_leaf_classes_are_few():
    p = parse_formula("x = 0 ; x |-> 0")
    reps = leaf_classes(p, bounded_states(p, CFG), CFG)
    assert len(reps) == 3


def test_translation_agrees_on_small_example():
    p = parse_formula("X x=0 || [] x|->0")
    assert translation_mismatches(p, make_vector(2), CFG, 3) == []
