"""Bounded model search by enumeration, used as an independent oracle.

Temporal operators only look at states through their state subformulas, so
two states satisfying the same leaves are interchangeable.  The search
therefore enumerates intervals over one representative per leaf class
instead of over all bounded states; the verdicts are identical.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Iterator, Sequence

from .ast import State, TemporalFormula, free_vars, walk
from .derived import expand_derived
from .intervals import make_evaluator
from .semantics import Config, MemoryState, enumerate_stacks, enumerate_states, eval_state, vh
from .translate import F, VarVector, encode_state, vector_names, vector_size


def leaves(p: TemporalFormula) -> list:
    seen = []
    for n in walk(p):
        if isinstance(n, State) and n.formula not in seen:
            seen.append(n.formula)
    return seen


def leaf_classes(p: TemporalFormula, states: Iterable[MemoryState], cfg: Config) -> list[MemoryState]:
    """The first state of each class of states agreeing on every leaf of ``p``."""
    core = expand_derived(p)
    ls = leaves(core)
    reps: dict[tuple[bool, ...], MemoryState] = {}
    for s in states:
        key = tuple(eval_state(s, phi, cfg) for phi in ls)
        reps.setdefault(key, s)
    return list(reps.values())


def bounded_states(p: TemporalFormula, cfg: Config, heap_bound: int | None = None,
                   variables: Sequence[str] = ()) -> Iterator[MemoryState]:
    if heap_bound is None:
        heap_bound = vector_size(p)
    names = sorted(set(free_vars(p)) | set(variables))
    return enumerate_states(names, cfg, heap_bound)


def intervals(reps: Sequence, max_len: int) -> Iterator[tuple]:
    for n in range(1, max_len + 1):
        yield from product(reps, repeat=n)


def find_model(p: TemporalFormula, cfg: Config, max_len: int, heap_bound: int | None = None):
    """A finite model of ``p`` of length at most ``max_len``, or None."""
    reps = leaf_classes(p, bounded_states(p, cfg, heap_bound), cfg)
    core = expand_derived(p)
    ev = make_evaluator(cfg)
    for sigma in intervals(reps, max_len):
        if ev.ev(core, sigma):
            return sigma
    return None


def _paired_mismatches(p, q, pairs, cfg: Config, max_len: int) -> list[tuple]:
    """Intervals of pairs ``(a, b)`` on which ``p`` over the ``a`` side and
    ``q`` over the ``b`` side disagree, one interval per class sequence."""
    core_p, core_q = expand_derived(p), expand_derived(q)
    left, right = leaves(core_p), leaves(core_q)
    reps: dict = {}
    for a, b in pairs:
        key = (tuple(eval_state(a, phi, cfg) for phi in left),
               tuple(eval_state(b, phi, cfg) for phi in right))
        reps.setdefault(key, (a, b))
    ev = make_evaluator(cfg)
    out = []
    for seq in intervals(list(reps.values()), max_len):
        sigma = tuple(a for a, _ in seq)
        if ev.ev(core_p, sigma) != ev.ev(core_q, tuple(b for _, b in seq)):
            out.append(sigma)
    return out


def mismatches(p: TemporalFormula, q: TemporalFormula, states: Iterable[MemoryState], cfg: Config,
               max_len: int) -> list[tuple[MemoryState, ...]]:
    """Intervals over ``states`` of at most ``max_len`` states separating ``p`` from ``q``."""
    return _paired_mismatches(p, q, ((s, s) for s in states), cfg, max_len)


def translation_mismatches(p: TemporalFormula, c: VarVector, cfg: Config, max_len: int,
                           mode: str = "solved") -> list[tuple[MemoryState, ...]]:
    """Intervals on which ``p`` and ``F(p, c)`` disagree.

    States range over every bounded state whose heap fits in ``c``; the
    translation is evaluated on the encoded interval.
    """
    pairs = ((s, encode_state(s, c)) for s in bounded_states(p, cfg, len(c)))
    return _paired_mismatches(p, F(p, c, cfg, mode), pairs, cfg, max_len)


def encoded_states(p: TemporalFormula, c: VarVector, cfg: Config) -> list[MemoryState]:
    """Encodings of the bounded states for ``p`` whose heaps fit in ``c``."""
    names = sorted(set(free_vars(p)) - set(vector_names(c)))
    return [encode_state(s, c) for s in enumerate_states(names, cfg, len(c))]


def valid_assignments(p: TemporalFormula, c: VarVector, cfg: Config) -> list[MemoryState]:
    """Every heap-free state binding ``p``'s variables and a valid ``c``.

    Unlike ``encoded_states`` this includes every vector denoting a heap,
    not only the canonical packing.
    """
    names = sorted(set(free_vars(p)) - set(vector_names(c)))
    out = []
    for stack in enumerate_stacks(names + list(vector_names(c)), cfg):
        if vh([(stack[a], stack[b]) for a, b in c]) is not None:
            out.append(MemoryState.of(stack))
    return out
