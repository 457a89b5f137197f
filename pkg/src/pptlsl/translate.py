"""Heap elimination: encoding bounded heaps as pairs of stack variables.

A heap with at most ``n`` cells is represented by ``n`` pairs of fresh
variables ``($h1, $h1'), ..., ($hn, $hn')``; a pair whose first component
is 0 is an unused slot.  ``f_state`` rewrites a separation-logic formula
into an equivalent heap-free formula over these variables, and ``F`` lifts
it to temporal formulas.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import product
from typing import Sequence

from .ast import (
    FALSE, TRUE, BoundedDisjunction, Conj, Const, Disj, Eq, Exists, Neg,
    PointsTo, Prop, Sep, State, StateFormula, TemporalFormula, Term, Var,
    free_vars, lift_states, rebuild, substitute, walk,
)
from .derived import expand_derived
from .semantics import Config, MemoryState, vh

VarVector = tuple[tuple[str, str], ...]
RESERVED_PREFIX = "$h"


class LengthMismatch(ValueError):
    pass


class HeapTooLarge(ValueError):
    pass


class InvalidVector(ValueError):
    pass


class VectorTooSmall(UserWarning):
    pass


def make_vector(n: int, start: int = 1) -> VarVector:
    """``(($h<start>, $h<start>'), ...)`` with ``n`` pairs."""
    return tuple((f"{RESERVED_PREFIX}{i}", f"{RESERVED_PREFIX}{i}'") for i in range(start, start + n))


def vector_names(c: VarVector) -> tuple[str, ...]:
    return tuple(name for pair in c for name in pair)


@dataclass
class FreshVectors:
    """Per-translation supply of fresh vectors (literal mode only)."""

    next_index: int

    @classmethod
    def after(cls, c: VarVector) -> "FreshVectors":
        used = [int(a[len(RESERVED_PREFIX):]) for a, _ in c if a[len(RESERVED_PREFIX):].isdigit()]
        return cls(max(used, default=0) + 1)

    def take(self, n: int) -> VarVector:
        out = make_vector(n, self.next_index)
        self.next_index += n
        return out


# ------------------------------------------------------------------- sizes


def _size(phi: StateFormula) -> int:
    if isinstance(phi, Eq):
        return 0
    if isinstance(phi, PointsTo):
        return 1
    if isinstance(phi, Neg):
        return _size(phi.body)
    if isinstance(phi, Disj):
        return max(_size(phi.left), _size(phi.right))
    if isinstance(phi, Sep):
        return _size(phi.left) + _size(phi.right)
    if isinstance(phi, (Exists, BoundedDisjunction)):
        # a quantifier stands for a finite disjunction of instances of its body
        return _size(phi.body)
    raise TypeError(f"not a core state formula: {type(phi).__name__}")


def size(phi: StateFormula) -> int:
    """Number of heap cells ``phi`` can talk about; sugar is expanded first."""
    return _size(expand_derived(phi))


def state_leaves(p: TemporalFormula) -> list[StateFormula]:
    """Maximal state subformulas of ``p``."""
    out = []
    for n in walk(lift_states(p)):
        if isinstance(n, State):
            out.append(n.formula)
    return out


def vector_size(p: TemporalFormula | StateFormula) -> int:
    """Largest ``size(phi) + |fv(phi)|`` over the maximal state subformulas, at least 1."""
    leaves = [p] if isinstance(p, StateFormula) else state_leaves(p)
    return max([size(phi) + len(free_vars(phi)) for phi in leaves] + [1])


# -------------------------------------------------------------- formulas


def eq(a: Term, b: Term) -> StateFormula:
    if isinstance(a, Const) and isinstance(b, Const):
        return TRUE if a.value == b.value else FALSE
    return Eq(a, b)


def ne(a: Term, b: Term) -> StateFormula:
    return neg(eq(a, b))


def neg(phi: StateFormula) -> StateFormula:
    if phi == TRUE:
        return FALSE
    if phi == FALSE:
        return TRUE
    return Neg(phi)


def conj(items: Sequence[StateFormula]) -> StateFormula:
    kept = []
    for item in items:
        if item == FALSE:
            return FALSE
        if item != TRUE:
            kept.append(item)
    if not kept:
        return TRUE
    out = kept[0]
    for item in kept[1:]:
        out = Conj(out, item)
    return out


def disj(items: Sequence[StateFormula]) -> StateFormula:
    kept = []
    seen = set()
    for item in items:
        if item == TRUE:
            return TRUE
        if item != FALSE and item not in seen:
            seen.add(item)
            kept.append(item)
    if not kept:
        return FALSE
    out = kept[0]
    for item in kept[1:]:
        out = Disj(out, item)
    return out


def decompose(c: VarVector, c1: VarVector, c2: VarVector) -> StateFormula:
    """The formula stating that ``c`` splits into ``c1`` and ``c2``."""
    if not len(c) == len(c1) == len(c2):
        raise LengthMismatch(f"vector lengths differ: {len(c)}, {len(c1)}, {len(c2)}")
    names = [vector_names(v) for v in (c, c1, c2)]
    if len(set().union(*names)) != sum(len(n) for n in names):
        raise ValueError("vectors must be pairwise variable-disjoint")
    clauses = []
    for (a, a2), (l1, l2), (r1, r2) in zip(c, c1, c2):
        a, a2, l1, l2, r1, r2 = map(Var, (a, a2, l1, l2, r1, r2))
        left = conj([Eq(l1, a), Eq(r1, Const(0)), Eq(l2, a2)])
        right = conj([Eq(l1, Const(0)), Eq(r1, a), Eq(r2, a2)])
        clauses.append(Disj(left, right))
    return conj(clauses)


_ZERO = (Const(0), Const(0))
_TermVector = tuple[tuple[Term, Term], ...]


class _Translator:
    def __init__(self, cfg: Config, literal: bool, fresh: FreshVectors | None = None):
        self.cfg = cfg
        self.literal = literal
        self.fresh = fresh
        self.memo: dict = {}

    def f(self, phi: StateFormula, vec: _TermVector) -> StateFormula:
        key = (phi, vec)
        hit = self.memo.get(key)
        if hit is None:
            hit = self.memo[key] = self._f(phi, vec)
        return hit

    def _f(self, phi: StateFormula, vec: _TermVector) -> StateFormula:
        if isinstance(phi, Eq):
            return eq(phi.left, phi.right)
        if isinstance(phi, PointsTo):
            out = []
            for i, (ci1, ci2) in enumerate(vec):
                others = [eq(cj1, Const(0)) for j, (cj1, _) in enumerate(vec) if j != i]
                out.append(conj([ne(ci1, Const(0)), *others, eq(ci1, phi.left), eq(ci2, phi.right)]))
            return disj(out)
        if isinstance(phi, Neg):
            return neg(self.f(phi.body, vec))
        if isinstance(phi, Disj):
            return disj([self.f(phi.left, vec), self.f(phi.right, vec)])
        if isinstance(phi, Exists):
            return disj([self.f(substitute(phi.body, phi.var, v), vec) for v in self.cfg.values])
        if isinstance(phi, Sep):
            return self._literal_sep(phi, vec) if self.literal else self._solved_sep(phi, vec)
        raise TypeError(f"not a core state formula: {type(phi).__name__}")

    def _solved_sep(self, phi: Sep, vec: _TermVector) -> StateFormula:
        # The split formula fixes each slot of the two sub-vectors up to the
        # content of unused slots, which no translated formula inspects; so
        # the value enumeration collapses to a choice of side per live slot.
        live = [i for i, pair in enumerate(vec) if pair != _ZERO]
        out = []
        for sides in product((0, 1), repeat=len(live)):
            left = list(vec)
            right = list(vec)
            for i, side in zip(live, sides):
                if side == 0:
                    right[i] = _ZERO
                else:
                    left[i] = _ZERO
            out.append(conj([self.f(phi.left, tuple(left)), self.f(phi.right, tuple(right))]))
        return disj(out)

    def _literal_sep(self, phi: Sep, vec: _TermVector) -> StateFormula:
        if any(not isinstance(t, Var) for pair in vec for t in pair):
            raise ValueError("literal mode needs a vector of variables")
        c = tuple((a.name, b.name) for a, b in vec)
        c1 = self.fresh.take(len(c))
        c2 = self.fresh.take(len(c))
        body = conj([
            decompose(c, c1, c2),
            self.f(phi.left, _as_terms(c1)),
            self.f(phi.right, _as_terms(c2)),
        ])
        return BoundedDisjunction(vector_names(c2), BoundedDisjunction(vector_names(c1), body))


def _as_terms(c: VarVector) -> _TermVector:
    return tuple((Var(a), Var(b)) for a, b in c)


def _check_disjoint(p, c: VarVector) -> None:
    clash = free_vars(p) & set(vector_names(c))
    if clash:
        raise ValueError(f"formula variables clash with the heap vector: {sorted(clash)}")


def f_state(phi: StateFormula, c: VarVector, cfg: Config, mode: str = "solved") -> StateFormula:
    """Heap-free formula over ``fv(phi)`` and ``c`` equivalent to ``phi``.

    ``mode="literal"`` keeps the value-vector enumeration of the separating
    conjunction as symbolic bounded disjunctions over fresh vectors; the
    default ``"solved"`` mode eliminates those fresh vectors up front.
    """
    if mode not in ("solved", "literal"):
        raise ValueError(f"unknown mode {mode!r}")
    _check_disjoint(phi, c)
    core = expand_derived(phi, cfg)
    need = _size(core) + len(free_vars(phi))
    if len(c) < need:
        warnings.warn(
            f"vector of size {len(c)} is smaller than size+|fv| = {need}; "
            "heaps that need more cells are not represented",
            VectorTooSmall,
            stacklevel=2,
        )
    fresh = FreshVectors.after(c) if mode == "literal" else None
    return _Translator(cfg, mode == "literal", fresh).f(core, _as_terms(c))


def F(p: TemporalFormula, c: VarVector, cfg: Config, mode: str = "solved") -> TemporalFormula:
    """Apply ``f_state`` at every maximal state subformula, sharing one vector."""
    _check_disjoint(p, c)
    fresh = FreshVectors.after(c) if mode == "literal" else None
    tr = _Translator(cfg, mode == "literal", fresh)
    vec = _as_terms(c)

    def go(q: TemporalFormula) -> TemporalFormula:
        if isinstance(q, State):
            return State(tr.f(expand_derived(q.formula, cfg), vec))
        if isinstance(q, Prop):
            raise TypeError("plain propositions cannot be translated")
        return rebuild(q, go)

    return go(lift_states(p))


def is_heap_free(node) -> bool:
    return not any(isinstance(n, (PointsTo, Sep, Exists)) for n in walk(node))


# -------------------------------------------------------------- intervals


def encode_heap(heap: dict[int, int], c: VarVector) -> dict[str, int]:
    """Bindings of ``c`` for ``heap``: cells by ascending location, then (0, 0)."""
    cells = sorted(heap.items())
    if len(cells) > len(c):
        raise HeapTooLarge(f"heap has {len(cells)} cells but the vector only {len(c)} slots")
    cells += [(0, 0)] * (len(c) - len(cells))
    out = {}
    for (a, b), (loc, val) in zip(c, cells):
        out[a] = loc
        out[b] = val
    return out


def encode_state(s: MemoryState, c: VarVector) -> MemoryState:
    clash = set(s.stack_map) & set(vector_names(c))
    if clash:
        raise ValueError(f"stack already binds vector variables {sorted(clash)}")
    return MemoryState.of({**s.stack_map, **encode_heap(s.heap_map, c)}, {})


def encode_interval(sigma: Sequence[MemoryState], c: VarVector, cfg: Config | None = None) -> tuple[MemoryState, ...]:
    """Move every heap of ``sigma`` into stack bindings of ``c``."""
    return tuple(encode_state(s, c) for s in sigma)


def decode_stack(stack: dict[str, int], c: VarVector) -> MemoryState:
    """Inverse of ``encode_state``: rebuild the heap from the vector values."""
    try:
        values = [(stack[a], stack[b]) for a, b in c]
    except KeyError as e:
        raise InvalidVector(f"vector variable {e.args[0]} is unassigned") from None
    heap = vh(values)
    if heap is None:
        raise InvalidVector(f"two slots share a location: {values}")
    names = set(vector_names(c))
    return MemoryState.of({k: v for k, v in stack.items() if k not in names}, heap)
