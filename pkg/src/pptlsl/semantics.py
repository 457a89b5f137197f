"""Memory states and the satisfaction relation for separation-logic formulas."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product
from typing import Iterable, Iterator, Mapping, Sequence

from .ast import (
    BoundedDisjunction, Conj, Const, Disj, Eq, Exists, Forall, Imp, Neg,
    PointsTo, Sep, StateFormula, Term, Var,
)
from .derived import unfold


class UnboundVariable(LookupError):
    def __init__(self, name: str):
        super().__init__(f"variable {name!r} is not bound in the stack")
        self.name = name


@dataclass(frozen=True)
class Config:
    """Locations are ``1..max_loc``; values are ``0..max_loc``."""

    max_loc: int

    def __post_init__(self):
        if self.max_loc < 1:
            raise ValueError("max_loc must be at least 1")

    @property
    def values(self) -> range:
        return range(self.max_loc + 1)

    @property
    def locations(self) -> range:
        return range(1, self.max_loc + 1)


@dataclass(frozen=True)
class MemoryState:
    """A (stack, heap) pair.  Both maps are stored as sorted item tuples."""

    stack: tuple[tuple[str, int], ...] = ()
    heap: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        for loc, _ in self.heap:
            if loc <= 0:
                raise ValueError(f"heap address {loc} is not a location")

    @classmethod
    def of(cls, stack: Mapping[str, int] | None = None, heap: Mapping[int, int] | None = None) -> "MemoryState":
        return cls(tuple(sorted((stack or {}).items())),
                   tuple(sorted((int(k), v) for k, v in (heap or {}).items())))

    @cached_property
    def stack_map(self) -> dict[str, int]:
        return dict(self.stack)

    @cached_property
    def heap_map(self) -> dict[int, int]:
        return dict(self.heap)

    def __repr__(self) -> str:
        return f"MemoryState({self.stack_map}, {self.heap_map})"


def eval_term(s: MemoryState | Mapping[str, int], e: Term) -> int:
    stack = s.stack_map if isinstance(s, MemoryState) else s
    if isinstance(e, Const):
        return e.value
    try:
        return stack[e.name]
    except KeyError:
        raise UnboundVariable(e.name) from None


def _sat(phi: StateFormula, stack: dict, heap: dict, vals: range) -> bool:
    if isinstance(phi, Eq):
        return eval_term(stack, phi.left) == eval_term(stack, phi.right)
    if isinstance(phi, PointsTo):
        a = eval_term(stack, phi.left)
        b = eval_term(stack, phi.right)
        return len(heap) == 1 and heap.get(a, None) == b and a in heap
    if isinstance(phi, Neg):
        return not _sat(phi.body, stack, heap, vals)
    if isinstance(phi, Disj):
        return _sat(phi.left, stack, heap, vals) or _sat(phi.right, stack, heap, vals)
    if isinstance(phi, Conj):
        return _sat(phi.left, stack, heap, vals) and _sat(phi.right, stack, heap, vals)
    if isinstance(phi, Imp):
        return not _sat(phi.left, stack, heap, vals) or _sat(phi.right, stack, heap, vals)
    if isinstance(phi, Sep):
        cells = list(heap.items())
        for bits in range(1 << len(cells)):
            h1 = {k: v for i, (k, v) in enumerate(cells) if bits >> i & 1}
            h2 = {k: v for i, (k, v) in enumerate(cells) if not bits >> i & 1}
            if _sat(phi.left, stack, h1, vals) and _sat(phi.right, stack, h2, vals):
                return True
        return False
    if isinstance(phi, Exists):
        return any(_sat(phi.body, {**stack, phi.var: v}, heap, vals) for v in vals)
    if isinstance(phi, Forall):
        return all(_sat(phi.body, {**stack, phi.var: v}, heap, vals) for v in vals)
    if isinstance(phi, BoundedDisjunction):
        for values in product(vals, repeat=len(phi.variables)):
            if _sat(phi.body, {**stack, **dict(zip(phi.variables, values))}, heap, vals):
                return True
        return False
    unfolded = unfold(phi)
    if unfolded is phi:
        raise TypeError(f"not a state formula: {type(phi).__name__}")
    return _sat(unfolded, stack, heap, vals)


def eval_state(s: MemoryState, phi: StateFormula, cfg: Config) -> bool:
    """Decide ``s |= phi``.  Derived forms are unfolded on the fly."""
    return _sat(phi, s.stack_map, s.heap_map, cfg.values)


def vh(c: Sequence[tuple[int, int]]) -> dict[int, int] | None:
    """Decode a value vector into a heap; ``None`` when it is not well formed."""
    heap: dict[int, int] = {}
    for loc, val in c:
        if loc == 0:
            continue
        if loc in heap:
            return None
        heap[loc] = val
    return heap


def enumerate_heaps(cfg: Config, bound: int) -> Iterator[dict[int, int]]:
    locs = list(cfg.locations)
    for size in range(min(bound, len(locs)) + 1):
        for dom in combinations(locs, size):
            for vals in product(cfg.values, repeat=size):
                yield dict(zip(dom, vals))


def enumerate_stacks(variables: Iterable[str], cfg: Config) -> Iterator[dict[str, int]]:
    names = sorted(variables)
    for vals in product(cfg.values, repeat=len(names)):
        yield dict(zip(names, vals))


def enumerate_states(variables: Iterable[str], cfg: Config, heap_bound: int) -> Iterator[MemoryState]:
    """Every state whose stack domain is exactly ``variables`` and whose heap
    has at most ``heap_bound`` cells."""
    heaps = list(enumerate_heaps(cfg, heap_bound))
    for stack in enumerate_stacks(variables, cfg):
        for heap in heaps:
            yield MemoryState.of(stack, heap)
