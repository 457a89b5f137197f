"""Syntax trees for terms, separation-logic state formulas and temporal formulas.

Every node is an immutable, hashable dataclass.  Hashes are structural and
stable across processes (they do not depend on ``PYTHONHASHSEED``), which
keeps orderings derived from them deterministic.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator, Mapping, Union


def _part_bytes(value) -> bytes:
    if isinstance(value, Node):
        return b"n" + value.digest.to_bytes(8, "big")
    if isinstance(value, tuple):
        return b"(" + b",".join(_part_bytes(v) for v in value) + b")"
    if isinstance(value, bool):
        return b"b1" if value else b"b0"
    if isinstance(value, int):
        return b"i" + str(value).encode() + b";"
    if isinstance(value, str):
        return b"s" + value.encode() + b"\0"
    raise TypeError(f"unsupported field value {value!r}")


class Node:
    """Base class providing structural equality and a cached stable digest."""

    @classmethod
    def _field_names(cls) -> tuple[str, ...]:
        names = cls.__dict__.get("_names_cache")
        if names is None:
            names = tuple(cls.__dataclass_fields__)
            cls._names_cache = names
        return names

    def _key(self) -> tuple:
        return tuple(getattr(self, name) for name in self._field_names())

    @property
    def digest(self) -> int:
        d = self.__dict__.get("_digest")
        if d is None:
            h = hashlib.blake2b(type(self).__name__.encode(), digest_size=8)
            for part in self._key():
                h.update(_part_bytes(part))
            d = int.from_bytes(h.digest(), "big")
            object.__setattr__(self, "_digest", d)
        return d

    def __hash__(self) -> int:
        return self.digest

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if type(self) is not type(other):
            return NotImplemented if not isinstance(other, Node) else False
        return self.digest == other.digest and self._key() == other._key()

    def __ne__(self, other) -> bool:
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __str__(self) -> str:
        from .syntax import pretty

        return pretty(self)

    def children(self) -> Iterator[Node]:
        for part in self._key():
            if isinstance(part, Node):
                yield part
            elif isinstance(part, tuple):
                for item in part:
                    if isinstance(item, Node):
                        yield item


# ---------------------------------------------------------------- terms


class Term(Node):
    pass


@dataclass(frozen=True, eq=False)
class Const(Term):
    value: int


@dataclass(frozen=True, eq=False)
class Var(Term):
    name: str


def term(x: Union[Term, int, str]) -> Term:
    """Coerce ints to constants and strings to variables."""
    if isinstance(x, Term):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not terms")
    if isinstance(x, int):
        return Const(x)
    return Var(x)


# -------------------------------------------------------- state formulas


class StateFormula(Node):
    pass


@dataclass(frozen=True, eq=False)
class Eq(StateFormula):
    left: Term
    right: Term


@dataclass(frozen=True, eq=False)
class PointsTo(StateFormula):
    left: Term
    right: Term


@dataclass(frozen=True, eq=False)
class Neg(StateFormula):
    body: StateFormula


@dataclass(frozen=True, eq=False)
class Disj(StateFormula):
    left: StateFormula
    right: StateFormula


@dataclass(frozen=True, eq=False)
class Sep(StateFormula):
    """Separating conjunction."""

    left: StateFormula
    right: StateFormula


@dataclass(frozen=True, eq=False)
class Exists(StateFormula):
    var: str
    body: StateFormula


# sugar


@dataclass(frozen=True, eq=False)
class Hook(StateFormula):
    """``e1 ~> e2``: e1 points to e2 somewhere in the heap."""

    left: Term
    right: Term


@dataclass(frozen=True, eq=False)
class Alloc(StateFormula):
    term: Term


@dataclass(frozen=True, eq=False)
class Emp(StateFormula):
    pass


@dataclass(frozen=True, eq=False)
class CountGeq(StateFormula):
    """At least ``n`` cells point to ``term``."""

    term: Term
    n: int


@dataclass(frozen=True, eq=False)
class CountLeq(StateFormula):
    term: Term
    n: int


@dataclass(frozen=True, eq=False)
class CountEq(StateFormula):
    term: Term
    n: int


@dataclass(frozen=True, eq=False)
class ListPlus(StateFormula):
    """A list segment from ``left`` to ``right`` plus a collection of cycles."""

    left: Term
    right: Term


@dataclass(frozen=True, eq=False)
class ListSeg(StateFormula):
    left: Term
    right: Term


@dataclass(frozen=True, eq=False)
class Forall(StateFormula):
    var: str
    body: StateFormula


@dataclass(frozen=True, eq=False)
class Conj(StateFormula):
    left: StateFormula
    right: StateFormula


@dataclass(frozen=True, eq=False)
class Imp(StateFormula):
    left: StateFormula
    right: StateFormula


@dataclass(frozen=True, eq=False)
class BoundedDisjunction(StateFormula):
    """Disjunction of ``body[c/variables]`` over every value vector ``c``.

    Kept symbolic; the range of values is the active configuration's Val.
    """

    variables: tuple[str, ...]
    body: StateFormula


TRUE = Eq(Const(0), Const(0))
FALSE = Neg(TRUE)


# ----------------------------------------------------- temporal formulas


class TemporalFormula(Node):
    pass


@dataclass(frozen=True, eq=False)
class State(TemporalFormula):
    formula: StateFormula


@dataclass(frozen=True, eq=False)
class Prop(TemporalFormula):
    """Atomic proposition of plain PPTL."""

    name: str


@dataclass(frozen=True, eq=False)
class TNot(TemporalFormula):
    body: TemporalFormula


@dataclass(frozen=True, eq=False)
class TOr(TemporalFormula):
    left: TemporalFormula
    right: TemporalFormula


@dataclass(frozen=True, eq=False)
class Next(TemporalFormula):
    body: TemporalFormula


@dataclass(frozen=True, eq=False)
class Prj(TemporalFormula):
    parts: tuple[TemporalFormula, ...]
    body: TemporalFormula

    def __post_init__(self):
        if not self.parts:
            raise ValueError("prj needs at least one projected formula")


@dataclass(frozen=True, eq=False)
class Star(TemporalFormula):
    body: TemporalFormula


# sugar


@dataclass(frozen=True, eq=False)
class Eps(TemporalFormula):
    pass


@dataclass(frozen=True, eq=False)
class Chop(TemporalFormula):
    left: TemporalFormula
    right: TemporalFormula
    # set only inside normal form graphs: the left operand is being watched
    # for termination
    marked: bool = False


@dataclass(frozen=True, eq=False)
class Plus(TemporalFormula):
    body: TemporalFormula


@dataclass(frozen=True, eq=False)
class Diamond(TemporalFormula):
    body: TemporalFormula


@dataclass(frozen=True, eq=False)
class Box(TemporalFormula):
    body: TemporalFormula


@dataclass(frozen=True, eq=False)
class NextN(TemporalFormula):
    n: int
    body: TemporalFormula


@dataclass(frozen=True, eq=False)
class TAnd(TemporalFormula):
    left: TemporalFormula
    right: TemporalFormula


@dataclass(frozen=True, eq=False)
class TImp(TemporalFormula):
    left: TemporalFormula
    right: TemporalFormula


T_TRUE = State(TRUE)
T_FALSE = State(FALSE)

BINDERS = (Exists, Forall)


# ------------------------------------------------------------- utilities


def rebuild(node: Node, fn: Callable[[Node], Node]) -> Node:
    """Return ``node`` with ``fn`` applied to each direct child node."""
    changed = False
    values = []
    for part in node._key():
        if isinstance(part, Node):
            new = fn(part)
            changed |= new is not part
            values.append(new)
        elif isinstance(part, tuple) and part and isinstance(part[0], Node):
            new = tuple(fn(p) for p in part)
            changed |= any(a is not b for a, b in zip(new, part))
            values.append(new)
        else:
            values.append(part)
    if not changed:
        return node
    return type(node)(*values)


@lru_cache(maxsize=None)
def free_vars(node: Node) -> frozenset[str]:
    """Free program variables of a term or formula."""
    if isinstance(node, Var):
        return frozenset((node.name,))
    if isinstance(node, Const):
        return frozenset()
    if isinstance(node, BINDERS):
        return free_vars(node.body) - {node.var}
    if isinstance(node, BoundedDisjunction):
        return free_vars(node.body) - set(node.variables)
    out: frozenset[str] = frozenset()
    for child in node.children():
        out = out | free_vars(child)
    return out


def all_names(node: Node) -> frozenset[str]:
    """Every identifier occurring in ``node``, bound or free."""
    names: set[str] = set()
    stack = [node]
    seen = set()
    while stack:
        n = stack.pop()
        if id(n) in seen:
            continue
        seen.add(id(n))
        if isinstance(n, Var):
            names.add(n.name)
        elif isinstance(n, BINDERS):
            names.add(n.var)
        elif isinstance(n, BoundedDisjunction):
            names.update(n.variables)
        stack.extend(n.children())
    return frozenset(names)


def substitute(phi: Node, x_or_map, value=None) -> Node:
    """Capture-avoiding replacement of free variables by terms.

    ``substitute(phi, "x", 1)`` replaces ``x`` by the constant 1;
    ``substitute(phi, {"x": 1, "y": Var("z")})`` applies a simultaneous map.
    Bound occurrences are left untouched.
    """
    if isinstance(x_or_map, Mapping):
        mapping = {k: term(v) for k, v in x_or_map.items()}
    else:
        mapping = {x_or_map: term(value)}
    if not mapping:
        return phi
    memo: dict[int, Node] = {}

    def go(n: Node, m: dict) -> Node:
        if isinstance(n, Var):
            return m.get(n.name, n)
        if isinstance(n, Const):
            return n
        if not (free_vars(n) & m.keys()):
            return n
        if isinstance(n, BINDERS) and n.var in m:
            inner = {k: v for k, v in m.items() if k != n.var}
            return type(n)(n.var, go(n.body, inner))
        if isinstance(n, BoundedDisjunction) and set(n.variables) & m.keys():
            inner = {k: v for k, v in m.items() if k not in n.variables}
            return BoundedDisjunction(n.variables, go(n.body, inner))
        if m is mapping:
            key = id(n)
            hit = memo.get(key)
            if hit is not None:
                return hit
            out = rebuild(n, lambda c: go(c, m))
            memo[key] = out
            return out
        return rebuild(n, lambda c: go(c, m))

    return go(phi, mapping)


def as_state(p: TemporalFormula) -> StateFormula | None:
    """View a temporal formula without temporal operators as a state formula."""
    if isinstance(p, State):
        return p.formula
    if isinstance(p, TNot):
        body = as_state(p.body)
        return None if body is None else Neg(body)
    if isinstance(p, (TOr, TAnd, TImp)):
        left = as_state(p.left)
        if left is None:
            return None
        right = as_state(p.right)
        if right is None:
            return None
        cls = {TOr: Disj, TAnd: Conj, TImp: Imp}[type(p)]
        return cls(left, right)
    return None


def lift_states(p: TemporalFormula) -> TemporalFormula:
    """Merge boolean combinations of state leaves into single state leaves.

    This is the canonical shape produced by the parser.
    """
    if isinstance(p, (State, Prop, Eps)):
        return p
    p = rebuild(p, lift_states)
    phi = as_state(p)
    if phi is not None and not isinstance(p, State):
        return State(phi)
    return p


def conj_all(items) -> StateFormula:
    items = list(items)
    if not items:
        return TRUE
    out = items[0]
    for item in items[1:]:
        out = Conj(out, item)
    return out


def disj_all(items) -> StateFormula:
    items = list(items)
    if not items:
        return FALSE
    out = items[0]
    for item in items[1:]:
        out = Disj(out, item)
    return out


def walk(node: Node) -> Iterator[Node]:
    """Pre-order traversal visiting shared subtrees once."""
    seen = set()
    stack = [node]
    while stack:
        n = stack.pop()
        if id(n) in seen:
            continue
        seen.add(id(n))
        yield n
        stack.extend(reversed(list(n.children())))


def fresh_name(avoid, prefix: str = "_v") -> str:
    i = 1
    while f"{prefix}{i}" in avoid:
        i += 1
    return f"{prefix}{i}"
