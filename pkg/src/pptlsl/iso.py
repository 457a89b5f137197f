"""Correspondence between heap-free formulas and plain PPTL formulas.

Equations become propositions: ``n = x_j`` is ``q_n_j`` and ``x_i = x_j``
(with ``i < j``) is ``p_i_j``, where variable indices come from a
``NameTable``.  The connectives are mapped one to one.  ``0 = 0`` (the
constant ``true`` of state formulas) maps to the proposition ``true``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .ast import (
    TRUE, Box, Chop, Conj, Const, Diamond, Disj, Eps, Eq, Imp, Neg, Next,
    NextN, Node, Plus, Prj, Prop, State, StateFormula, Star, TAnd, TImp, TNot,
    TOr, TemporalFormula, Var, lift_states,
)

TRUE_PROP = "true"
_NAME = re.compile(r"^([pq])_(\d+)_(\d+)$")


class ConstConst(ValueError):
    def __init__(self, n: int, m: int):
        super().__init__(f"equation {n} = {m} between constants must be folded first")
        self.n, self.m = n, m


class ReflexiveEquation(ValueError):
    pass


class UnknownProposition(KeyError):
    pass


class NotRestricted(TypeError):
    pass


@dataclass
class NameTable:
    """Variable name <-> index, in order of first occurrence."""

    names: list[str] = field(default_factory=list)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            self.names.append(name)
            return len(self.names) - 1

    def name(self, i: int) -> str:
        if not 0 <= i < len(self.names):
            raise UnknownProposition(f"no variable with index {i}")
        return self.names[i]

    def rows(self) -> list[tuple[str, str]]:
        return [(f"x{i}", n) for i, n in enumerate(self.names)]


def canonical_eq(eq: Eq, table: NameTable) -> Eq:
    """Constant on the left; of two variables the lower index on the left."""
    a, b = eq.left, eq.right
    if isinstance(a, Const) and isinstance(b, Const):
        raise ConstConst(a.value, b.value)
    if isinstance(b, Const):
        return Eq(b, a)
    if isinstance(a, Var) and isinstance(b, Var):
        i = table.index(a.name)
        if table.index(b.name) < i:
            return Eq(b, a)
    return eq


def g(eq: Eq, table: NameTable) -> Prop:
    """The proposition naming an equation."""
    if eq == TRUE:
        return Prop(TRUE_PROP)
    c = canonical_eq(eq, table)
    if isinstance(c.left, Const):
        return Prop(f"q_{c.left.value}_{table.index(c.right.name)}")
    i, j = table.index(c.left.name), table.index(c.right.name)
    if i == j:
        raise ReflexiveEquation(f"{c.left.name} = {c.right.name} is trivially true")
    return Prop(f"p_{i}_{j}")


def g_inverse(q: Prop, table: NameTable) -> Eq:
    if q.name == TRUE_PROP:
        return TRUE
    m = _NAME.match(q.name)
    if not m:
        raise UnknownProposition(f"{q.name!r} is not an equation name")
    kind, i, j = m.group(1), int(m.group(2)), int(m.group(3))
    if kind == "q":
        return Eq(Const(i), Var(table.name(j)))
    if i >= j:
        raise UnknownProposition(f"{q.name!r} needs i < j")
    return Eq(Var(table.name(i)), Var(table.name(j)))


def _g_state(phi: StateFormula, table: NameTable) -> TemporalFormula:
    if isinstance(phi, Eq):
        return g(phi, table)
    if isinstance(phi, Neg):
        return TNot(_g_state(phi.body, table))
    if isinstance(phi, Disj):
        return TOr(_g_state(phi.left, table), _g_state(phi.right, table))
    if isinstance(phi, Conj):
        return TAnd(_g_state(phi.left, table), _g_state(phi.right, table))
    if isinstance(phi, Imp):
        return TImp(_g_state(phi.left, table), _g_state(phi.right, table))
    raise NotRestricted(f"{type(phi).__name__} is not allowed in restricted formulas")


_UNARY = (TNot, Next, Star, Plus, Diamond, Box)
_BINARY = (TOr, TAnd, TImp, Chop)


def G(p: TemporalFormula, table: NameTable | None = None) -> tuple[TemporalFormula, NameTable]:
    """Map a restricted formula to PPTL, returning the name table used."""
    table = NameTable() if table is None else table

    def go(q: TemporalFormula) -> TemporalFormula:
        if isinstance(q, State):
            return _g_state(q.formula, table)
        if isinstance(q, Eps):
            return q
        if isinstance(q, _UNARY):
            return type(q)(go(q.body))
        if isinstance(q, NextN):
            return NextN(q.n, go(q.body))
        if isinstance(q, Chop):
            return Chop(go(q.left), go(q.right))
        if isinstance(q, _BINARY):
            return type(q)(go(q.left), go(q.right))
        if isinstance(q, Prj):
            return Prj(tuple(go(x) for x in q.parts), go(q.body))
        raise NotRestricted(f"unexpected node {type(q).__name__}")

    return go(p), table


def H(q: TemporalFormula, table: NameTable) -> TemporalFormula:
    """Inverse of ``G``; boolean combinations of equations become state formulas."""

    def go(x: TemporalFormula) -> TemporalFormula:
        if isinstance(x, Prop):
            return State(g_inverse(x, table))
        if isinstance(x, State):
            raise NotRestricted("PPTL formulas have no state formulas")
        if isinstance(x, Eps):
            return x
        if isinstance(x, _UNARY):
            return type(x)(go(x.body))
        if isinstance(x, NextN):
            return NextN(x.n, go(x.body))
        if isinstance(x, Chop):
            return Chop(go(x.left), go(x.right))
        if isinstance(x, _BINARY):
            return type(x)(go(x.left), go(x.right))
        if isinstance(x, Prj):
            return Prj(tuple(go(y) for y in x.parts), go(x.body))
        raise NotRestricted(f"unexpected node {type(x).__name__}")

    return lift_states(go(q))


def canonical(p: TemporalFormula, table: NameTable | None = None) -> tuple[TemporalFormula, NameTable]:
    """Orient every equation as ``g`` reads it; ``H(G(p))`` returns this form."""
    table = NameTable() if table is None else table
    q, _ = G(p, table)
    return H(q, table), table


def _view(p: Node):
    """Present state-level connectives as their temporal counterparts."""
    if isinstance(p, State):
        phi = p.formula
        if isinstance(phi, Neg):
            return TNot(State(phi.body))
        if isinstance(phi, Disj):
            return TOr(State(phi.left), State(phi.right))
        if isinstance(phi, Conj):
            return TAnd(State(phi.left), State(phi.right))
        if isinstance(phi, Imp):
            return TImp(State(phi.left), State(phi.right))
    return p


def is_isomorphic(ps: TemporalFormula, q: TemporalFormula, table: NameTable) -> bool:
    """Structural correspondence: same shape, equations matched by ``g``."""
    ps = _view(ps)
    if isinstance(ps, State):
        if not isinstance(ps.formula, Eq) or not isinstance(q, Prop):
            return False
        try:
            return g(ps.formula, table) == q
        except (ConstConst, ReflexiveEquation):
            return False
    if type(ps) is not type(q):
        return False
    if isinstance(ps, Eps):
        return True
    if isinstance(ps, NextN):
        return ps.n == q.n and is_isomorphic(ps.body, q.body, table)
    if isinstance(ps, _UNARY):
        return is_isomorphic(ps.body, q.body, table)
    if isinstance(ps, _BINARY):
        return is_isomorphic(ps.left, q.left, table) and is_isomorphic(ps.right, q.right, table)
    if isinstance(ps, Prj):
        return len(ps.parts) == len(q.parts) and all(
            is_isomorphic(a, b, table) for a, b in zip(ps.parts, q.parts)
        ) and is_isomorphic(ps.body, q.body, table)
    return False
