"""Expansion of derived (sugar) forms into the core constructors."""

from __future__ import annotations

from functools import lru_cache
from itertools import product

from .ast import (
    TRUE, T_TRUE, Alloc, BoundedDisjunction, Box, Chop, Conj, Const, CountEq,
    CountGeq, CountLeq, Diamond, Disj, Emp, Eps, Eq, Exists, Forall, Hook,
    Imp, ListPlus, ListSeg, Neg, Next, NextN, Node, Plus, PointsTo, Prj, Prop,
    Sep, Star, State, StateFormula, TAnd, TImp, TNot, TOr, TemporalFormula,
    Term, Var, all_names, fresh_name, substitute,
)

CORE_STATE = (Eq, PointsTo, Neg, Disj, Sep, Exists)
CORE_TEMPORAL = (State, TNot, TOr, Next, Prj, Star, Prop)


def _ne(a: Term, b: Term) -> StateFormula:
    return Neg(Eq(a, b))


def _pointer_chain(e: Term, n: int) -> StateFormula:
    """``(exists y . y |-> e) * ... * (exists y . y |-> e) * true`` with n copies."""
    y = fresh_name(all_names(e))
    cell = Exists(y, PointsTo(Var(y), e))
    out: StateFormula = TRUE
    for _ in range(n):
        out = Sep(cell, out)
    return out


def unfold(phi: StateFormula) -> StateFormula:
    """One step of sugar elimination at the root of ``phi``."""
    if isinstance(phi, Hook):
        return Sep(PointsTo(phi.left, phi.right), TRUE)
    if isinstance(phi, Alloc):
        x = fresh_name(all_names(phi.term))
        return Exists(x, Hook(phi.term, Var(x)))
    if isinstance(phi, Emp):
        return Neg(Exists("_v1", Alloc(Var("_v1"))))
    if isinstance(phi, CountGeq):
        return Conj(_ne(phi.term, Const(0)), _pointer_chain(phi.term, phi.n))
    if isinstance(phi, CountLeq):
        return Conj(_ne(phi.term, Const(0)), Neg(_pointer_chain(phi.term, phi.n + 1)))
    if isinstance(phi, CountEq):
        upper = Neg(_pointer_chain(phi.term, phi.n + 1))
        if phi.n == 0:
            return Conj(_ne(phi.term, Const(0)), upper)
        return Conj(_ne(phi.term, Const(0)), Conj(_pointer_chain(phi.term, phi.n), upper))
    if isinstance(phi, ListPlus):
        e1, e2 = phi.left, phi.right
        x = fresh_name(all_names(phi))
        vx = Var(x)
        return Conj(
            Alloc(e1),
            Conj(
                Imp(_ne(e2, e1), Conj(Neg(Alloc(e2)), CountEq(e1, 0))),
                Conj(
                    Forall(x, Imp(_ne(vx, e2), Imp(CountEq(vx, 1), Alloc(vx)))),
                    Forall(x, Imp(_ne(vx, Const(0)), CountLeq(vx, 1))),
                ),
            ),
        )
    if isinstance(phi, ListSeg):
        r = ListPlus(phi.left, phi.right)
        return Conj(r, Neg(Sep(r, Neg(Emp()))))
    if isinstance(phi, Forall):
        return Neg(Exists(phi.var, Neg(phi.body)))
    if isinstance(phi, Conj):
        return Neg(Disj(Neg(phi.left), Neg(phi.right)))
    if isinstance(phi, Imp):
        return Disj(Neg(phi.left), phi.right)
    return phi


@lru_cache(maxsize=None)
def _expand_state(phi: StateFormula, max_loc: int | None) -> StateFormula:
    if isinstance(phi, (Eq, PointsTo)):
        return phi
    if isinstance(phi, Neg):
        return Neg(_expand_state(phi.body, max_loc))
    if isinstance(phi, (Disj, Sep)):
        return type(phi)(_expand_state(phi.left, max_loc), _expand_state(phi.right, max_loc))
    if isinstance(phi, Exists):
        return Exists(phi.var, _expand_state(phi.body, max_loc))
    if isinstance(phi, BoundedDisjunction):
        body = _expand_state(phi.body, max_loc)
        if max_loc is None:
            return BoundedDisjunction(phi.variables, body)
        out = None
        for values in product(range(max_loc + 1), repeat=len(phi.variables)):
            inst = substitute(body, dict(zip(phi.variables, values)))
            out = inst if out is None else Disj(out, inst)
        return out
    return _expand_state(unfold(phi), max_loc)


def _check_constants(node: Node, max_loc: int) -> None:
    from .ast import walk

    for n in walk(node):
        if isinstance(n, Const) and n.value > max_loc:
            raise ValueError(f"constant {n.value} exceeds maxLoc={max_loc}")


@lru_cache(maxsize=None)
def _expand_temporal(p: TemporalFormula, max_loc: int | None) -> TemporalFormula:
    ex = lambda q: _expand_temporal(q, max_loc)  # noqa: E731
    if isinstance(p, State):
        return State(_expand_state(p.formula, max_loc))
    if isinstance(p, Prop):
        return p
    if isinstance(p, TNot):
        return TNot(ex(p.body))
    if isinstance(p, TOr):
        return TOr(ex(p.left), ex(p.right))
    if isinstance(p, Next):
        return Next(ex(p.body))
    if isinstance(p, Prj):
        return Prj(tuple(ex(q) for q in p.parts), ex(p.body))
    if isinstance(p, Star):
        return Star(ex(p.body))
    if isinstance(p, Eps):
        return TNot(Next(T_TRUE))
    if isinstance(p, Chop):
        return Prj((ex(p.left), ex(p.right)), ex(Eps()))
    if isinstance(p, Plus):
        return ex(Chop(p.body, Star(p.body)))
    if isinstance(p, Diamond):
        return ex(Chop(T_TRUE, p.body))
    if isinstance(p, Box):
        return ex(TNot(Diamond(TNot(p.body))))
    if isinstance(p, NextN):
        out = ex(p.body)
        for _ in range(p.n):
            out = Next(out)
        return out
    if isinstance(p, TAnd):
        return TNot(TOr(TNot(ex(p.left)), TNot(ex(p.right))))
    if isinstance(p, TImp):
        return TOr(TNot(ex(p.left)), ex(p.right))
    raise TypeError(f"unknown temporal node {type(p).__name__}")


def expand_derived(p: Node, cfg=None) -> Node:
    """Rewrite every derived form into core constructors.

    ``cfg`` is optional; when given, constants are checked against its
    ``max_loc`` and bounded disjunctions are materialised over Val.
    """
    max_loc = None if cfg is None else cfg.max_loc
    if max_loc is not None:
        _check_constants(p, max_loc)
    if isinstance(p, TemporalFormula):
        return _expand_temporal(p, max_loc)
    return _expand_state(p, max_loc)


def is_core(p: Node) -> bool:
    from .ast import walk

    allowed = CORE_STATE + CORE_TEMPORAL + (Const, Var)
    return all(isinstance(n, allowed) for n in walk(p))
