"""Normal forms of translated (heap-free) temporal formulas.

Every formula is rewritten into

    (E and eps)  or  (c1 and X P1)  or ...  or  (cn and X Pn)

where ``E`` and the ``ci`` are state formulas.  State formulas are handled
as truth-table masks over a ``Domain``; the ``Pi`` are kept in a canonical
shape so that equal successors are recognised as such.

Chops carry a ``marked`` bit used by the graph construction to check that
left operands eventually terminate on infinite paths; the normal form
itself only propagates it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

from .ast import (
    FALSE, TRUE, BoundedDisjunction, Box, Chop, Conj, Diamond, Disj, Eps, Eq, Imp, Neg, Next,
    NextN, Plus, Prj, Prop, State, StateFormula, Star, TAnd, TImp, TNot, TOr,
    TemporalFormula, conj_all, disj_all, free_vars, rebuild, substitute,
)
from .guards import Domain
from .semantics import Config
from .translate import RESERVED_PREFIX, F, VarVector

EPS = Eps()


class IncompleteInput(ValueError):
    pass


class DomainTooLarge(ValueError):
    pass


MAX_DOMAIN = 1 << 26


# ------------------------------------------------------ state formulas


@dataclass(frozen=True)
class Sat:
    model: dict


@dataclass(frozen=True)
class Unsat:
    pass


def infer_vector(names: Iterable[str]) -> VarVector:
    """The heap vector whose variables occur in ``names``."""
    idx = sorted({int(n[len(RESERVED_PREFIX):].rstrip("'")) for n in names
                  if n.startswith(RESERVED_PREFIX) and n[len(RESERVED_PREFIX):].rstrip("'").isdigit()})
    return tuple((f"{RESERVED_PREFIX}{i}", f"{RESERVED_PREFIX}{i}'") for i in idx)


def state_sat(phi: StateFormula, cfg: Config, vector: VarVector | None = None) -> Sat | Unsat:
    """Exact satisfiability of a heap-free formula over Val.

    Assignments whose heap-vector part does not decode to a heap are not
    models.  ``vector`` defaults to the vector variables occurring in ``phi``.
    """
    names = free_vars(phi)
    vec = infer_vector(names) if vector is None else vector
    dom = Domain.for_formula(names, cfg, vec)
    w = dom.witness(dom.mask(phi))
    return Unsat() if w is None else Sat(w)


@dataclass(frozen=True)
class DNF:
    clauses: tuple[tuple[StateFormula, ...], ...]

    def formula(self) -> StateFormula:
        return disj_all(conj_all(c) for c in self.clauses)


def _is_literal(phi: StateFormula) -> bool:
    return isinstance(phi, Eq) or (isinstance(phi, Neg) and isinstance(phi.body, Eq))


def dnf(phi: StateFormula, cfg: Config | None = None) -> DNF:
    """Syntactic disjunctive normal form by De Morgan and distribution.

    Bounded disjunctions are instantiated over Val, so ``cfg`` is required
    when they occur.  Duplicate literals and clauses are removed.
    """

    def go(f: StateFormula, positive: bool) -> list[tuple[StateFormula, ...]]:
        if isinstance(f, Eq):
            return [(f if positive else Neg(f),)]
        if isinstance(f, Neg):
            return go(f.body, not positive)
        if isinstance(f, (Disj, Conj, Imp)):
            left_pos = positive if not isinstance(f, Imp) else not positive
            left, right = go(f.left, left_pos), go(f.right, positive)
            is_or = isinstance(f, (Disj, Imp)) == positive
            if is_or:
                return left + right
            return [a + b for a, b in product(left, right)]
        if isinstance(f, BoundedDisjunction):
            if cfg is None:
                raise ValueError("a configuration is needed to expand bounded disjunctions")
            parts = []
            for values in product(cfg.values, repeat=len(f.variables)):
                inst = substitute(f.body, dict(zip(f.variables, values)))
                parts.append(go(inst, positive))
            if positive:
                return [c for p in parts for c in p]
            out = [()]
            for p in parts:
                out = [a + b for a, b in product(out, p)]
            return out
        raise TypeError(f"dnf expects a heap-free formula, got {type(f).__name__}")

    clauses = []
    seen = set()
    for clause in go(phi, True):
        lits = tuple(dict.fromkeys(clause))
        if lits not in seen:
            seen.add(lits)
            clauses.append(lits)
    return DNF(tuple(clauses))


# --------------------------------------------------------- normal forms


@dataclass(frozen=True)
class NormalForm:
    terminal: int
    future: tuple[tuple[int, TemporalFormula], ...]
    complete: bool = False
    ctx: "NFContext | None" = field(default=None, compare=False, repr=False)

    def successors(self) -> tuple[TemporalFormula, ...]:
        return tuple(s for _, s in self.future)

    def reassemble(self) -> TemporalFormula:
        """The normal form as a single temporal formula."""
        return self.ctx.reassemble(self)

    def __str__(self) -> str:
        return self.ctx.render(self)


class NFContext:
    """Memo tables and the canonical-form machinery for one domain."""

    def __init__(self, domain: Domain):
        if domain.size > MAX_DOMAIN:
            raise DomainTooLarge(
                f"{len(domain.variables)} variables over {domain.radix} values is too large to tabulate"
            )
        self.domain = domain
        self.universe = domain.valid
        self._reps: dict[int, StateFormula] = {}
        self.TRUE = self.state(self.universe, None)
        self.FALSE = self.state(0, None)
        self._canon: dict = {}
        self._nf: dict = {}
        self._negate: dict = {}
        self._strip: dict = {}
        self._mark: dict = {}
        self._marked: dict = {}
        self.INF = TNot(Chop(self.TRUE, EPS))

    # ---------------------------------------------------- state leaves

    def state(self, mask: int, hint: StateFormula | None) -> State:
        rep = self._reps.get(mask)
        if rep is None:
            if mask == self.universe:
                rep = TRUE
            elif mask == 0:
                rep = FALSE
            elif hint is not None:
                rep = hint
            else:
                rep = self.domain.formula(mask)
            self._reps[mask] = rep
        return State(rep)

    def leaf_mask(self, s: State) -> int:
        return self.domain.mask(s.formula)

    # -------------------------------------------------------- canonical

    def canon(self, p: TemporalFormula) -> TemporalFormula:
        hit = self._canon.get(p)
        if hit is None:
            hit = self._canon_(p)
            self._canon[p] = hit
            self._canon.setdefault(hit, hit)
        return hit

    def _canon_(self, p: TemporalFormula) -> TemporalFormula:
        c = self.canon
        if isinstance(p, State):
            return self.state(self.domain.mask(p.formula), p.formula)
        if isinstance(p, Eps):
            return EPS
        if isinstance(p, Prop):
            raise TypeError("plain propositions have no normal form over memory states")
        if isinstance(p, TNot):
            return self.negate(c(p.body))
        if isinstance(p, TOr):
            return self.mk_or([c(p.left), c(p.right)])
        if isinstance(p, TAnd):
            return self.mk_and([c(p.left), c(p.right)])
        if isinstance(p, TImp):
            return self.mk_or([self.negate(c(p.left)), c(p.right)])
        if isinstance(p, Next):
            return self.mk_next(c(p.body))
        if isinstance(p, NextN):
            out = c(p.body)
            for _ in range(p.n):
                out = self.mk_next(out)
            return out
        if isinstance(p, Chop):
            return self.mk_chop(c(p.left), c(p.right), p.marked)
        if isinstance(p, Diamond):
            return self.mk_chop(self.TRUE, c(p.body))
        if isinstance(p, Box):
            return self.negate(self.mk_chop(self.TRUE, self.negate(c(p.body))))
        if isinstance(p, Plus):
            body = c(p.body)
            return self.mk_chop(body, self.mk_star(body))
        if isinstance(p, Star):
            return self.mk_star(c(p.body))
        if isinstance(p, Prj):
            return self.mk_prj(tuple(c(q) for q in p.parts), c(p.body))
        raise TypeError(f"unexpected node {type(p).__name__}")

    def _flatten(self, items, cls) -> list:
        out = []
        stack = list(reversed(items))
        while stack:
            item = stack.pop()
            if isinstance(item, cls):
                stack.append(item.right)
                stack.append(item.left)
            else:
                out.append(item)
        return out

    def _assoc(self, items, cls, unit: State, zero: State, combine) -> TemporalFormula:
        mask = unit_mask = self.leaf_mask(unit)
        hints = []
        rest = {}
        for item in self._flatten(items, cls):
            if isinstance(item, State):
                m = self.leaf_mask(item)
                mask = combine(mask, m)
                hints.append(item.formula)
                continue
            rest.setdefault(item, None)
        if mask == self.leaf_mask(zero):
            return zero
        parts = sorted(rest, key=lambda n: n.digest)
        if mask != unit_mask or not parts:
            hint = hints[0] if len(hints) == 1 else (
                disj_all(hints) if cls is TOr else conj_all(hints)) if hints else None
            parts.insert(0, self.state(mask, hint))
        out = parts[0]
        for item in parts[1:]:
            out = cls(out, item)
        return out

    def mk_or(self, items: Sequence[TemporalFormula]) -> TemporalFormula:
        return self._assoc(items, TOr, self.FALSE, self.TRUE, lambda a, b: a | b)

    def mk_and(self, items: Sequence[TemporalFormula]) -> TemporalFormula:
        return self._assoc(items, TAnd, self.TRUE, self.FALSE, lambda a, b: a & b)

    def mk_next(self, body: TemporalFormula) -> TemporalFormula:
        if body == self.FALSE:
            return self.FALSE
        return Next(body)

    def mk_chop(self, a: TemporalFormula, b: TemporalFormula, marked: bool = False) -> TemporalFormula:
        if a == EPS:
            return b
        if a == self.FALSE or b == self.FALSE:
            return self.FALSE
        if isinstance(a, Chop):
            return self.mk_chop(a.left, self.mk_chop(a.right, b, marked), a.marked or marked)
        return Chop(a, b, marked)

    def mk_star(self, body: TemporalFormula) -> TemporalFormula:
        if body in (EPS, self.FALSE):
            return EPS
        if isinstance(body, Star):
            return body
        return Star(body)

    def mk_prj(self, parts: tuple, body: TemporalFormula) -> TemporalFormula:
        if not parts:
            return body
        if any(q == self.FALSE for q in parts) or body == self.FALSE:
            return self.FALSE
        if len(parts) == 2 and body == EPS:
            return self.mk_chop(parts[0], parts[1])
        return Prj(parts, body)

    def negate(self, p: TemporalFormula) -> TemporalFormula:
        hit = self._negate.get(p)
        if hit is None:
            hit = self._negate_(p)
            self._negate[p] = hit
        return hit

    def _negate_(self, p: TemporalFormula) -> TemporalFormula:
        if isinstance(p, TNot):
            return p.body
        if isinstance(p, State):
            m = self.universe & ~self.leaf_mask(p)
            return self.state(m, Neg(p.formula))
        if isinstance(p, TOr):
            return self.mk_and([self.negate(q) for q in self._flatten([p], TOr)])
        if isinstance(p, TAnd):
            return self.mk_or([self.negate(q) for q in self._flatten([p], TAnd)])
        if isinstance(p, Next):
            # not X P  ==  eps or X not P
            return self.mk_or([EPS, self.mk_next(self.negate(p.body))])
        return TNot(self.strip(p))

    # ------------------------------------------------------------- marks

    def strip(self, p: TemporalFormula) -> TemporalFormula:
        hit = self._strip.get(p)
        if hit is None:
            if isinstance(p, Chop) and p.marked:
                hit = Chop(self.strip(p.left), self.strip(p.right), False)
            else:
                hit = rebuild(p, self.strip)
            self._strip[p] = hit
        return hit

    def has_marked(self, p: TemporalFormula) -> bool:
        """Whether some non-negated chop is still waiting for its left operand."""
        hit = self._marked.get(p)
        if hit is None:
            if isinstance(p, Chop):
                hit = p.marked or self.has_marked(p.left) or self.has_marked(p.right)
            elif isinstance(p, (TOr, TAnd)):
                hit = self.has_marked(p.left) or self.has_marked(p.right)
            else:
                hit = False
            self._marked[p] = hit
        return hit

    def mark_all(self, p: TemporalFormula) -> TemporalFormula:
        """Mark every chop whose left operand is currently running."""
        hit = self._mark.get(p)
        if hit is None:
            if isinstance(p, Chop):
                hit = Chop(self.mark_all(p.left), p.right, True)
            elif isinstance(p, (TOr, TAnd)):
                hit = type(p)(self.mark_all(p.left), self.mark_all(p.right))
            else:
                hit = p
            self._mark[p] = hit
        return hit

    # ------------------------------------------------------- normal form

    def make(self, terminal: int, future: Iterable[tuple[int, TemporalFormula]], complete=False) -> NormalForm:
        merged: dict[TemporalFormula, int] = {}
        for m, s in future:
            if not m:
                continue
            if not complete and s == self.FALSE:
                continue
            merged[s] = merged.get(s, 0) | m
        items = tuple(sorted(((m, s) for s, m in merged.items()), key=lambda x: x[1].digest))
        return NormalForm(terminal & self.universe, items, complete, self)

    def restrict(self, n: NormalForm, mask: int) -> NormalForm:
        return self.make(n.terminal & mask, ((m & mask, s) for m, s in n.future))

    def union(self, forms: Iterable[NormalForm]) -> NormalForm:
        terminal = 0
        future = []
        for n in forms:
            terminal |= n.terminal
            future.extend(n.future)
        return self.make(terminal, future)

    def nf(self, p: TemporalFormula) -> NormalForm:
        p = self.canon(p)
        hit = self._nf.get(p)
        if hit is None:
            hit = self._nf_(p)
            self._nf[p] = hit
        return hit

    def _nf_(self, p: TemporalFormula) -> NormalForm:
        U = self.universe
        if isinstance(p, State):
            m = self.leaf_mask(p)
            return self.make(m, [(m, self.TRUE)])
        if isinstance(p, Eps):
            return self.make(U, [])
        if isinstance(p, Next):
            return self.make(0, [(U, p.body)])
        if isinstance(p, TOr):
            return self.union(self.nf(q) for q in self._flatten([p], TOr))
        if isinstance(p, TAnd):
            parts = [self.nf(q) for q in self._flatten([p], TAnd)]
            out = parts[0]
            for n in parts[1:]:
                out = self.and_nf(out, n)
            return out
        if isinstance(p, TNot):
            return self.neg(self.conf(self.nf(p.body)))
        if isinstance(p, Chop):
            return self.chop_nf(p.left, p.right, p.marked)
        if isinstance(p, Star):
            return self.star_nf(p)
        if isinstance(p, Prj):
            return self.prj_nf(p.parts, p.body)
        raise TypeError(f"unexpected node {type(p).__name__}")

    def and_nf(self, a: NormalForm, b: NormalForm) -> NormalForm:
        future = []
        for m1, s1 in a.future:
            for m2, s2 in b.future:
                m = m1 & m2
                if m:
                    future.append((m, self.mk_and([s1, s2])))
        return self.make(a.terminal & b.terminal, future)

    def conf(self, n: NormalForm) -> NormalForm:
        """Complete normal form: future guards partition the valid assignments."""
        regions: list[tuple[int, frozenset]] = [(self.universe, frozenset())]
        for m, s in n.future:
            nxt = []
            for r, succ in regions:
                inside, outside = r & m, r & ~m
                if inside:
                    nxt.append((inside, succ | {s}))
                if outside:
                    nxt.append((outside, succ))
            regions = nxt
        future = [(r, self.mk_or(sorted(succ, key=lambda q: q.digest))) for r, succ in regions]
        return self.make(n.terminal, future, complete=True)

    def neg(self, n: NormalForm) -> NormalForm:
        if not n.complete:
            raise IncompleteInput("negation needs a complete normal form; apply conf first")
        future = [(m, self.negate(s)) for m, s in n.future]
        return self.make(self.universe & ~n.terminal, future)

    def chop_nf(self, left: TemporalFormula, right: TemporalFormula, marked: bool = False) -> NormalForm:
        nl = self.nf(left)
        pieces = [self.restrict(self.nf(right), nl.terminal)] if nl.terminal else []
        pieces.append(self.make(0, [(m, self.mk_chop(s, right, marked)) for m, s in nl.future]))
        return self.union(pieces)

    def star_nf(self, p: Star) -> NormalForm:
        future = []
        for m, s in self.nf(p.body).future:
            # either the first piece is finite and the iteration goes on, or
            # it is the last one and never ends
            succ = self.mk_or([self.mk_chop(s, p), self.mk_and([s, self.INF])])
            future.append((m, succ))
        return self.make(self.universe, future)

    def chain(self, parts: Sequence[TemporalFormula]) -> TemporalFormula:
        out = parts[-1]
        for q in reversed(parts[:-1]):
            out = self.mk_chop(q, out)
        return out

    def prj_nf(self, parts: Sequence[TemporalFormula], body: TemporalFormula) -> NormalForm:
        parts = tuple(parts)
        if not parts:
            return self.nf(body)
        first, rest = parts[0], parts[1:]
        n1 = self.nf(first)
        nq = self.nf(body)
        pieces = []
        if n1.terminal:
            # the first part covers a single state
            pieces.append(self.restrict(self.nf(self.mk_prj(rest, body)), n1.terminal))
        future = []
        for m1, s1 in n1.future:
            for mq, sq in nq.future:
                # body moves on to the state where the first part ends
                future.append((m1 & mq, self.mk_chop(s1, self.mk_prj(rest, sq))))
            if nq.terminal:
                # body stays on one state; the parts cover the whole interval
                future.append((m1 & nq.terminal, self.chain((s1,) + rest)))
        pieces.append(self.make(0, future))
        return self.union(pieces)

    # -------------------------------------------------------- rendering

    def guard_formula(self, mask: int) -> StateFormula:
        if mask == self.universe:
            return TRUE
        return self.domain.formula(mask)

    def reassemble(self, n: NormalForm) -> TemporalFormula:
        parts: list[TemporalFormula] = []
        if n.terminal:
            parts.append(TAnd(self.state(n.terminal, None), EPS))
        for m, s in n.future:
            parts.append(TAnd(self.state(m, None), Next(s)))
        if not parts:
            return self.FALSE
        out = parts[0]
        for q in parts[1:]:
            out = TOr(out, q)
        return out

    def render(self, n: NormalForm) -> str:
        from .syntax import pretty

        lines = []
        if n.terminal:
            lines.append(f"({pretty(self.guard_formula(n.terminal))}) && eps")
        for m, s in n.future:
            lines.append(f"({pretty(self.guard_formula(m))}) && X ({pretty(s)})")
        return "\n|| ".join(lines) if lines else "false"


def make_context(p: TemporalFormula, c: VarVector, cfg: Config, extra_vars: Iterable[str] = ()) -> NFContext:
    names = set(free_vars(p)) | set(extra_vars)
    return NFContext(Domain.for_formula(names, cfg, c))


def nf(p: TemporalFormula, c: VarVector, cfg: Config) -> NormalForm:
    """Normal form of ``F(p, c)``."""
    ctx = make_context(p, c, cfg)
    return ctx.nf(F(p, c, cfg))


def conf(n: NormalForm) -> NormalForm:
    return n.ctx.conf(n)


def neg(n: NormalForm) -> NormalForm:
    return n.ctx.neg(n)


def chop_nf(p1: TemporalFormula, p2: TemporalFormula, c: VarVector, cfg: Config) -> NormalForm:
    ctx = make_context(TOr(p1, p2), c, cfg)
    return ctx.chop_nf(ctx.canon(F(p1, c, cfg)), ctx.canon(F(p2, c, cfg)))


def prj_nf(parts: Sequence[TemporalFormula], body: TemporalFormula, c: VarVector, cfg: Config) -> NormalForm:
    ctx = make_context(Prj(tuple(parts), body), c, cfg)
    return ctx.prj_nf([ctx.canon(F(q, c, cfg)) for q in parts], ctx.canon(F(body, c, cfg)))
