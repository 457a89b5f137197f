"""Exact evaluation of formulas over ultimately periodic infinite intervals.

An infinite interval ``u v v v ...`` is a ``Word``: a tuple of states with a
loop index.  The infinite-interval clauses of chop, projection and star are
applied directly.  Whether a formula holds on a finite stretch of the word
is decided by running its normal form as a finite automaton along the word;
finite-interval normal forms are exact, so this keeps the evaluator
independent of the acceptance bookkeeping of the graph construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .ast import Chop, Eps, Next, Prj, Star, State, TAnd, TemporalFormula, TNot, TOr
from .normal_form import NFContext, make_context
from .semantics import Config, MemoryState
from .translate import F, encode_state, make_vector, vector_size


@dataclass(frozen=True)
class Word:
    """``states[:loop]`` followed by ``states[loop:]`` repeated forever.

    States are assignment indices of the context's domain.
    """

    states: tuple[int, ...]
    loop: int

    def __post_init__(self):
        if not 0 <= self.loop < len(self.states):
            raise ValueError("the repeated part of a word must be non-empty")

    def next(self, t: int) -> int:
        return t + 1 if t + 1 < len(self.states) else self.loop

    def suffix(self, prefix: Sequence[int], t: int) -> "Word":
        """``prefix`` followed by this word read from position ``t``."""
        prefix = tuple(prefix)
        if t >= self.loop:
            cycle = self.states[t:] + self.states[self.loop:t]
            return Word(prefix + cycle, len(prefix))
        return Word(prefix + self.states[t:], len(prefix) + self.loop - t)


class LassoChecker:
    def __init__(self, ctx: NFContext):
        self.ctx = ctx
        self._inf: dict = {}
        self._runs: dict = {}

    def holds(self, mask: int, state: int) -> bool:
        return bool((mask >> state) & 1)

    # ---------------------------------------------------- finite stretches

    def run(self, p: TemporalFormula, word: Word, q: int) -> list[tuple[int, bool]]:
        """``(position, accepted)`` after reading 0, 1, 2, ... states from ``q``.

        The list stops before the automaton configuration repeats, so every
        longer stretch behaves like one already listed.
        """
        key = (p, word, q)
        hit = self._runs.get(key)
        if hit is not None:
            return hit
        ctx = self.ctx
        out = []
        seen = set()
        current = frozenset([ctx.strip(p)])
        t = q
        while current and (current, t) not in seen:
            seen.add((current, t))
            s = word.states[t]
            forms = [ctx.nf(f) for f in current]
            out.append((t, any(self.holds(n.terminal, s) for n in forms)))
            current = frozenset(ctx.strip(succ) for n in forms for m, succ in n.future if self.holds(m, s))
            t = word.next(t)
        self._runs[key] = out
        return out

    def finite(self, p: TemporalFormula, states: Sequence[int]) -> bool:
        """Whether ``p`` holds on the finite interval ``states``."""
        ctx = self.ctx
        current = {ctx.strip(p)}
        for s in states[:-1]:
            current = {ctx.strip(succ) for f in current for m, succ in ctx.nf(f).future if self.holds(m, s)}
            if not current:
                return False
        return any(self.holds(ctx.nf(f).terminal, states[-1]) for f in current)

    def ends(self, p: TemporalFormula, word: Word, t: int) -> tuple[bool, set[int]]:
        """Whether ``p`` holds on the single state at ``t``, and the positions
        where a stretch of length at least one satisfying ``p`` can end."""
        run = self.run(p, word, t)
        empty = bool(run) and run[0][1]
        return empty, {pos for pos, acc in run[1:] if acc}

    # ---------------------------------------------------- infinite suffixes

    def inf(self, p: TemporalFormula, word: Word, q: int = 0) -> bool:
        key = (p, word, q)
        hit = self._inf.get(key)
        if hit is None:
            hit = self._inf_(p, word, q)
            self._inf[key] = hit
        return hit

    def _inf_(self, p: TemporalFormula, word: Word, q: int) -> bool:
        if isinstance(p, State):
            return self.holds(self.ctx.leaf_mask(p), word.states[q])
        if isinstance(p, Eps):
            return False
        if isinstance(p, TNot):
            return not self.inf(p.body, word, q)
        if isinstance(p, TOr):
            return self.inf(p.left, word, q) or self.inf(p.right, word, q)
        if isinstance(p, TAnd):
            return self.inf(p.left, word, q) and self.inf(p.right, word, q)
        if isinstance(p, Next):
            return self.inf(p.body, word, word.next(q))
        if isinstance(p, Chop):
            return any(acc and self.inf(p.right, word, t) for t, acc in self.run(p.left, word, q))
        if isinstance(p, Star):
            return self._star(p.body, word, q)
        if isinstance(p, Prj):
            return self._prj(p.parts, p.body, word, q)
        raise TypeError(f"unexpected node {type(p).__name__}")

    def _star(self, body: TemporalFormula, word: Word, q: int) -> bool:
        graph: dict[int, set[int]] = {}
        reach = {q}
        todo = [q]
        while todo:
            t = todo.pop()
            graph[t] = self.ends(body, word, t)[1]
            for u in graph[t]:
                if u not in reach:
                    reach.add(u)
                    todo.append(u)
        # finitely many finite pieces, then one that never ends
        if any(self.inf(body, word, t) for t in reach):
            return True
        # infinitely many finite pieces: a reachable cycle of pieces
        for t in reach:
            seen = set(graph[t])
            todo = list(graph[t])
            while todo:
                u = todo.pop()
                if u == t:
                    return True
                for v in graph[u]:
                    if v not in seen:
                        seen.add(v)
                        todo.append(v)
        return False

    def _cuts(self, parts, word: Word, q: int):
        """All ways the parts can cover finite consecutive stretches from ``q``.

        Yields ``(end, projected)`` where ``projected[h]`` lists the states of
        the distinct cut points among the first ``h + 1`` cuts.
        """
        seen = set()

        def go(l: int, t: int, projected: tuple[tuple[int, ...], ...]):
            key = (l, t, projected)
            if key in seen:
                return
            seen.add(key)
            if l == len(parts):
                yield t, projected
                return
            empty, ends = self.ends(parts[l], word, t)
            last = projected[-1]
            if empty:
                yield from go(l + 1, t, projected + (last,))
            for u in sorted(ends):
                yield from go(l + 1, u, projected + (last + (word.states[u],),))

        yield from go(0, q, ((word.states[q],),))

    def _prj(self, parts, body: TemporalFormula, word: Word, q: int) -> bool:
        m = len(parts)
        # every part finite: the body runs over the cut points, then on
        for end, projected in self._cuts(parts, word, q):
            if self.inf(body, word.suffix(projected[-1], word.next(end)), 0):
                return True
        # the last part never ends: the body sees a prefix of the cut points
        for end, projected in self._cuts(parts[:-1], word, q):
            if self.inf(parts[-1], word, end):
                if any(self.finite(body, projected[h]) for h in range(m)):
                    return True
        return False


def _index(ctx: NFContext, stack: dict[str, int]) -> int:
    dom = ctx.domain
    idx = 0
    for name in dom.variables:
        if name not in stack:
            raise KeyError(f"state does not bind {name!r}")
        idx = idx * dom.radix + stack[name]
    return idx


def check_lasso(p: TemporalFormula, prefix: Sequence[MemoryState], cycle: Sequence[MemoryState], cfg: Config) -> bool:
    """Whether the infinite interval ``prefix cycle cycle ...`` satisfies ``p``."""
    if not cycle:
        raise ValueError("the cycle of a lasso must not be empty")
    states = list(prefix) + list(cycle)
    c = make_vector(max([vector_size(p)] + [len(s.heap) for s in states]))
    ctx = make_context(p, c, cfg)
    word = Word(tuple(_index(ctx, encode_state(s, c).stack_map) for s in states), len(prefix))
    return LassoChecker(ctx).inf(ctx.canon(F(p, c, cfg)), word, 0)


def check_assignments(ctx: NFContext, root: TemporalFormula, prefix: Sequence[dict], cycle: Sequence[dict]) -> bool:
    """Like ``check_lasso`` but for domain assignments of an existing context."""
    states = [_index(ctx, s) for s in list(prefix) + list(cycle)]
    return LassoChecker(ctx).inf(ctx.strip(root), Word(tuple(states), len(prefix)), 0)
