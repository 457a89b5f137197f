"""Reference semantics of temporal formulas over finite intervals.

This is a brute-force evaluator that follows the satisfaction clauses
literally; it is slow but independent of the translation and the normal
form machinery, which makes it the ground truth for testing them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .ast import Next, Prj, Prop, Star, State, StateFormula, TNot, TOr, TemporalFormula
from .derived import expand_derived
from .semantics import Config, MemoryState, eval_state

Interval = tuple[MemoryState, ...]


class IndexOutOfRange(IndexError):
    pass


class NonMonotone(ValueError):
    pass


@dataclass(frozen=True)
class Interpretation:
    sigma: Interval
    k: int
    j: int

    def __post_init__(self):
        if not self.sigma:
            raise ValueError("an interval needs at least one state")
        if not 0 <= self.k <= self.j <= len(self.sigma) - 1:
            raise IndexOutOfRange(f"need 0 <= k <= j <= {len(self.sigma) - 1}, got k={self.k}, j={self.j}")


def _dedupe(indices: Sequence[int]) -> list[int]:
    out: list[int] = []
    for r in indices:
        if not out or out[-1] != r:
            out.append(r)
    return out


def project(sigma: Sequence, indices: Sequence[int]) -> tuple:
    """``sigma`` projected onto a non-decreasing index sequence (duplicates dropped)."""
    last = len(sigma) - 1
    prev = 0
    for r in indices:
        if not 0 <= r <= last:
            raise IndexOutOfRange(f"index {r} outside 0..{last}")
        if r < prev:
            raise NonMonotone(f"indices must be non-decreasing: {list(indices)}")
        prev = r
    return tuple(sigma[t] for t in _dedupe(indices))


class _Evaluator:
    def __init__(self, cfg: Config):
        self.cfg = cfg
        self.leaf_cache: dict = {}
        self.cache: dict = {}

    def leaf(self, phi: StateFormula, s: MemoryState) -> bool:
        key = (phi, s)
        hit = self.leaf_cache.get(key)
        if hit is None:
            hit = self.leaf_cache[key] = eval_state(s, phi, self.cfg)
        return hit

    def ev(self, p: TemporalFormula, seq: Interval) -> bool:
        key = (p, seq)
        hit = self.cache.get(key)
        if hit is None:
            hit = self.cache[key] = self._ev(p, seq)
        return hit

    def _ev(self, p: TemporalFormula, seq: Interval) -> bool:
        if isinstance(p, State):
            return self.leaf(p.formula, seq[0])
        if isinstance(p, TNot):
            return not self.ev(p.body, seq)
        if isinstance(p, TOr):
            return self.ev(p.left, seq) or self.ev(p.right, seq)
        if isinstance(p, Next):
            return len(seq) > 1 and self.ev(p.body, seq[1:])
        if isinstance(p, Star):
            if len(seq) == 1:
                return True
            # pieces of length zero only add constraints, so it suffices to
            # search decompositions into non-empty pieces
            return any(
                self.ev(p.body, seq[: r + 1]) and self.ev(p, seq[r:])
                for r in range(1, len(seq))
            )
        if isinstance(p, Prj):
            return self._prj(p, seq)
        if isinstance(p, Prop):
            raise TypeError("plain propositions have no meaning over memory states")
        raise TypeError(f"not a core temporal formula: {type(p).__name__}")

    def _prj(self, p: Prj, seq: Interval) -> bool:
        last = len(seq) - 1
        m = len(p.parts)

        def search(l: int, cuts: list[int]) -> bool:
            if l == m:
                r_m = cuts[-1]
                if r_m < last:
                    projected = tuple(seq[t] for t in _dedupe(cuts)) + seq[r_m + 1:]
                    return self.ev(p.body, projected)
                return any(
                    self.ev(p.body, tuple(seq[t] for t in _dedupe(cuts[: h + 1])))
                    for h in range(m + 1)
                )
            start = cuts[-1]
            for r in range(start, last + 1):
                if self.ev(p.parts[l], seq[start: r + 1]) and search(l + 1, cuts + [r]):
                    return True
            return False

        return search(0, [0])


def eval_interval(i: Interpretation, p: TemporalFormula, cfg: Config) -> bool:
    """Decide ``(sigma, k, j) |= p`` for a finite interval."""
    core = expand_derived(p)
    return _Evaluator(cfg).ev(core, tuple(i.sigma[i.k: i.j + 1]))


def models(sigma: Sequence[MemoryState], p: TemporalFormula, cfg: Config, evaluator: _Evaluator | None = None) -> bool:
    """Decide ``sigma |= p``, i.e. ``(sigma, 0, |sigma|) |= p``."""
    sigma = tuple(sigma)
    if not sigma:
        raise ValueError("an interval needs at least one state")
    ev = evaluator or _Evaluator(cfg)
    return ev.ev(expand_derived(p), sigma)


def make_evaluator(cfg: Config) -> _Evaluator:
    """A shared evaluator whose caches persist across ``models`` calls."""
    return _Evaluator(cfg)
