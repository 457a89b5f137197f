"""Heap-free state formulas as truth tables over a finite assignment space.

A ``Domain`` fixes an ordered list of variables, each ranging over Val.
Assignments are numbered in mixed radix with the first variable most
significant, and a set of assignments is a Python int used as a bitmask.
Assignments in which the heap vector does not decode to a heap are never
part of any mask.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .ast import (
    BoundedDisjunction, Conj, Const, Disj, Eq, Imp, Neg, StateFormula, Var,
    conj_all, disj_all,
)
from .semantics import Config
from .translate import VarVector, vector_names

Literal = tuple[str, str, int]  # (variable, "=" or "!=", value)
Cube = tuple[Literal, ...]


def _to_int(arr: np.ndarray) -> int:
    return int.from_bytes(np.packbits(arr, bitorder="little").tobytes(), "little")


class Domain:
    def __init__(self, variables: Sequence[str], cfg: Config, vector: VarVector = ()):
        self.cfg = cfg
        self.vector = tuple(vector)
        names = tuple(variables)
        for name in vector_names(self.vector):
            if name not in names:
                names += (name,)
        if len(set(names)) != len(names):
            raise ValueError("duplicate domain variables")
        self.variables = names
        self.radix = cfg.max_loc + 1
        self.size = self.radix ** len(names)
        self.index = {name: i for i, name in enumerate(names)}
        self.full = (1 << self.size) - 1
        self._coords: dict[int, np.ndarray] = {}
        self._memo: dict[StateFormula, int] = {}
        self.valid = self._valid_mask()

    @classmethod
    def for_formula(cls, program_vars: Iterable[str], cfg: Config, vector: VarVector = ()) -> "Domain":
        reserved = set(vector_names(vector))
        return cls(sorted(set(program_vars) - reserved), cfg, vector)

    def coords(self, i: int) -> np.ndarray:
        arr = self._coords.get(i)
        if arr is None:
            stride = self.radix ** (len(self.variables) - 1 - i)
            arr = (np.arange(self.size, dtype=np.int64) // stride) % self.radix
            self._coords[i] = arr
        return arr

    def _valid_mask(self) -> int:
        ok = np.ones(self.size, dtype=bool)
        firsts = [self.coords(self.index[a]) for a, _ in self.vector]
        for i in range(len(firsts)):
            for j in range(i + 1, len(firsts)):
                ok &= ~((firsts[i] == firsts[j]) & (firsts[i] != 0))
        return _to_int(ok)

    # -------------------------------------------------------- compilation

    def _term(self, t) -> np.ndarray | int:
        if isinstance(t, Const):
            return t.value
        if isinstance(t, Var):
            try:
                return self.coords(self.index[t.name])
            except KeyError:
                raise KeyError(f"variable {t.name!r} is not in the domain") from None
        raise TypeError(f"not a term: {t!r}")

    def _raw(self, phi: StateFormula) -> int:
        hit = self._memo.get(phi)
        if hit is not None:
            return hit
        if isinstance(phi, Eq):
            a, b = self._term(phi.left), self._term(phi.right)
            if isinstance(a, int) and isinstance(b, int):
                out = self.full if a == b else 0
            else:
                out = _to_int(np.broadcast_to(a == b, (self.size,)))
        elif isinstance(phi, Neg):
            out = self.full ^ self._raw(phi.body)
        elif isinstance(phi, Disj):
            out = self._raw(phi.left) | self._raw(phi.right)
        elif isinstance(phi, Conj):
            out = self._raw(phi.left) & self._raw(phi.right)
        elif isinstance(phi, Imp):
            out = (self.full ^ self._raw(phi.left)) | self._raw(phi.right)
        elif isinstance(phi, BoundedDisjunction):
            out = self._project(phi)
        else:
            raise TypeError(f"guards must be heap-free; got {type(phi).__name__}")
        self._memo[phi] = out
        return out

    def _project(self, phi: BoundedDisjunction) -> int:
        bound = [v for v in phi.variables]
        if set(bound) & set(self.variables):
            raise ValueError("bounded variables shadow domain variables")
        inner = Domain(self.variables + tuple(bound), self.cfg)
        body = inner._raw(phi.body)
        block = self.radix ** len(bound)
        bits = np.unpackbits(
            np.frombuffer(body.to_bytes((inner.size + 7) // 8, "little"), dtype=np.uint8),
            bitorder="little",
        )[: inner.size]
        return _to_int(bits.reshape(self.size, block).any(axis=1))

    def mask(self, phi: StateFormula) -> int:
        """The set of valid assignments satisfying ``phi``."""
        return self._raw(phi) & self.valid

    # ----------------------------------------------------------- decoding

    def assignment(self, index: int) -> dict[str, int]:
        out = {}
        for name in reversed(self.variables):
            index, out[name] = divmod(index, self.radix)
        return {name: out[name] for name in self.variables}

    def witness(self, mask: int) -> dict[str, int] | None:
        if not mask:
            return None
        return self.assignment((mask & -mask).bit_length() - 1)

    def assignments(self, mask: int):
        while mask:
            low = mask & -mask
            yield self.assignment(low.bit_length() - 1)
            mask ^= low

    def cover(self, mask: int) -> list[Cube]:
        """Cubes whose union agrees with ``mask`` on every valid assignment."""
        if not mask:
            return []
        f = self._bits(mask)
        care = self._bits(self.valid)
        return _cover(f, care, self.variables, self.radix)

    def _bits(self, mask: int) -> np.ndarray:
        raw = np.frombuffer(mask.to_bytes((self.size + 7) // 8, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.size].astype(bool)

    def formula(self, mask: int) -> StateFormula:
        """A readable formula for ``mask``: a disjunction of literal conjunctions."""
        return cubes_formula(self.cover(mask))


def _cover(f: np.ndarray, care: np.ndarray, names: Sequence[str], radix: int) -> list[Cube]:
    if not f.any():
        return []
    if (f | ~care).all():
        return [()]
    name, rest = names[0], names[1:]
    fv = f.reshape(radix, -1)
    cv = care.reshape(radix, -1)
    g = fv.any(axis=0)
    if all(np.array_equal(g & cv[v], fv[v]) for v in range(radix)):
        return _cover(g, cv.any(axis=0), rest, radix)
    groups: dict[bytes, list[int]] = {}
    for v in range(radix):
        if fv[v].any():
            groups.setdefault(fv[v].tobytes(), []).append(v)
    out: list[Cube] = []
    for values in groups.values():
        sub = _cover(fv[values[0]], cv[values].any(axis=0), rest, radix)
        others = [u for u in range(radix) if u not in values]
        if len(values) == 1:
            heads = [((name, "=", values[0]),)]
        elif len(others) < len(values):
            heads = [tuple((name, "!=", u) for u in others)]
        else:
            heads = [((name, "=", v),) for v in values]
        out.extend(h + c for h in heads for c in sub)
    return out


def literal_formula(lit: Literal) -> StateFormula:
    name, op, value = lit
    atom = Eq(Var(name), Const(value))
    return atom if op == "=" else Neg(atom)


def cubes_formula(cubes: Sequence[Cube]) -> StateFormula:
    return disj_all(conj_all(literal_formula(l) for l in cube) for cube in cubes)
