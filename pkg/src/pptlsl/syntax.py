"""Concrete syntax: tokenizer, recursive-descent parser and pretty-printer.

Operator precedence, loosest first::

    ->        (right associative)
    ||
    &&
    ;         chop
    *         separating conjunction
    ! X X^n [] <>   prefix operators
    ^* ^+     postfix star / plus

Quantifiers ``exists x . P`` extend as far right as possible.
Projection is written ``(P1, ..., Pm) prj P``.  An identifier standing
alone is a proposition of plain PPTL.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import (
    Alloc, BoundedDisjunction, Box, Chop, Conj, Const, CountEq, CountGeq,
    CountLeq, Diamond, Disj, Emp, Eps, Eq, Exists, FALSE, Forall, Hook, Imp,
    ListPlus, ListSeg, Neg, Next, NextN, Node, Plus, PointsTo, Prj, Prop, Sep,
    Star, State, StateFormula, TAnd, TImp, TNot, TOr, TRUE, TemporalFormula,
    Term, Var,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


KEYWORDS = {
    "X", "prj", "eps", "true", "false", "emp", "alloc", "cnt", "rplus", "ls",
    "exists", "forall", "bigor",
}

_SYMBOLS = sorted(
    ["|->", "~>", "->", "||", "&&", "!=", "==", ">=", "<=", "=", "!", "*",
     ";", "(", ")", ",", ".", "[]", "<>", "^*", "^+", "^"],
    key=len, reverse=True,
)
_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)|(?P<nat>\d+)|(?P<ident>[A-Za-z_$][A-Za-z0-9_$']*)|(?P<sym>"
    + "|".join(re.escape(s) for s in _SYMBOLS)
    + ")"
)


@dataclass(frozen=True)
class Token:
    kind: str  # "nat", "ident", "kw", "sym", "eof"
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        value = m.group()
        col = pos - line_start + 1
        if kind == "ws":
            for i, ch in enumerate(value):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
        elif kind == "ident" and value in KEYWORDS:
            tokens.append(Token("kw", value, line, col))
        else:
            tokens.append(Token(kind, value, line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


def _state(p: TemporalFormula) -> StateFormula | None:
    return p.formula if isinstance(p, State) else None


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        raise ParseError(message, tok.line, tok.column)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("sym", "kw") and self.tok.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            self.error(f"expected {text!r}, found {found!r}")
        tok = self.tok
        self.i += 1
        return tok

    def nat(self) -> int:
        if self.tok.kind != "nat":
            self.error("expected a natural number")
        value = int(self.tok.text)
        self.i += 1
        return value

    def ident(self) -> str:
        if self.tok.kind != "ident":
            self.error("expected an identifier")
        name = self.tok.text
        self.i += 1
        return name

    def term(self) -> Term:
        if self.tok.kind == "nat":
            return Const(self.nat())
        if self.tok.kind == "ident":
            return Var(self.ident())
        self.error("expected a term")

    # precedence levels ------------------------------------------------

    def formula(self) -> TemporalFormula:
        left = self.disjunction()
        if self.accept("->"):
            right = self.formula()
            a, b = _state(left), _state(right)
            if a is not None and b is not None:
                return State(Imp(a, b))
            return TImp(left, right)
        return left

    def disjunction(self) -> TemporalFormula:
        left = self.conjunction()
        while self.accept("||"):
            right = self.conjunction()
            a, b = _state(left), _state(right)
            left = State(Disj(a, b)) if a is not None and b is not None else TOr(left, right)
        return left

    def conjunction(self) -> TemporalFormula:
        left = self.chop()
        while self.accept("&&"):
            right = self.chop()
            a, b = _state(left), _state(right)
            left = State(Conj(a, b)) if a is not None and b is not None else TAnd(left, right)
        return left

    def chop(self) -> TemporalFormula:
        left = self.sep()
        while self.accept(";"):
            left = Chop(left, self.sep())
        return left

    def sep(self) -> TemporalFormula:
        left = self.unary()
        while self.at("*"):
            tok = self.expect("*")
            right = self.unary()
            a, b = _state(left), _state(right)
            if a is None or b is None:
                self.error("separating conjunction needs state formulas on both sides", tok)
            left = State(Sep(a, b))
        return left

    def unary(self) -> TemporalFormula:
        if self.accept("!"):
            body = self.unary()
            phi = _state(body)
            return State(Neg(phi)) if phi is not None else TNot(body)
        if self.accept("X"):
            if self.accept("^"):
                tok = self.tok
                n = self.nat()
                if n < 1:
                    self.error("X^n needs n >= 1", tok)
                return NextN(n, self.unary())
            return Next(self.unary())
        if self.accept("[]"):
            return Box(self.unary())
        if self.accept("<>"):
            return Diamond(self.unary())
        if self.at("exists") or self.at("forall"):
            tok = self.tok
            self.i += 1
            var = self.ident()
            self.expect(".")
            body = self.formula()
            phi = _state(body)
            if phi is None:
                self.error("quantifier body must be a state formula", tok)
            return State((Exists if tok.text == "exists" else Forall)(var, phi))
        if self.at("bigor"):
            tok = self.expect("bigor")
            names = [self.ident()]
            while self.tok.kind == "ident":
                names.append(self.ident())
            self.expect(".")
            phi = _state(self.formula())
            if phi is None:
                self.error("bigor body must be a state formula", tok)
            return State(BoundedDisjunction(tuple(names), phi))
        return self.postfix()

    def postfix(self) -> TemporalFormula:
        p = self.primary()
        while True:
            if self.accept("^*"):
                p = Star(p)
            elif self.accept("^+"):
                p = Plus(p)
            else:
                return p

    def primary(self) -> TemporalFormula:
        tok = self.tok
        if self.accept("("):
            items = [self.formula()]
            while self.accept(","):
                items.append(self.formula())
            self.expect(")")
            if self.accept("prj"):
                return Prj(tuple(items), self.unary())
            if len(items) != 1:
                self.error("a parenthesised list must be followed by 'prj'", tok)
            return items[0]
        if self.accept("eps"):
            return Eps()
        if self.accept("true"):
            return State(TRUE)
        if self.accept("false"):
            return State(FALSE)
        if self.accept("emp"):
            return State(Emp())
        if self.accept("alloc"):
            self.expect("(")
            e = self.term()
            self.expect(")")
            return State(Alloc(e))
        if self.accept("cnt"):
            self.expect("(")
            e = self.term()
            self.expect(")")
            for op, cls in ((">=", CountGeq), ("<=", CountLeq), ("==", CountEq)):
                if self.accept(op):
                    return State(cls(e, self.nat()))
            self.error("expected '>=', '<=' or '==' after cnt(...)")
        for kw, cls in (("rplus", ListPlus), ("ls", ListSeg)):
            if self.accept(kw):
                self.expect("(")
                a = self.term()
                self.expect(",")
                b = self.term()
                self.expect(")")
                return State(cls(a, b))
        if tok.kind in ("nat", "ident"):
            a = self.term()
            if self.accept("="):
                return State(Eq(a, self.term()))
            if self.accept("!="):
                return State(Neg(Eq(a, self.term())))
            if self.accept("|->"):
                return State(PointsTo(a, self.term()))
            if self.accept("~>"):
                return State(Hook(a, self.term()))
            if isinstance(a, Var):
                # a bare identifier is a proposition of plain PPTL
                return Prop(a.name)
            self.error("expected '=', '!=', '|->' or '~>' after a term")
        self.error(f"unexpected {tok.text or 'end of input'!r}")


def parse_formula(text: str) -> TemporalFormula:
    """Parse a temporal formula; sugar nodes are preserved."""
    parser = _Parser(text)
    p = parser.formula()
    if parser.tok.kind != "eof":
        parser.error(f"unexpected {parser.tok.text!r}")
    return p


def parse_state(text: str) -> StateFormula:
    p = parse_formula(text)
    if not isinstance(p, State):
        raise ParseError("expected a state formula", 1, 1)
    return p.formula


# ------------------------------------------------------------ printing

QUANT, IMP, OR, AND, CHOP, SEP, UNARY, POSTFIX, ATOM = range(9)


def _term(e: Term) -> str:
    return str(e.value) if isinstance(e, Const) else e.name


def _pp(n: Node, need: int) -> str:
    text, level = _render(n)
    return f"({text})" if level < need else text


def _render(n: Node) -> tuple[str, int]:
    if isinstance(n, State):
        return _render(n.formula)
    if n == TRUE:
        return "true", ATOM
    if n == FALSE:
        return "false", ATOM
    if isinstance(n, (Const, Var)):
        return _term(n), ATOM
    if isinstance(n, Eq):
        return f"{_term(n.left)} = {_term(n.right)}", ATOM
    if isinstance(n, PointsTo):
        return f"{_term(n.left)} |-> {_term(n.right)}", ATOM
    if isinstance(n, Hook):
        return f"{_term(n.left)} ~> {_term(n.right)}", ATOM
    if isinstance(n, Alloc):
        return f"alloc({_term(n.term)})", ATOM
    if isinstance(n, Emp):
        return "emp", ATOM
    if isinstance(n, (CountGeq, CountLeq, CountEq)):
        op = {CountGeq: ">=", CountLeq: "<=", CountEq: "=="}[type(n)]
        return f"cnt({_term(n.term)}) {op} {n.n}", ATOM
    if isinstance(n, ListPlus):
        return f"rplus({_term(n.left)}, {_term(n.right)})", ATOM
    if isinstance(n, ListSeg):
        return f"ls({_term(n.left)}, {_term(n.right)})", ATOM
    if isinstance(n, Neg):
        if isinstance(n.body, Eq):
            return f"{_term(n.body.left)} != {_term(n.body.right)}", ATOM
        return "!" + _pp(n.body, UNARY), UNARY
    if isinstance(n, (Exists, Forall)):
        kw = "exists" if isinstance(n, Exists) else "forall"
        return f"{kw} {n.var} . {_pp(n.body, IMP)}", QUANT
    if isinstance(n, BoundedDisjunction):
        return f"bigor {' '.join(n.variables)} . {_pp(n.body, IMP)}", QUANT
    if isinstance(n, (Imp, TImp)):
        return f"{_pp(n.left, IMP + 1)} -> {_pp(n.right, IMP)}", IMP
    binary = {Disj: ("||", OR), TOr: ("||", OR), Conj: ("&&", AND),
              TAnd: ("&&", AND), Chop: (";", CHOP), Sep: ("*", SEP)}
    if type(n) in binary:
        op, level = binary[type(n)]
        return f"{_pp(n.left, level)} {op} {_pp(n.right, level + 1)}", level
    if isinstance(n, Prop):
        return n.name, ATOM
    if isinstance(n, Eps):
        return "eps", ATOM
    if isinstance(n, TNot):
        return "!" + _pp(n.body, UNARY), UNARY
    if isinstance(n, Next):
        return "X " + _pp(n.body, UNARY), UNARY
    if isinstance(n, NextN):
        return f"X^{n.n} " + _pp(n.body, UNARY), UNARY
    if isinstance(n, Box):
        return "[] " + _pp(n.body, UNARY), UNARY
    if isinstance(n, Diamond):
        return "<> " + _pp(n.body, UNARY), UNARY
    if isinstance(n, Star):
        return _pp(n.body, POSTFIX) + "^*", POSTFIX
    if isinstance(n, Plus):
        return _pp(n.body, POSTFIX) + "^+", POSTFIX
    if isinstance(n, Prj):
        parts = ", ".join(_pp(p, IMP) for p in n.parts)
        return f"({parts}) prj {_pp(n.body, UNARY)}", UNARY
    raise TypeError(f"cannot print {type(n).__name__}")


def pretty(n: Node) -> str:
    """Render a term or formula in the concrete syntax accepted by the parser."""
    return _pp(n, QUANT)
