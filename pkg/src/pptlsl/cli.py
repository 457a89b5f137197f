"""Command-line frontend.

Traces are JSON documents ``{"states": [{"stack": {...}, "heap": {...}}, ...]}``
with heap keys written as strings.  An optional ``"loop"`` index marks the
start of a repeated suffix, making the trace an infinite lasso.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Sequence

from .ast import TemporalFormula
from .intervals import models
from .iso import G, NotRestricted
from .lasso import check_lasso
from .nfg import DEFAULT_BUDGET, Finite, build_nfg, decide_sat, decode_model, to_dot, NodeBudgetExceeded
from .normal_form import nf
from .semantics import Config, MemoryState, UnboundVariable
from .syntax import ParseError, parse_formula, pretty
from .translate import F, make_vector, vector_names, vector_size


class TraceError(ValueError):
    pass


@dataclass(frozen=True)
class TraceDocument:
    states: tuple[MemoryState, ...]
    loop: int | None = None
    kind: str | None = None

    def __post_init__(self):
        if not self.states:
            raise TraceError("a trace needs at least one state")
        if self.loop is not None and not 0 <= self.loop < len(self.states):
            raise TraceError(f"loop index {self.loop} outside the trace")

    def to_json(self) -> dict:
        out: dict = {}
        if self.kind is not None:
            out["kind"] = self.kind
        out["states"] = [
            {"stack": dict(s.stack_map), "heap": {str(k): v for k, v in sorted(s.heap_map.items())}}
            for s in self.states
        ]
        if self.loop is not None:
            out["loop"] = self.loop
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _value(v, cfg: Config | None, what: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise TraceError(f"{what} must be an integer, got {v!r}")
    if v < 0 or (cfg is not None and v > cfg.max_loc):
        raise TraceError(f"{what} = {v} is outside 0..max-loc")
    return v


def parse_trace(doc: dict | str, cfg: Config | None = None) -> TraceDocument:
    """Validate a trace document; values are checked against ``cfg`` when given."""
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as e:
            raise TraceError(f"invalid JSON: {e}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("states"), list):
        raise TraceError('a trace is an object with a "states" list')
    states = []
    for i, raw in enumerate(doc["states"]):
        if not isinstance(raw, dict):
            raise TraceError(f"state {i} is not an object")
        stack = raw.get("stack", {})
        heap = raw.get("heap", {})
        if not isinstance(stack, dict) or not isinstance(heap, dict):
            raise TraceError(f"state {i}: stack and heap must be objects")
        st = {str(k): _value(v, cfg, f"state {i} stack {k}") for k, v in stack.items()}
        hp = {}
        for k, v in heap.items():
            try:
                loc = int(k)
            except ValueError:
                raise TraceError(f"state {i}: heap key {k!r} is not a location") from None
            if loc < 1 or (cfg is not None and loc > cfg.max_loc):
                raise TraceError(f"state {i}: heap location {loc} is outside 1..max-loc")
            hp[loc] = _value(v, cfg, f"state {i} heap {k}")
        states.append(MemoryState.of(st, hp))
    loop = doc.get("loop")
    if loop is not None:
        loop = _value(loop, None, "loop")
    return TraceDocument(tuple(states), loop, doc.get("kind"))


def witness_trace(w, c, cfg: Config) -> TraceDocument:
    decoded = decode_model(w, c, cfg)
    if isinstance(w, Finite):
        return TraceDocument(decoded, None, "finite")
    prefix, cycle = decoded
    return TraceDocument(prefix + cycle, len(prefix), "lasso")


def eval_trace(p: TemporalFormula, trace: TraceDocument, cfg: Config) -> bool:
    if trace.loop is None:
        return models(trace.states, p, cfg)
    return check_lasso(p, trace.states[: trace.loop], trace.states[trace.loop:], cfg)


# ------------------------------------------------------------- commands


def _vector(p: TemporalFormula, args) -> tuple:
    return make_vector(args.heap_bound or vector_size(p))


def cmd_check(p: TemporalFormula, cfg: Config, args, out) -> int:
    c = _vector(p, args)
    d = decide_sat(p, c, cfg, args.node_budget)
    trace = witness_trace(d.witness, c, cfg) if d.sat else None
    if args.format == "json":
        doc = {"status": d.status}
        if trace is not None:
            doc["witness"] = trace.to_json()
        if d.reason:
            doc["reason"] = d.reason
        print(json.dumps(doc, indent=2), file=out)
    else:
        print(d.status.upper() + (f" ({d.reason})" if d.reason else ""), file=out)
        if trace is not None:
            print(trace.dumps(), file=out)
    return {"sat": 0, "unsat": 1}.get(d.status, 2)


def cmd_eval(p: TemporalFormula, trace: TraceDocument, cfg: Config, args, out) -> int:
    result = eval_trace(p, trace, cfg)
    if args.format == "json":
        print(json.dumps({"holds": result}), file=out)
    else:
        print("true" if result else "false", file=out)
    return 0 if result else 1


def cmd_translate(p: TemporalFormula, cfg: Config, args, out) -> int:
    c = _vector(p, args)
    fp = F(p, c, cfg)
    if args.format == "json":
        print(json.dumps({"vector": list(vector_names(c)), "formula": pretty(fp)}, indent=2), file=out)
    else:
        print(pretty(fp), file=out)
    return 0


def cmd_nf(p: TemporalFormula, cfg: Config, args, out) -> int:
    n = nf(p, _vector(p, args), cfg)
    ctx = n.ctx
    if args.format == "json":
        doc = {
            "terminal": pretty(ctx.guard_formula(n.terminal)),
            "future": [{"guard": pretty(ctx.guard_formula(m)), "next": pretty(s)} for m, s in n.future],
        }
        print(json.dumps(doc, indent=2), file=out)
    else:
        print(ctx.render(n), file=out)
    return 0


def cmd_nfg(p: TemporalFormula, cfg: Config, args, out) -> int:
    g = build_nfg(p, _vector(p, args), cfg, args.node_budget)
    if args.format == "json":
        doc = {
            "root": g.root,
            "nodes": [
                {"id": i, "formula": "eps" if n.is_epsilon else pretty(n.formula), "accepting": n.accepting}
                for i, n in enumerate(g.nodes)
            ],
            "edges": [{"from": a, "to": b, "guard": pretty(g.ctx.guard_formula(m))} for a, m, b in g.edges],
        }
        print(json.dumps(doc, indent=2), file=out)
    elif args.format == "dot":
        out.write(to_dot(g))
    else:
        for i, n in enumerate(g.nodes):
            flag = "*" if n.accepting else " "
            print(f"{flag} n{i}: {'eps' if n.is_epsilon else pretty(n.formula)}", file=out)
        for a, m, b in g.edges:
            print(f"  n{a} -> n{b} [{pretty(g.ctx.guard_formula(m))}]", file=out)
    return 0


def cmd_iso(p: TemporalFormula, cfg: Config, args, out) -> int:
    q, table = G(p)
    if args.format == "json":
        print(json.dumps({"formula": pretty(q), "names": dict(table.rows())}, indent=2), file=out)
    else:
        print(pretty(q), file=out)
        for index, name in table.rows():
            print(f"{index}\t{name}", file=out)
    return 0


# ---------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", nargs="?", help="file holding the formula")
    common.add_argument("--formula", help="formula text, instead of a file")
    common.add_argument("--max-loc", type=int, required=True, help="largest heap location")
    common.add_argument("--heap-bound", type=int, help="heap vector length (default: derived from the formula)")
    common.add_argument("--node-budget", type=int, default=DEFAULT_BUDGET)
    common.add_argument("--format", choices=("text", "json", "dot"), default="text")

    parser = argparse.ArgumentParser(prog="pptlsl", description="Satisfiability and trace checking for PPTL with separation logic.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="decide satisfiability")
    ev = sub.add_parser("eval", parents=[common], help="evaluate a formula on a trace")
    ev.add_argument("--trace", required=True, help="JSON trace file")
    sub.add_parser("translate", parents=[common], help="print the heap-free translation")
    sub.add_parser("nf", parents=[common], help="print the normal form")
    sub.add_parser("nfg", parents=[common], help="print the normal form graph")
    sub.add_parser("iso", parents=[common], help="print the propositional image and name table")
    return parser


def _read_formula(args) -> TemporalFormula:
    if (args.formula is None) == (args.file is None):
        raise ValueError("give exactly one of --formula or a formula file")
    if args.formula is not None:
        text = args.formula
    else:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    return parse_formula(text)


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        if args.max_loc < 1:
            raise ValueError("--max-loc must be at least 1")
        if args.heap_bound is not None and args.heap_bound < 1:
            raise ValueError("--heap-bound must be at least 1")
        cfg = Config(args.max_loc)
        p = _read_formula(args)
        if args.command == "eval":
            with open(args.trace, encoding="utf-8") as fh:
                trace = parse_trace(fh.read(), cfg)
            return cmd_eval(p, trace, cfg, args, out)
        handler = {
            "check": cmd_check, "translate": cmd_translate, "nf": cmd_nf,
            "nfg": cmd_nfg, "iso": cmd_iso,
        }[args.command]
        return handler(p, cfg, args, out)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
    except (TraceError, UnboundVariable, NotRestricted, NodeBudgetExceeded, OSError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
