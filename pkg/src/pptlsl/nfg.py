"""Normal form graphs and the satisfiability decision built on them.

Nodes are canonical formulas together with an ``accepting`` flag.  A node
is accepting when its formula carries no marked chop: every chop that was
running at the previous accepting node has finished.  Entering an accepting
node marks all running chops again.  An infinite path is a model exactly
when it visits accepting nodes infinitely often, so a chop whose left
operand never terminates blocks acceptance.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
import networkx as nx

from .ast import TemporalFormula, free_vars
from .lasso import check_assignments
from .normal_form import NFContext, make_context
from .semantics import Config
from .syntax import pretty
from .translate import F, VarVector, decode_stack, make_vector, vector_size

DEFAULT_BUDGET = 100_000


class NodeBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class NFGNode:
    formula: TemporalFormula | None  # None for the eps node
    accepting: bool

    @property
    def is_epsilon(self) -> bool:
        return self.formula is None


EPS_NODE = NFGNode(None, True)


@dataclass
class NormalFormGraph:
    ctx: NFContext
    vector: VarVector
    root: int
    nodes: list[NFGNode] = field(default_factory=list)
    # (source, guard mask, target) with targets in insertion order
    edges: list[tuple[int, int, int]] = field(default_factory=list)

    @property
    def eps(self) -> int | None:
        try:
            return self.nodes.index(EPS_NODE)
        except ValueError:
            return None

    def out_edges(self, i: int) -> list[tuple[int, int, int]]:
        return [e for e in self.edges if e[0] == i]

    def digraph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(len(self.nodes)))
        g.add_edges_from((a, b) for a, _, b in self.edges)
        return g


def build_nfg(p: TemporalFormula, c: VarVector, cfg: Config, budget: int = DEFAULT_BUDGET,
              ctx: NFContext | None = None) -> NormalFormGraph:
    """Worklist construction from ``F(p, c)``; edges with empty guards are never added."""
    ctx = ctx or make_context(p, c, cfg)
    root_formula = ctx.canon(F(p, c, cfg))
    g = NormalFormGraph(ctx, c, 0)
    index: dict[NFGNode, int] = {}

    def node_for(formula: TemporalFormula) -> int:
        if ctx.has_marked(formula):
            node = NFGNode(formula, False)
        else:
            node = NFGNode(ctx.mark_all(formula), True)
        i = index.get(node)
        if i is None:
            if len(g.nodes) >= budget:
                raise NodeBudgetExceeded(f"more than {budget} nodes")
            i = index[node] = len(g.nodes)
            g.nodes.append(node)
            work.append(i)
        return i

    work: deque[int] = deque()
    node_for(root_formula)
    edge_seen = set()
    while work:
        i = work.popleft()
        node = g.nodes[i]
        if node.is_epsilon:
            continue
        n = ctx.nf(node.formula)
        if n.terminal:
            j = index.get(EPS_NODE)
            if j is None:
                j = index[EPS_NODE] = len(g.nodes)
                g.nodes.append(EPS_NODE)
            g.edges.append((i, n.terminal, j))
        for m, s in n.future:
            j = node_for(s)
            key = (i, j)
            if key in edge_seen:
                # two successors can collapse onto one node only through marks
                for k, (a, mm, b) in enumerate(g.edges):
                    if a == i and b == j:
                        g.edges[k] = (a, mm | m, b)
                        break
                continue
            edge_seen.add(key)
            g.edges.append((i, m, j))
    return g


# ------------------------------------------------------------ decisions


@dataclass(frozen=True)
class Finite:
    states: tuple[dict, ...]


@dataclass(frozen=True)
class Lasso:
    prefix: tuple[dict, ...]
    cycle: tuple[dict, ...]


@dataclass(frozen=True)
class Decision:
    status: str  # "sat", "unsat" or "unknown"
    witness: Finite | Lasso | None = None
    graph: NormalFormGraph | None = field(default=None, compare=False, repr=False)
    reason: str = ""

    @property
    def sat(self) -> bool:
        return self.status == "sat"


def _bfs_path(g: NormalFormGraph, start: int, goal, allowed=None) -> list[tuple[int, int, int]] | None:
    """Edges of a shortest path from ``start`` to a node satisfying ``goal``."""
    succ: dict[int, list] = {}
    for e in g.edges:
        succ.setdefault(e[0], []).append(e)
    parent: dict[int, tuple | None] = {start: None}
    queue = deque([start])
    while queue:
        i = queue.popleft()
        for e in succ.get(i, ()):
            j = e[2]
            if allowed is not None and j not in allowed:
                continue
            if goal(j):
                path = [e]
                k = i
                while parent[k] is not None:
                    path.append(parent[k])
                    k = parent[k][0]
                return path[::-1]
            if j not in parent:
                parent[j] = e
                queue.append(j)
    return None


def find_finite(g: NormalFormGraph) -> list[tuple[int, int, int]] | None:
    eps = g.eps
    if eps is None:
        return None
    return _bfs_path(g, g.root, lambda j: j == eps)


def accepting_cycles(g: NormalFormGraph):
    """Yield (node, component) for accepting nodes lying on a cycle."""
    dg = g.digraph()
    if g.eps is not None:
        dg.remove_node(g.eps)
    reachable = nx.descendants(dg, g.root) | {g.root}
    for comp in sorted(nx.strongly_connected_components(dg.subgraph(reachable)), key=min):
        if len(comp) == 1:
            (v,) = comp
            if not dg.has_edge(v, v):
                continue
        for v in sorted(comp):
            if g.nodes[v].accepting:
                yield v, comp


def candidate_lassos(g: NormalFormGraph, limit: int = 64):
    """Up to ``limit`` lassos through accepting cycles, as edge lists."""
    count = 0
    for v, comp in accepting_cycles(g):
        prefix = [] if v == g.root else _bfs_path(g, g.root, lambda j: j == v)
        cycle = _bfs_path(g, v, lambda j: j == v, allowed=comp)
        yield prefix, cycle
        count += 1
        if count >= limit:
            return


def _states(g: NormalFormGraph, path) -> tuple[dict, ...]:
    return tuple(g.ctx.domain.witness(m) for _, m, _ in path)


def decide_sat(p: TemporalFormula, c: VarVector | None, cfg: Config, budget: int = DEFAULT_BUDGET) -> Decision:
    """Satisfiability of ``p`` through the graph of ``F(p, c)``.

    ``c`` defaults to a vector of ``vector_size(p)`` pairs.  Infinite paths
    are re-checked with the lasso evaluator before being reported.
    """
    if c is None:
        c = make_vector(vector_size(p))
    try:
        g = build_nfg(p, c, cfg, budget)
    except NodeBudgetExceeded as e:
        return Decision("unknown", reason=str(e))
    path = find_finite(g)
    if path is not None:
        return Decision("sat", Finite(_states(g, path)), g)
    root = g.nodes[g.root].formula
    found_cycle = False
    for prefix, cycle in candidate_lassos(g):
        found_cycle = True
        w = Lasso(_states(g, prefix), _states(g, cycle))
        if check_assignments(g.ctx, root, w.prefix, w.cycle):
            return Decision("sat", w, g)
    if found_cycle:
        # accepting cycles exist but none of the sampled ones is a model
        return Decision("unknown", None, g, "no infinite path could be confirmed")
    return Decision("unsat", None, g)


def decode_model(w: Finite | Lasso, c: VarVector, cfg: Config | None = None):
    """Turn witness assignments back into memory states with heaps."""
    if isinstance(w, Finite):
        return tuple(decode_stack(s, c) for s in w.states)
    return (tuple(decode_stack(s, c) for s in w.prefix), tuple(decode_stack(s, c) for s in w.cycle))


# ------------------------------------------------------------------ DOT


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(g: NormalFormGraph) -> str:
    lines = ["digraph nfg {", "  node [shape=box, fontcolor=black];"]
    for i, node in enumerate(g.nodes):
        if node.is_epsilon:
            lines.append(f"  n{i} [label=\"eps\", shape=doublecircle];")
            continue
        attrs = [f"label={_quote(pretty(node.formula))}"]
        if node.accepting:
            attrs.append("peripheries=2")
        if i == g.root:
            attrs.append("style=bold")
        lines.append(f"  n{i} [{', '.join(attrs)}];")
    for a, m, b in sorted(g.edges, key=lambda e: (e[0], e[2])):
        label = pretty(g.ctx.guard_formula(m))
        lines.append(f"  n{a} -> n{b} [label={_quote(label)}, fontcolor=red];")
    lines.append("}")
    return "\n".join(lines) + "\n"
