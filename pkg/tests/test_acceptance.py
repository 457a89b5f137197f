"""Acceptance criteria 1 to 10.

Each test prints a single ``PASS`` or ``FAIL`` line with its measurements
before asserting, so the verdicts are visible in a plain ``pytest -v`` run.
"""

import json
import time
import warnings
from collections import Counter

import pytest

from pptlsl.ast import Const, Eq, Next, PointsTo, State, TOr, Box, Var
from pptlsl.brute import encoded_states, find_model, mismatches, translation_mismatches
from pptlsl.cli import main
from pptlsl.intervals import models, project
from pptlsl.iso import G, H, NameTable, canonical, is_isomorphic
from pptlsl.lasso import check_lasso
from pptlsl.nfg import Finite, decide_sat, decode_model
from pptlsl.normal_form import Sat, nf, state_sat
from pptlsl.semantics import Config, MemoryState, enumerate_states, eval_state
from pptlsl.syntax import parse_formula, parse_state
from pptlsl.translate import (
    F, VectorTooSmall, decode_stack, encode_state, f_state, make_vector, vector_names, vector_size,
)

from formula_gen import ac_normal, core_corpus, pptl, restricted, rng_choose, sl_formula

CFG = Config(2)
EXAMPLE = "X x=0 || [] x|->0"
POINTS_TO_GOLDEN = ("$h1 != 0 && $h2 = 0 && $h1 = x && $h1' = 0"
                    " || $h2 != 0 && $h1 = 0 && $h2 = x && $h2' = 0")


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
        assert ok, detail
    return emit


def test_criterion_1_points_to_golden(report):
    t = time.perf_counter()
    out = f_state(PointsTo(Var("x"), Const(0)), make_vector(2), CFG)
    dt = time.perf_counter() - t
    same = ac_normal(out) == ac_normal(parse_state(POINTS_TO_GOLDEN))
    report(1, same and dt < 1.0, f"f(x|->0, C) matches the two-disjunct golden formula ({dt:.3f}s)")


def _rename(p, c, target):
    """Rename the variables of vector ``c`` to those of ``target``."""
    from pptlsl.ast import substitute
    return substitute(p, dict(zip(vector_names(c), map(Var, vector_names(target)))))


def test_criterion_2_temporal_golden(report):
    t = time.perf_counter()
    c = make_vector(2, start=7)
    out = _rename(F(parse_formula(EXAMPLE), c, CFG), c, make_vector(2))
    dt = time.perf_counter() - t
    cell = parse_state(POINTS_TO_GOLDEN)
    expected = TOr(Next(State(Eq(Var("x"), Const(0)))), Box(State(cell)))
    same = ac_normal(out) == ac_normal(expected)
    report(2, same and dt < 1.0, f"F(X x=0 || [] x|->0, C) matches up to renaming ({dt:.3f}s)")


def test_criterion_3_vector_size(report):
    n = vector_size(parse_formula(EXAMPLE))
    report(3, n == 2, f"vector_size = {n}, expected 2")


def test_criterion_4_projection(report):
    s = tuple(MemoryState.of({"x": i % 3}) for i in range(5))
    got = project(s, (0, 0, 2, 2, 2, 3))
    report(4, got == (s[0], s[2], s[3]), "<s0..s4> projected by (0,0,2,2,2,3) = <s0,s2,s3>")


def test_criterion_5_state_translation(report):
    t = time.perf_counter()
    corpus = core_corpus(3)
    states = list(enumerate_states(["x", "y"], CFG, CFG.max_loc))
    pointwise = existential = 0
    bad = []
    for phi in corpus:
        n = vector_size(phi)
        c = make_vector(n)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", VectorTooSmall)
            f = f_state(phi, c, CFG)
        holds_somewhere = False
        for s in states:
            truth = eval_state(s, phi, CFG)
            holds_somewhere |= truth
            if len(s.heap_map) <= n:
                pointwise += 1
                if truth != eval_state(encode_state(s, c), f, CFG):
                    bad.append(("pointwise", phi, s))
        res = state_sat(f, CFG, c)
        existential += 1
        if isinstance(res, Sat):
            # the solver's model must satisfy f and decode to a model of phi;
            # variables it leaves out are unconstrained
            model = dict.fromkeys(("x", "y") + vector_names(c), 0) | dict(res.model)
            ok = eval_state(MemoryState.of(model), f, CFG) and eval_state(decode_stack(model, c), phi, CFG)
        else:
            ok = not holds_somewhere
        if not ok:
            bad.append(("existential", phi))
    dt = time.perf_counter() - t
    report(5, not bad and dt < 300,
           f"{len(corpus)} formulas, {pointwise} pointwise and {existential} existential checks, "
           f"{len(bad)} disagreements ({dt:.1f}s)")


def test_criterion_6_temporal_translation(report):
    t = time.perf_counter()
    count, bad = 0, []
    for seed in range(500):
        p = sl_formula(rng_choose(seed), 3)
        c = make_vector(max(vector_size(p), CFG.max_loc))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", VectorTooSmall)
            diff = translation_mismatches(p, c, CFG, 3)
        count += 1
        if diff:
            bad.append((seed, p, diff[0]))
    dt = time.perf_counter() - t
    report(6, not bad and dt < 600,
           f"{count} formulas over all intervals of up to 3 states, {len(bad)} disagreements ({dt:.1f}s)")


def test_criterion_7_isomorphism(report):
    bad = 0
    for seed in range(1000):
        ps, table = canonical(restricted(rng_choose(seed)))
        q, _ = G(ps, table)
        if H(q, table) != ps or not is_isomorphic(ps, q, table):
            bad += 1
        q = pptl(rng_choose(10_000 + seed))
        table = NameTable(["u", "v", "w"])
        ps = H(q, table)
        if G(ps, table)[0] != q or not is_isomorphic(ps, q, table):
            bad += 1
    report(7, bad == 0, f"2000 round trips (1000 each direction), {bad} failures")


def test_criterion_8_normal_form(report):
    t = time.perf_counter()
    bad = []
    for seed in range(300):
        p = sl_formula(rng_choose(50_000 + seed), 3)
        c = make_vector(vector_size(p))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", VectorTooSmall)
            diff = mismatches(nf(p, c, CFG).reassemble(), F(p, c, CFG), encoded_states(p, c, CFG), CFG, 4)
        if diff:
            bad.append((seed, p))
    dt = time.perf_counter() - t
    report(8, not bad, f"300 formulas over all intervals of up to 4 states, {len(bad)} disagreements ({dt:.1f}s)")


NAMED = {
    "x|->0 * x|->0": "unsat",
    "emp && alloc(x)": "unsat",
    "<> ls(x, 0)": "sat",
    "<> x = 1 && [] !(x = 1)": "unsat",
    EXAMPLE: "sat",
}

HAND = [
    "eps && X true", "<> (x|->0) ; [] x=0", "[] <> x = 1 && [] <> x = 0", "x |-> 0 && y |-> 0 && x != y",
    "ls(x, 0) && X ls(y, 0)", "(x = 0)^* ; y = 1", "(x = 0) prj y = 1", "(x = 0, y = 0) prj eps",
    "emp && X emp && X X eps", "[] emp && <> alloc(x)", "x |-> y * y |-> x", "x |-> y * y |-> x && x = y",
    "<> eps && [] x = 0", "(x = 1 && X eps)^* && <> x = 0", "!(<> eps)", "X X X x = 2",
    "alloc(x) ; emp ; alloc(x)", "[] (x |-> 0 || emp) && <> x |-> 0", "ls(x, 0) && x = 0",
    "(x |-> 0 ; y |-> 0) && [] x = y",
]


def test_criterion_9_decisions(report):
    t = time.perf_counter()
    formulas = []
    for text in list(NAMED) + HAND:
        formulas.append((text, parse_formula(text)))
    seed = 0
    while len(formulas) < 100:
        p = sl_formula(rng_choose(90_000 + seed), 3)
        formulas.append((f"random seed {90_000 + seed}", p))
        seed += 1
    verdicts, problems = Counter(), []
    for label, p in formulas:
        d = decide_sat(p, None, CFG)
        verdicts[d.status] += 1
        if label in NAMED and d.status != NAMED[label]:
            problems.append((label, "expected " + NAMED[label], d.status))
        if d.sat:
            w = decode_model(d.witness, d.graph.vector, CFG)
            ok = models(w, p, CFG) if isinstance(d.witness, Finite) else check_lasso(p, *w, CFG)
            if not ok:
                problems.append((label, "witness rejected"))
        if find_model(p, CFG, 3) is not None and not d.sat:
            problems.append((label, "bounded search found a model", d.status))
    dt = time.perf_counter() - t
    summary = ", ".join(f"{k} {v}" for k, v in sorted(verdicts.items()))
    report(9, not problems and dt < 600,
           f"{len(formulas)} formulas ({summary}), {len(problems)} disagreements ({dt:.1f}s)")


LIST_X = "((x = 0 && emp) || ls(x, 0))"
LIST_Y = "((y = 0 && emp) || ls(y, 0))"
BOTH = f"({LIST_X} * {LIST_Y})"

# create a two-cell list at x, then reverse it into y
TRACE = [
    ({"x": 0, "y": 0, "t": 0}, {}),
    ({"x": 1, "y": 0, "t": 1}, {1: 0}),
    ({"x": 2, "y": 0, "t": 2}, {1: 0, 2: 1}),
    ({"x": 2, "y": 0, "t": 1}, {1: 0, 2: 0}),
    ({"x": 1, "y": 2, "t": 1}, {1: 0, 2: 0}),
    ({"x": 1, "y": 2, "t": 0}, {1: 2, 2: 0}),
    ({"x": 0, "y": 1, "t": 0}, {1: 2, 2: 0}),
]


def test_criterion_10_create_and_reverse(report, tmp_path, capsys):
    t = time.perf_counter()
    doc = {"states": [{"stack": s, "heap": {str(k): v for k, v in h.items()}} for s, h in TRACE]}
    path = tmp_path / "trace.json"
    path.write_text(json.dumps(doc))
    lists = f"<> {LIST_X} ; <> {LIST_Y}"
    loop = f"<> ((X^4 {BOTH})^*)"
    codes = [main(["eval", "--formula", f, "--max-loc", "2", "--trace", str(path)]) for f in (lists, loop)]
    capsys.readouterr()
    # the star holds vacuously on the last state, so also check a run that
    # actually spans four steps from the start of the reversal
    sigma = tuple(MemoryState.of(s, h) for s, h in TRACE)
    spans = models(sigma[2:], parse_formula(f"(X^4 {BOTH})^*"), CFG)
    dt = time.perf_counter() - t
    ok = codes == [0, 0] and spans and dt < 60
    report(10, ok, f"7-state trace: eval exit codes {codes}, four-step iteration from s2 {spans} ({dt:.1f}s)")
