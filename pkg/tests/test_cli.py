import io
import json

import pytest
from hypothesis import given, settings, strategies as st

from pptlsl.cli import TraceDocument, TraceError, main, parse_trace
from pptlsl.semantics import Config, MemoryState

CFG = Config(2)


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def write_trace(tmp_path, doc, name="trace.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return str(path)


ONE_STATE = {"states": [{"stack": {"x": 0}, "heap": {}}]}


@pytest.mark.parametrize("formula, code", [
    ("x|->0 * x|->0", 1),
    ("emp && alloc(x)", 1),
    ("<> ls(x, 0)", 0),
    ("<> x = 1 && [] !(x = 1)", 1),
    ("X x=0 || [] x|->0", 0),
])
def test_check_exit_codes(formula, code):
    assert run("check", "--formula", formula, "--max-loc", "2")[0] == code


def test_check_json_reports_witness():
    code, text = run("check", "--formula", "<> ls(x, 0)", "--max-loc", "2", "--format", "json")
    doc = json.loads(text)
    assert code == 0 and doc["status"] == "sat"
    assert doc["witness"]["kind"] in ("finite", "lasso")


def test_budget_exhaustion_is_unknown():
    code, text = run("check", "--formula", "[] <> x = 1 && [] <> x = 0", "--max-loc", "2",
                     "--node-budget", "1")
    assert code == 2 and text.startswith("UNKNOWN")


def test_eval_on_one_state(tmp_path):
    path = write_trace(tmp_path, ONE_STATE)
    assert run("eval", "--formula", "eps", "--max-loc", "2", "--trace", path) == (0, "true\n")
    assert run("eval", "--formula", "X true", "--max-loc", "2", "--trace", path) == (1, "false\n")


@pytest.mark.parametrize("doc", [
    "not json",
    {"states": []},
    {"states": [{"stack": {"x": 3}, "heap": {}}]},
    {"states": [{"stack": {"x": 0}, "heap": {"0": 1}}]},
    {"states": [{"stack": {"x": 0}, "heap": {"a": 1}}]},
    {"states": [{"stack": {"x": True}, "heap": {}}]},
    {"states": [{"stack": {"x": 0}}], "loop": 4},
])
def test_bad_traces_exit_2(tmp_path, doc):
    path = write_trace(tmp_path, doc)
    assert run("eval", "--formula", "eps", "--max-loc", "2", "--trace", path)[0] == 2


def test_unbound_variable_exits_2(tmp_path):
    path = write_trace(tmp_path, ONE_STATE)
    assert run("eval", "--formula", "y = 0", "--max-loc", "2", "--trace", path)[0] == 2


def test_parse_error_and_missing_formula():
    assert run("check", "--formula", "x = ", "--max-loc", "2")[0] == 2
    assert run("check", "--max-loc", "2")[0] == 2


def test_formula_from_file(tmp_path):
    f = tmp_path / "p.txt"
    f.write_text("x|->0 * x|->0\n")
    assert run("check", str(f), "--max-loc", "2")[0] == 1


def test_lasso_trace(tmp_path):
    doc = {"states": [{"stack": {"x": 0}}, {"stack": {"x": 1}}], "loop": 0}
    path = write_trace(tmp_path, doc)
    assert run("eval", "--formula", "[] <> x = 1", "--max-loc", "2", "--trace", path)[0] == 0
    assert run("eval", "--formula", "<> eps", "--max-loc", "2", "--trace", path)[0] == 1


@pytest.mark.parametrize("formula", [
    "<> ls(x, 0)",
    "X x=0 || [] x|->0",
    "[] <> x = 1 && [] <> x = 0",
    "x |-> 0 ; (emp && y = 1)",
])
def test_witness_satisfies_formula(tmp_path, formula):
    code, text = run("check", "--formula", formula, "--max-loc", "2", "--format", "json")
    assert code == 0
    path = write_trace(tmp_path, json.loads(text)["witness"])
    assert run("eval", "--formula", formula, "--max-loc", "2", "--trace", path)[0] == 0


@pytest.mark.parametrize("formula", [
    "x|->0 * x|->0", "<> ls(x, 0)", "eps && X true", "(x = 0)^* ; y = 1", "(x = 0) prj y = 1",
])
def test_double_negation_keeps_the_verdict(formula):
    a = run("check", "--formula", formula, "--max-loc", "2")[0]
    b = run("check", "--formula", f"!!({formula})", "--max-loc", "2")[0]
    assert a == b


def test_iso_output():
    code, text = run("iso", "--formula", "x=y ; 0=z", "--max-loc", "2")
    assert code == 0
    assert text.splitlines() == ["p_0_1 ; q_0_2", "x0\tx", "x1\ty", "x2\tz"]
    assert run("iso", "--formula", "x |-> 0", "--max-loc", "2")[0] == 2


def test_translate_output():
    code, text = run("translate", "--formula", "X x=0 || [] x|->0", "--max-loc", "2", "--format", "json")
    doc = json.loads(text)
    assert code == 0 and doc["vector"] == ["$h1", "$h1'", "$h2", "$h2'"]
    assert "|->" not in doc["formula"]


def test_nf_and_nfg_output():
    assert run("nf", "--formula", "X x = 0", "--max-loc", "2")[0] == 0
    code, dot = run("nfg", "--formula", "eps", "--max-loc", "2", "--format", "dot")
    assert code == 0 and dot.startswith("digraph nfg {") and dot.count("->") == 1
    doc = json.loads(run("nfg", "--formula", "eps", "--max-loc", "2", "--format", "json")[1])
    assert len(doc["nodes"]) == 2 and len(doc["edges"]) == 1


stacks = st.dictionaries(st.sampled_from("xyz"), st.integers(0, 2), max_size=3)
heaps = st.dictionaries(st.integers(1, 2), st.integers(0, 2), max_size=2)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(stacks, heaps), min_size=1, max_size=4), st.data())
def test_trace_round_trip(raw, data):
    states = tuple(MemoryState.of(s, h) for s, h in raw)
    loop = data.draw(st.none() | st.integers(0, len(states) - 1))
    doc = TraceDocument(states, loop)
    again = parse_trace(doc.dumps(), CFG)
    assert again == doc


def test_trace_document_rejects_empty():
    with pytest.raises(TraceError):
        TraceDocument(())
