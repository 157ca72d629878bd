import pytest

from localterm.algebra import interpret
from localterm.prover import replay
from localterm.rfc import (
    build_marked,
    check_rfc_closure,
    closing_algebras,
    forbidden_factors,
    rfc_pipeline,
    search_closing_algebra,
)
from localterm.terms import one_step_successors, render
from localterm.trs_io import parse_algebra, parse_srs, parse_trs

from conftest import fixture_text


@pytest.fixture
def marked(rfc_srs):
    return build_marked(rfc_srs)


@pytest.fixture
def rfc_alg(marked):
    return parse_algebra(fixture_text("rfc.alg"), marked.marked.signature)


def test_marked_rules(marked):
    # a -> eps and b -> eps have one-letter left-hand sides and give nothing
    assert [str(r) for r in marked.sharp_rules] == [
        "#(c(x)) -> #(a(x))",
        "#(b(x)) -> #(b(b(c(a(c(x))))))",
    ]


def test_seeds(marked):
    assert [render(s) for s in marked.seeds] == ["#(e)", "#(a(e))", "#(b(b(c(a(c(e))))))"]


def test_build_marked_rejects_trs(owl):
    with pytest.raises(ValueError):
        build_marked(owl)


def test_closure_holds(marked, rfc_alg):
    assert check_rfc_closure(marked, rfc_alg).ok


def test_missing_mark_transition_breaks_closure(marked):
    text = fixture_text("rfc.alg").replace("(FUN # 0 -> 2)\n", "")
    a = parse_algebra(text, marked.marked.signature)
    report = check_rfc_closure(marked, a)
    assert not report.ok
    assert any("seed" in str(c) for c in report.counterexamples)


def test_forbidden_factors(marked, rfc_alg):
    assert forbidden_factors(marked, rfc_alg) == ["bcb", "bacb", "bcab"]


def test_pipeline_proves_rfc_system(rfc_srs, rfc_alg):
    trace = rfc_pipeline(rfc_srs, rfc_alg)
    assert trace.outcome == "proved"
    assert trace.steps[1].data["labeled_rules"] == 6
    assert "bcb, bacb, bcab" in trace.notes[0]
    assert replay(trace) == ("proved", [])


def test_pipeline_stops_on_bad_closure(rfc_srs, marked):
    a = parse_algebra(fixture_text("rfc.alg").replace("(FUN # 0 -> 2)\n", ""), marked.marked.signature)
    trace = rfc_pipeline(rfc_srs, a)
    assert trace.outcome == "unknown"
    assert not trace.steps[0].ok


def test_seed_closure_is_defined(marked, rfc_alg):
    # everything reachable from the seeds in a few steps stays in the language
    frontier = list(marked.seeds)
    seen = set(frontier)
    for _ in range(4):
        nxt = []
        for t in frontier:
            assert interpret(rfc_alg, t) is not None, render(t)
            for _, _, u in one_step_successors(marked.marked, t):
                if u not in seen:
                    seen.add(u)
                    nxt.append(u)
        frontier = nxt
    assert len(seen) > 20


def test_search_proves_simple_system():
    srs = parse_srs("(RULES a b -> a)")
    found = search_closing_algebra(srs, max_states=2)
    assert found is not None
    a, trace = found
    assert trace.outcome == "proved"
    assert check_rfc_closure(build_marked(srs), a).ok


def test_search_fails_on_nonterminating():
    assert search_closing_algebra(parse_srs("(RULES a -> a a)"), max_states=2) is None


def test_closing_algebras_are_closing(rfc_srs):
    m = build_marked(rfc_srs)
    count = 0
    for a in closing_algebras(rfc_srs, 2):
        assert check_rfc_closure(m, a).ok
        count += 1
    assert count > 0


def test_rfc_needs_srs():
    with pytest.raises(ValueError):
        rfc_pipeline(parse_trs("(VAR x y) (RULES f(x,y) -> x)"), None)
