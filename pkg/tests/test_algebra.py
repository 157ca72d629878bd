import pytest

from localterm.algebra import (
    CarrierRelation,
    FiniteAlgebra,
    check_closed_monotone,
    check_partial_model,
    check_relational_model,
    check_relative_wf,
    check_undefined_implies_redex,
    core,
    interpret,
    is_core,
    models_isomorphic,
    nf_states,
    restrict_to_core,
)
from localterm.trs_io import parse_algebra, parse_term, parse_trs

from conftest import load_algebra


def t(text, variables=()):
    return parse_term(text, variables)


@pytest.fixture
def cls_model(s_rule):
    return load_algebra("cls.alg", s_rule)


def test_interpret_owl(owl_model):
    assert interpret(owl_model, t("@(O,O)")) == 1
    assert interpret(owl_model, t("@(@(O,O),@(O,O))")) is None


def test_interpret_sflat(sflat_model):
    assert interpret(sflat_model, t("@(@(@(S,S),S),S)")) == 2


def test_interpret_unassigned_variable(owl_model):
    assert interpret(owl_model, t("@(x,O)", ["x"])) is None
    assert interpret(owl_model, t("@(x,O)", ["x"]), {"x": 0}) == 1


def test_language_membership(owl_model, cls_model):
    assert interpret(owl_model, t("@(@(O,O),O)")) is not None
    assert interpret(owl_model, t("@(@(O,O),@(O,O))")) is None
    assert interpret(cls_model, t("S")) == 4


def test_core_examples(owl_model):
    assert core(owl_model) == [0, 1]
    junk = FiniteAlgebra(owl_model.signature.copy(), 6, owl_model.tables)
    junk.set("@", (5, 5), 5)
    assert 5 not in core(junk)
    b, ren = restrict_to_core(junk)
    assert b.size == 2 and ren == {0: 0, 1: 1}
    one = parse_algebra("(CARRIER 1) (FUN a -> 0) (FUN f 0 -> 0)")
    assert core(one) == [0]


def test_restrict_to_core_idempotent(cls_model):
    b, _ = restrict_to_core(cls_model)
    c, _ = restrict_to_core(b)
    assert b == c and is_core(b)


def test_partial_model_owl(owl, owl_model):
    assert check_partial_model(owl_model, owl).ok


def test_partial_model_cls(s_rule, cls_model):
    assert check_partial_model(cls_model, s_rule).ok


def test_partial_model_asymmetry():
    trs = parse_trs("(RULES a -> b)")
    a = FiniteAlgebra(trs.signature.copy(), 2)
    a.set("a", (), 1)
    report = check_partial_model(a, trs)
    assert not report.ok
    cex = report.counterexamples[0]
    assert (cex.rule, cex.lhs, cex.rhs) == (0, 1, None)
    # the converse direction is not required
    a2 = FiniteAlgebra(trs.signature.copy(), 2)
    a2.set("b", (), 1)
    assert check_partial_model(a2, trs).ok


def test_relational_model_sk(sk, sk_file):
    ge = sk_file.ge.reflexive_closure()
    assert check_relational_model(sk_file.algebra, ge, sk).ok
    assert not check_relational_model(sk_file.algebra, CarrierRelation.identity(3), sk).ok


def test_relational_model_equality_is_partial_model(owl, owl_model, sflat_model, s_rule):
    for a, trs in ((owl_model, owl), (sflat_model, s_rule)):
        eq = CarrierRelation.identity(a.size)
        assert check_relational_model(a, eq, trs).ok == check_partial_model(a, trs).ok
    bad = parse_algebra("(CARRIER 2) (FUN O -> 0) (FUN @ 0 0 -> 1) (FUN @ 1 0 -> 0) (FUN @ 0 1 -> 1)")
    eq = CarrierRelation.identity(2)
    assert not check_partial_model(bad, owl).ok
    assert not check_relational_model(bad, eq, owl).ok


def test_relational_model_tm_second_step(tm):
    a = parse_algebra(
        "(CARRIER 2) (FUN finish -> 0) (FUN one 0 -> 0) (FUN one 1 -> 1) (FUN box 0 -> 1) (FUN box 1 -> 0)"
        " (FUN R 1 -> 1) (FUN L 1 -> 1) (FUN F 1 -> 1) (FUN blank 0 -> 0) (FUN S 0 -> 0)",
        tm.signature,
    )
    assert check_relational_model(a, CarrierRelation.identity(2), tm).ok


def test_closed_monotone_examples(owl_model, sk_file):
    assert check_closed_monotone(owl_model, CarrierRelation.identity(2)).ok
    ge = sk_file.ge.reflexive_closure()
    assert check_closed_monotone(sk_file.algebra, ge).ok
    f = parse_algebra("(CARRIER 2) (FUN a -> 0) (FUN f 0 -> 0)")
    report = check_closed_monotone(f, CarrierRelation(2, [(0, 1)]))
    assert not report.ok and report.counterexamples[0].kind == "closed"


def test_closed_monotone_respects_replacement_map():
    f = parse_algebra("(CARRIER 2) (FUN a -> 0) (FUN g 0 0 -> 1) (FUN g 1 0 -> 0)")
    rel = CarrierRelation(2, [(0, 0), (1, 1), (1, 0)])
    assert not check_closed_monotone(f, rel).ok
    assert check_closed_monotone(f, rel, {"g": [2]}).ok


def test_relative_wf_examples():
    assert check_relative_wf(CarrierRelation(2, [(1, 0)]), CarrierRelation(2, [(0, 0), (1, 1)]))
    assert not check_relative_wf(CarrierRelation(2, [(0, 1)]), CarrierRelation(2, [(1, 0)]))
    assert check_relative_wf(CarrierRelation(3), CarrierRelation.total(3))
    assert not check_relative_wf(CarrierRelation(1, [(0, 0)]), CarrierRelation(1))


def test_nf_states_examples(tm):
    trs = parse_trs("(RULES)")
    a = parse_algebra("(CARRIER 2) (FUN a -> 0) (FUN f 0 -> 1)")
    trs.signature.add("a", 0)
    trs.signature.add("f", 1)
    assert nf_states(a, trs) == {0, 1}
    trs = parse_trs("(RULES a -> b)")
    trs.signature.add("f", 1)
    a = parse_algebra("(CARRIER 3) (FUN a -> 0) (FUN b -> 1) (FUN f 0 -> 2)")
    assert nf_states(a, trs) == {1}


def test_nf_states_tm(tm):
    # second model of the TM script: every state is the value of some redex
    a = parse_algebra(
        "(CARRIER 2) (FUN finish -> 0) (FUN one 0 -> 0) (FUN one 1 -> 1) (FUN box 0 -> 1) (FUN box 1 -> 0)"
        " (FUN R 1 -> 1) (FUN L 1 -> 1) (FUN F 1 -> 1) (FUN blank 0 -> 0) (FUN S 0 -> 0)",
        tm.signature,
    )
    assert 0 not in nf_states(a, tm)


def test_undefined_implies_redex(owl, owl_model, s_rule, cls_model):
    assert check_undefined_implies_redex(owl_model, owl).ok
    assert check_undefined_implies_redex(cls_model, s_rule).ok


def test_undefined_normal_form_detected():
    trs = parse_trs("(RULES)")
    trs.signature.add("a", 0)
    a = FiniteAlgebra(trs.signature.copy(), 1)
    report = check_undefined_implies_redex(a, trs)
    assert not report.ok
    assert "a" in report.counterexamples[0].detail


def test_undefined_implies_redex_rejects_nonlinear():
    trs = parse_trs("(VAR x) (RULES f(x,x) -> x)")
    a = FiniteAlgebra(trs.signature.copy(), 1)
    with pytest.raises(ValueError):
        check_undefined_implies_redex(a, trs)


def test_sflat_not_nf_complete(s_rule, sflat_model):
    # the flat model misses normalising terms such as S(SS)
    assert not check_undefined_implies_redex(sflat_model, s_rule).ok


def test_isomorphism(owl_model):
    assert models_isomorphic(owl_model, owl_model) == {0: 0, 1: 1}
    swapped = parse_algebra("(CARRIER 2) (FUN O -> 1) (FUN @ 1 1 -> 0) (FUN @ 1 0 -> 0) (FUN @ 0 1 -> 0)")
    assert models_isomorphic(owl_model, swapped) == {0: 1, 1: 0}
    three = parse_algebra("(CARRIER 3) (FUN O -> 0) (FUN @ 0 0 -> 1) (FUN @ 1 0 -> 2)")
    assert models_isomorphic(owl_model, three) is None


def test_cls_table_shape(cls_model):
    assert cls_model.size == 38
    assert len(cls_model.tables["@"]) == 1001
