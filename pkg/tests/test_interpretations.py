from localterm.interpretations import (
    LinearInterpretation,
    LinearPoly,
    check_label_compat,
    check_mu_monotone,
    check_rule,
    eval_symbolic,
    poly_ge,
    search_linear,
    strict_rules,
)
from localterm.terms import Rule, Trs
from localterm.trs_io import parse_term, parse_trs

# the factorial interpretation restricted to its linear symbols
FAC = LinearInterpretation({
    "0": (0, ()),
    "s": (1, (1,)),
    "add": (1, (1, 2)),
    "-": None,
})


def poly(const, **coeffs):
    return LinearPoly.make(const, coeffs)


def test_eval_add_rule_lhs():
    t = parse_term("add(x,s(y))", ["x", "y"])
    assert eval_symbolic(FAC, t) == poly(3, x=1, y=2)


def test_eval_variable():
    assert eval_symbolic(FAC, parse_term("x", ["x"])) == poly(0, x=1)


def test_eval_undefined_propagates():
    assert eval_symbolic(FAC, parse_term("add(-(x),0)", ["x"])) is None
    assert eval_symbolic(FAC, parse_term("s(s(-(0)))")) is None


def test_poly_ge_examples():
    assert poly_ge(poly(3, x=1, y=2), poly(2, x=1, y=2), strict=True)
    assert poly_ge(poly(0, x=1), poly(0, x=1))
    assert not poly_ge(poly(0, x=1), poly(0, x=1), strict=True)
    p, q = poly(1, x=2), poly(5, x=1)
    assert not poly_ge(p, q) and not poly_ge(q, p)


def test_check_rule_add_successor():
    rule = Rule(parse_term("add(x,s(y))", ["x", "y"]), parse_term("s(add(x,y))", ["x", "y"]))
    assert check_rule(FAC, rule, strict=True)


def test_check_rule_vacuous_when_lhs_undefined():
    rule = Rule(parse_term("add(-(x),-(y))", ["x", "y"]), parse_term("-(add(x,y))", ["x", "y"]))
    assert check_rule(FAC, rule, strict=True)


def test_check_rule_needs_defined_rhs():
    i = LinearInterpretation({"f": (1, (1,)), "g": None})
    assert not check_rule(i, Rule(parse_term("f(x)", ["x"]), parse_term("g(x)", ["x"])), strict=False)


def test_check_rule_fac2_add_rules():
    i = LinearInterpretation({"0": (0, ()), "s": (1, (1,)), "add": (0, (1, 2))})
    trs = parse_trs("(VAR x y) (RULES add(x,s(y)) -> s(add(x,y)) add(0,y) -> y)")
    assert check_rule(i, trs.rules[0], strict=True)
    # add(0,y) -> y only decreases weakly under n + 2m
    assert not check_rule(i, trs.rules[1], strict=True)
    assert check_rule(i, trs.rules[1], strict=False)


def test_check_rule_mul_zero_fails_strictly():
    i = LinearInterpretation({"0": (0, ()), "mul": (0, (1, 1))})
    rule = Rule(parse_term("mul(x,0)", ["x"]), parse_term("0"))
    assert not check_rule(i, rule, strict=True)


def test_identity_weak():
    i = LinearInterpretation({"f": (0, (1,))})
    assert check_rule(i, Rule(parse_term("f(x)", ["x"]), parse_term("f(x)", ["x"])), strict=False)


def test_mu_monotone():
    i = LinearInterpretation({"R^1": (0, (2,)), "g": (0, (0, 1))})
    assert check_mu_monotone(i, {"R^1": [1]}) == []
    assert check_mu_monotone(i, {"g": [1]}) != []
    assert check_mu_monotone(i, {}) == []


def test_label_compat():
    i = LinearInterpretation({"f^0": (0, (2,)), "f^1": (0, (3,))})
    assert check_label_compat(i, [(0, 0), (1, 1)]) == []
    assert check_label_compat(i, [(1, 0)]) == []
    j = LinearInterpretation({"f^0": (0, (3,)), "f^1": (0, (2,))})
    assert check_label_compat(j, [(1, 0)]) == ["f^1 does not dominate f^0"]


def test_search_empty_trs():
    i = search_linear(Trs.from_rules([]), set())
    assert i is not None and i.forms == {}


def test_search_impossible():
    trs = parse_trs("(VAR x) (RULES f(x) -> f(f(x)))")
    for bound in (1, 2, 3):
        assert search_linear(trs, {0}, bound) is None


def test_search_result_reverifies():
    trs = parse_trs("(VAR x y) (RULES add(x,s(y)) -> s(add(x,y)) add(x,0) -> x)")
    i = search_linear(trs, {0}, 3)
    assert i is not None
    assert check_rule(i, trs.rules[0], strict=True)
    assert check_rule(i, trs.rules[1], strict=False)
    assert 0 in strict_rules(i, trs)
    assert check_mu_monotone(i) == []


def test_search_labeled_rfc_system(rfc_srs):
    from localterm.rfc import build_marked, _label
    from localterm.trs_io import parse_algebra
    from conftest import fixture_text

    m = build_marked(rfc_srs)
    a = parse_algebra(fixture_text("rfc.alg"), m.marked.signature)
    lab = _label(m, a)
    found = [k for k in range(len(lab)) if search_linear(lab, {k}, 2) is not None]
    assert found
