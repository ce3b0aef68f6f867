from fractions import Fraction

import pytest

from surecount.nnf import (
    EnumerationRefused,
    NnfParseError,
    compute_varsets,
    model_enumerate,
    parse_nnf,
    parse_sexpr,
    render_nnf,
    validate,
)
from surecount.weights import WeightMap, parse_weights
from surecount.generators import gen_tau


def unit_weights():
    return WeightMap()


def test_parse_single_true_node():
    dag = parse_nnf("nnf 1 0 0\nA 0\n")
    assert dag.size == 1 and dag.num_vars == 0
    assert model_enumerate(dag, unit_weights()) == 1


def test_parse_tautology():
    dag = parse_nnf("nnf 3 2 1\nL 1\nL -1\nO 1 2 0 1\n")
    assert model_enumerate(dag, unit_weights()) == 2


def test_parse_conjunction():
    dag = parse_nnf("nnf 3 2 2\nL 1\nL 2\nA 2 0 1\n")
    assert model_enumerate(dag, unit_weights()) == 1
    wm = parse_weights("w 1 0.5\nw 2 0.25\n")
    assert model_enumerate(dag, wm) == Fraction(1, 8)


def test_comments_and_meta():
    text = "c a comment\n% another\nnnf 1 0 0\nc meta family product\nA 0\n"
    dag = parse_nnf(text)
    assert dag.meta == {"family": "product"}


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("A 0\n", "header"),
        ("nnf 1 0 0\nQ 1\n", "unknown node kind"),
        ("nnf 2 1 1\nL 1\nA 2 0 0 0\n", "child count"),
        ("nnf 2 1 1\nL 1\nA 1 5\n", "dangling"),
        ("nnf 2 1 1\nL 2\nA 1 0\n", "out of range"),
        ("nnf 1 0 1\nL x\n", "bad literal"),
        ("nnf 3 0 1\nL 1\n", "declares 3 nodes"),
        ("nnf 2 1 1\nL 1\nO 2 1 0\n", "decision variable"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(NnfParseError) as err:
        parse_nnf(text)
    assert fragment in str(err.value)


def test_error_messages_carry_line_numbers():
    with pytest.raises(NnfParseError) as err:
        parse_nnf("nnf 2 1 1\nL 1\nA 1 5\n")
    assert "line 3" in str(err.value)


def test_varset_examples():
    dag = parse_sexpr("(and 1 2)")
    assert dag.nodes[dag.root].varset == (1, 2)
    lit = parse_sexpr("3")
    assert lit.nodes[lit.root].varset == (3,)
    tau, _ = gen_tau(3)
    assert tau.root_node().varset == (1, 2, 3, 4)


def test_varsets_idempotent():
    dag = parse_sexpr("(or (and 1 2) (and -1 3))")
    first = [n.varset for n in dag.nodes]
    compute_varsets(dag)
    assert [n.varset for n in dag.nodes] == first


def test_validate_tau():
    dag, _ = gen_tau(4)
    rep = validate(dag)
    assert rep.decomposable and rep.decision_form and rep.smooth
    assert rep.notes == {}


def test_validate_violations():
    dup = parse_sexpr("(and 1 1)")
    rep = validate(dup)
    assert not rep.decomposable and "node" in rep.notes["decomposable"]

    uneven = parse_sexpr("(or (and 1 2) (and -1))")
    rep = validate(uneven)
    assert not rep.smooth

    not_decision = parse_sexpr("(or (and 1 2) (and 1 3))")
    rep = validate(not_decision)
    assert not rep.decision_form


def test_explicit_decision_var_is_checked():
    good = parse_nnf("nnf 3 2 1\nL 1\nL -1\nO 1 2 0 1\n")
    assert validate(good).decision_form
    # header says decision var 1 but branches decide nothing
    bad = parse_nnf("nnf 3 2 2\nL 2\nL 2\nO 1 2 0 1\n")
    assert not validate(bad).decision_form


def test_enumerate_tau2():
    dag, wm = gen_tau(2)
    assert model_enumerate(dag, wm) == Fraction(1, 10**18)


def test_enumerate_refuses_large_n():
    dag = parse_nnf("nnf 1 0 26\nA 0\n")
    with pytest.raises(EnumerationRefused):
        model_enumerate(dag, unit_weights())


def test_enumerate_counts_unmentioned_header_vars():
    # one literal, three declared variables: the two free ones double it
    dag = parse_nnf("nnf 1 0 3\nL 1\n")
    assert model_enumerate(dag, unit_weights()) == 4


def test_render_round_trip():
    dag, wm = gen_tau(3)
    text = render_nnf(dag)
    again = parse_nnf(text)
    assert render_nnf(again) == text
    assert model_enumerate(again, wm) == model_enumerate(dag, wm)
    assert again.meta == dag.meta


def test_sexpr_parse_errors():
    for bad in ("", "(and 1", "(xor 1 2)", "(and 0)", "1 2", "())"):
        with pytest.raises(NnfParseError):
            parse_sexpr(bad)


def test_sexpr_constants():
    assert model_enumerate(parse_sexpr("t"), unit_weights()) == 1
    assert model_enumerate(parse_sexpr("f"), unit_weights()) == 0
    assert model_enumerate(parse_sexpr("(or 1 (and -1 t))"), unit_weights()) == 2


def test_general_kary_disjunction_parses_and_evaluates():
    from surecount.evaluator import RationalDomain, error_bound, evaluate
    from surecount.weights import build_plan

    text = (
        "nnf 8 9 3\nL 1\nL 2\nL 3\nL -1\n"
        "A 2 0 1\nA 2 3 2\nA 2 0 2\nO 0 3 4 5 6\n"
    )
    dag = parse_nnf(text)
    rep = validate(dag)
    assert rep.decomposable and not rep.decision_form
    wm = parse_weights("w 1 0.5\nw 2 0.25\nw 3 0.125\n")
    plan = build_plan(wm, dag)
    res = evaluate(dag, plan, RationalDomain())
    assert res.value == Fraction(1, 4)
    assert error_bound(dag, plan) == 6
