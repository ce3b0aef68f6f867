from fractions import Fraction

import pytest

from surecount.evaluator import RationalDomain, evaluate
from surecount.generators import gen_random_ddnnf, gen_tau, gen_weights
from surecount.nnf import model_enumerate, parse_nnf, parse_sexpr
from surecount.weights import (
    Action,
    WeightParseError,
    build_plan,
    classify,
    parse_weights,
    render_weights,
)


def test_parse_complement_default():
    wm = parse_weights("w 1 0.25\n")
    assert wm.pair(1) == (Fraction(1, 4), Fraction(3, 4))


def test_parse_both_polarities():
    wm = parse_weights("w 2 1e9\nw -2 1e-9\n")
    assert wm.pair(2) == (Fraction(10**9), Fraction(1, 10**9))


def test_unmentioned_variables_are_unit():
    wm = parse_weights("")
    assert wm.pair(3) == (1, 1)
    dag = parse_sexpr("(or 1 (and -1 (or 2 (and -2 t))))", 3)
    assert model_enumerate(dag, wm) == 8  # plain model count doubled by the free var


def test_cnf_comment_form_and_ignored_lines():
    text = "p cnf 2 1\nc regular comment\nc p weight 1 0.25 0\nc p weight -1 0.75 0\n"
    wm = parse_weights(text)
    assert wm.pair(1) == (Fraction(1, 4), Fraction(3, 4))


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("w 1 0.25\nw 1 0.5\n", "duplicate"),
        ("w x 0.25\n", "bad literal"),
        ("w 1 zebra\n", "malformed"),
        ("v 1 0.25\n", "unrecognized"),
        ("w 1\n", "expected"),
        ("w 0 0.5\n", "literal 0"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(WeightParseError) as err:
        parse_weights(text)
    assert fragment in str(err.value)


def test_classify():
    assert classify(gen_weights("uniform+", 10, 1)) == "nonnegative"
    _, tau_w = gen_tau(2)
    assert classify(tau_w) == "mixed"
    assert classify(parse_weights("")) == "nonnegative"
    # complement defaulting can introduce the negative weight
    assert classify(parse_weights("w 1 2.0\n")) == "mixed"


def test_plan_actions():
    dag = parse_sexpr("(and 1 2 3)", 3)
    wm = parse_weights("w 1 3\nw -1 1\nw 2 1\nw -2 -1\nw 3 0.25\n")
    plan = build_plan(wm, dag)
    assert plan.actions[1] is Action.RESCALE
    assert plan.seeds[1] == Fraction(3, 4) and plan.seeds[-1] == Fraction(1, 4)
    assert plan.actions[2] is Action.SMOOTH_ZERO
    assert plan.sigma[2] == 0
    assert plan.actions[3] is Action.NONE
    assert plan.root_factors == [Fraction(4)]
    assert not plan.all_nonnegative and plan.any_rescaled


def test_rescaled_seeds_sum_to_one_exactly():
    dag = gen_random_ddnnf(8, 40, 3)
    wm = gen_weights("exponential+", 8, 9)
    plan = build_plan(wm, dag)
    for var, action in plan.actions.items():
        if action is Action.RESCALE:
            assert plan.seeds[var] + plan.seeds[-var] == 1


def test_nonnegative_classification_is_sound():
    for seed in range(10):
        wm = gen_weights("uniform+", 10, seed)
        dag = gen_random_ddnnf(10, 50, seed)
        plan = build_plan(wm, dag)
        assert plan.all_nonnegative
        assert all(v >= 0 for v in plan.seeds.values())
        assert all(f >= 0 for f in plan.root_factors)


@pytest.mark.parametrize("family", ["uniform+", "exponential+", "uniform+-", "limits+-"])
@pytest.mark.parametrize("seed", range(6))
def test_plan_neutrality(family, seed):
    dag = gen_random_ddnnf(9, 45, seed)
    wm = gen_weights(family, 9, seed + 100)
    exact = model_enumerate(dag, wm)
    got = evaluate(dag, build_plan(wm, dag), RationalDomain()).value
    assert got == exact


def test_file_only_variables_multiply_the_count():
    dag = parse_nnf("nnf 1 0 1\nL 1\n")
    wm = parse_weights("w 1 0.5\nw 5 3\nw -5 4\n")
    plan = build_plan(wm, dag)
    assert Fraction(7) in plan.root_factors
    got = evaluate(dag, plan, RationalDomain()).value
    assert got == model_enumerate(dag, wm) == Fraction(1, 2) * 7


def test_smooth_zero_free_variable_zeroes_the_count():
    dag = parse_nnf("nnf 1 0 2\nL 1\n")  # variable 2 never occurs
    wm = parse_weights("w 1 0.5\nw 2 1\nw -2 -1\n")
    plan = build_plan(wm, dag)
    got = evaluate(dag, plan, RationalDomain()).value
    assert got == model_enumerate(dag, wm) == 0


def test_render_round_trip():
    wm = gen_weights("limits+-", 6, 11)
    text = render_weights(wm)
    again = parse_weights(text)
    assert again.declared == wm.declared
    assert render_weights(again) == text


def test_render_decimal_forms():
    wm = parse_weights("w 1 0.25\nw -1 0.75\nw 2 1e9\nw -2 1/3\n")
    text = render_weights(wm)
    assert "w 1 0.25" in text
    assert "w 2 1000000000" in text
    assert "w -2 1/3" in text
