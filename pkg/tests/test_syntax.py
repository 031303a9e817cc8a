import random

import pytest
from hypothesis import given

from conftest import FIXTURES, load
from cutmodulo.generator import constant_universe, generate_random_system, random_atomic_proof
from cutmodulo.kernel import Sequent
from cutmodulo.syntax import (
    ParseError,
    ProblemFile,
    parse_problem,
    parse_prop,
    parse_rules,
    parse_sequent,
    parse_term,
    render,
    render_problem,
    show,
    show_sequent,
    tokenize,
)
from cutmodulo.terms import App, ArityError, Atom, Implies, Bottom, Var
from strategies import props

FIXTURE_NAMES = ["arith", "failure", "loop", "loop_e", "conj", "quant"]


def test_rule_with_prefix_syntax():
    R = parse_rules("sig 0/0, S/1, plus/2;\nplus(0,y) -> y")
    (rule,) = R.rules
    assert rule.lhs == App("plus", (App("0"), Var("y")))
    assert rule.rhs == Var("y")


def test_failure_system_parses_without_declarations():
    R = parse_rules("a -> b\na -> b'")
    assert [(str(r.lhs), str(r.rhs)) for r in R.rules] == [("a", "b"), ("a", "b'")]


def test_syntax_error_has_position():
    with pytest.raises(ParseError) as exc:
        parse_sequent("P(x |-")
    assert (exc.value.line, exc.value.column) == (1, 5)
    assert "line 1, column 5" in str(exc.value)


def test_arity_error():
    with pytest.raises((ArityError, ParseError)):
        parse_term("plus(0)", parse_rules("sig 0/0, plus/2;").signature)


def test_unbound_symbol_in_declared_signature():
    sig = parse_rules("sig 0/0, S/1; pred eq/2;").signature
    with pytest.raises(ParseError):
        parse_prop("Q(0)", sig)


def test_numerals_and_negation():
    sig = parse_rules("sig 0/0, S/1; pred eq/2;").signature
    assert parse_term("2", sig) == App("S", (App("S", (App("0"),)),))
    p = parse_prop("~eq(0, 0)", sig)
    assert p == Implies(Atom("eq", (App("0"), App("0"))), Bottom())


def test_empty_right_side_renders_compactly():
    assert show_sequent(Sequent((Atom("A", ()),), ())) == "A |-"
    assert show_sequent(Sequent((), ())) == "|-"


def test_comments_are_skipped():
    assert [t.text for t in tokenize("a % ignored\n-> b")][:3] == ["a", "->", "b"]


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_fixture_round_trip_is_byte_exact(name):
    text = (FIXTURES / f"{name}.prf").read_text(encoding="utf-8")
    assert render_problem(parse_problem(text)) == text


def test_failure_proof_rendering_shows_the_three_annotations():
    text = render(load("failure").proof)
    for ann in ("{P(b)}", "{P(b')}", "{P(a)}"):
        assert ann in text


def test_arithmetic_system_round_trip_token_stream():
    pf = load("arith")
    again = parse_problem(render(pf))
    assert [t.text for t in tokenize(render(again))] == [t.text for t in tokenize(render(pf))]


@given(props())
def test_proposition_round_trip(p):
    assert parse_prop(show(p)) == p or show(parse_prop(show(p))) == show(p)


def test_generated_objects_round_trip():
    rng = random.Random(7)
    count = 0
    for seed in range(250):
        R = generate_random_system(seed)
        u = constant_universe(R)
        for _ in range(4):
            p = random_atomic_proof(R, rng, u)
            pf = ProblemFile(R, p.conclusion, p)
            text = render_problem(pf)
            back = parse_problem(text)
            assert back.proof == p and back.system.rules == R.rules
            assert render_problem(back) == text
            count += 1
    assert count == 1000
