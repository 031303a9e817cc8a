import pytest

from conftest import load
from cutmodulo.kernel import Proof, Sequent, axiom, check_proof, is_cut_free, principal
from cutmodulo.syntax import parse_proof, parse_rules, show
from cutmodulo.terms import App, Atom
from strategies import ARITH

FIXTURES = ["arith", "failure", "loop", "loop_e", "conj", "quant"]


def proof(text, R=ARITH):
    return parse_proof(text, R.signature)


@pytest.mark.parametrize("name", FIXTURES)
def test_fixtures_check(name):
    pf = load(name)
    rep = check_proof(pf.system, pf.proof)
    assert rep.valid, rep.failures
    assert pf.proof.conclusion.same(pf.sequent)


def test_arithmetic_axiom_witness():
    pf = load("arith")
    rep = check_proof(pf.system, pf.proof)
    ds = rep.witnesses[(0, 0)]
    assert any(show(d.first) == "eq(times(2, 2), 4)" and show(d.last) == "eq(4, 4)" for d in ds)


def test_axiom_requires_common_reduct():
    R = parse_rules("a -> b\na -> b'")
    p = axiom(Atom("P", (App("b"),)), [Atom("P", (App("b"),))], [Atom("P", (App("b'"),))])
    rep = check_proof(R, p)
    assert not rep.valid and rep.failures[0].rule == "axiom"


def test_forall_left_replaces_the_quantified_formula():
    pf = load("arith")
    bad = proof("(forall-left {x; eq(x, x); 4} (forall x. eq(x, x) |- eq(times(2, 2), 4)) "
                "(axiom {eq(4, 4)} (forall x. eq(x, x), eq(4, 4) |- eq(times(2, 2), 4))))")
    assert not check_proof(pf.system, bad).valid


def test_eigenvariable_condition():
    R = parse_rules("sig a/0; pred P/1;")
    ok = proof("(forall-right {y; P(y)} (forall x. P(x) |- forall x. P(x)) "
               "(forall-left {x; P(x); y} (forall x. P(x) |- P(y)) (axiom {P(y)} (P(y) |- P(y)))))", R)
    assert check_proof(R, ok).valid
    bad = proof("(forall-right {y; P(y)} (P(y) |- forall x. P(x)) (axiom {P(y)} (P(y) |- P(y))))", R)
    rep = check_proof(R, bad)
    assert not rep.valid and any("eigen" in f.condition or "fresh" in f.explanation for f in rep.failures)


def test_connective_target_is_up_to_reduction():
    R = parse_rules("sig a/0; pred P/1, Q/0, D/0;\n")
    p = proof("(and-right {Q; Q} (|- Q /\\ Q) (weak-right (|- Q) (weak-right (|-))) (weak-right (|- Q) (weak-right (|-))))", R)
    rep = check_proof(R, p)
    assert not rep.valid


def test_cut_schema():
    pf = load("failure")
    p = pf.proof
    assert p.rule == "cut" and not is_cut_free(p)
    broken = Proof("cut", p.annotations, Sequent(p.conclusion.gamma, ()), p.premises)
    assert not check_proof(pf.system, broken).valid


def test_contraction_copies_are_reducts():
    R = parse_rules("a -> b\nc -> c'")
    P = lambda c: Atom("P", (App(c),))  # noqa: E731
    ok = Proof("contr-left", (P("a"), P("b"), P("a")), Sequent((P("a"),), (P("b"),)),
               (axiom(P("b"), [P("b"), P("a")], [P("b")]),))
    assert check_proof(R, ok).valid
    bad = Proof("contr-left", (P("a"), P("c"), P("a")), Sequent((P("a"),), (P("b"),)),
                (axiom(P("b"), [P("c"), P("a")], [P("b")]),))
    assert not check_proof(R, bad).valid


def test_principal_formula():
    pf = load("arith")
    assert show(principal(pf.proof)) == "exists x. eq(times(2, x), 4)"


def test_budget_exhaustion_is_reported_as_such():
    from cutmodulo.rewriting import Budget

    pf = load("arith")
    rep = check_proof(pf.system, pf.proof, Budget(max_objects=2))
    assert not rep.valid and rep.budget_exhausted
