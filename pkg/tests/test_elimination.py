import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import FIXTURES, load
from cutmodulo.analysis import NotTerminating
from cutmodulo.atomic import NonAtomicInput, cut_free_provable_atomic, Provable
from cutmodulo.elimination import (
    BudgetExhausted,
    Choice,
    CutFree,
    Failed,
    PreconditionViolation,
    ReducedToAxiom,
    RuleOrder,
    Scripted,
    ShortCircuit,
    SplitIntoTwoCuts,
    Stuck,
    eliminate_cuts_atomic_asym,
    instrument_measure,
    load_policy,
    newman_step,
    policy_json,
)
from cutmodulo.full import eliminate_cuts_full
from cutmodulo.generator import random_atomic_proof
from cutmodulo.kernel import Sequent, axiom, check_proof, cut, is_cut_free
from cutmodulo.rewriting import Budget
from cutmodulo.syntax import parse_rules, parse_sequent, show
from cutmodulo.terms import App, Atom
from strategies import ARITH, system_for, system_seeds


def P(c):
    return Atom("P", (App(c),))


def loop_policy(R):
    return load_policy(json.loads((FIXTURES / "loop_policy.json").read_text()), R.signature)


def test_failure_example_is_stuck():
    pf = load("failure")
    out = newman_step(pf.system, pf.proof)
    assert isinstance(out, Stuck) and out.cut_prop == P("a")
    assert [show(o) for o in out.divergence.objects] == ["P(b)", "P(a)", "P(b')"]
    assert [s.direction for s in out.divergence.steps] == ["backward", "forward"]
    assert set(out.left_reducts) == {P("b")} and set(out.right_reducts) == {P("b'")}


def test_loop_first_step_matches_displayed_tree():
    pf = load("loop")
    out = newman_step(pf.system, pf.proof, loop_policy(pf.system))
    assert isinstance(out, SplitIntoTwoCuts)
    root = out.proof
    assert root.rule == "cut" and root.annotations == (P("b"),)
    inner, right = root.premises
    assert inner.rule == "cut" and inner.annotations == (P("c"),)
    assert right.rule == "axiom" and right.annotations == (P("d"),)
    assert [q.annotations for q in inner.premises] == [(P("c"),), (P("c"),)]
    assert root.conclusion.same(pf.proof.conclusion)
    assert check_proof(pf.system, root).valid


def test_short_circuit_when_valley_passes_through_cut():
    R = parse_rules("pred P/1;\na -> b\na -> b'")
    s = Sequent((P("a"),), (P("b'"),))
    p = cut(P("a"), axiom(P("a"), [P("a")], [P("a"), P("b'")]),
            axiom(P("b'"), [P("a"), P("a")], [P("b'")]), s)
    assert check_proof(R, p).valid
    out = newman_step(R, p)
    assert isinstance(out, ReducedToAxiom) and out.reduct == P("b'")
    out = newman_step(R, p, choice=Choice("no-common"))
    assert isinstance(out, ShortCircuit) and out.side == "B=C" and out.reduct == P("b'")
    assert check_proof(R, out.proof).valid


def test_newman_step_preconditions():
    pf = load("failure")
    with pytest.raises(PreconditionViolation):
        newman_step(pf.system, pf.proof.premises[0])
    arith = load("arith")
    with pytest.raises(NonAtomicInput):
        eliminate_cuts_atomic_asym(arith.system, arith.proof)


def test_failure_elimination_fails():
    pf = load("failure")
    res = eliminate_cuts_atomic_asym(pf.system, pf.proof)
    assert isinstance(res, Failed) and res.stuck.cut_prop == P("a")


@pytest.mark.parametrize("name", ["loop", "loop_e"])
def test_scripted_policy_exhausts_budget(name):
    pf = load(name)
    res = eliminate_cuts_atomic_asym(pf.system, pf.proof, loop_policy(pf.system), step_budget=50)
    assert isinstance(res, BudgetExhausted) and len(res.trace) == 50
    splits = [e.cut_prop for e in res.trace if isinstance(e.outcome, SplitIntoTwoCuts)]
    assert splits[:6] == [P("a"), P("b")] * 3
    assert all(x != y for x, y in zip(splits, splits[1:]))
    for e in res.trace:
        assert e.proof_after.conclusion.same(pf.proof.conclusion)
        assert check_proof(pf.system, e.proof_after).valid


def test_cut_elimination_without_normalization():
    pf = load("loop_e")
    ans = cut_free_provable_atomic(pf.system, pf.sequent)
    assert isinstance(ans, Provable) and ans.proof.annotations == (P("e"),)
    res = eliminate_cuts_atomic_asym(pf.system, pf.proof, RuleOrder())
    assert isinstance(res, CutFree)


def test_policy_json_round_trip():
    R = load("loop").system
    pol = loop_policy(R)
    assert isinstance(pol, Scripted) and pol.cycle and len(pol.steps) == 3
    assert load_policy(policy_json(pol), R.signature) == pol
    assert load_policy({"kind": "rule-order"}) == RuleOrder()
    with pytest.raises(ValueError):
        load_policy({"kind": "random"})
    assert pol.choice(4) == pol.steps[1]


def test_arithmetic_elimination_and_measure():
    s = parse_sequent("eq(times(2, 2), 4) |- eq(plus(2, 2), plus(0, 4))", ARITH.signature)
    from cutmodulo.rewriting import convertible
    from cutmodulo.atomic import proof_from_conversion

    a, b = s.gamma[0], s.delta[0]
    c = convertible(ARITH, a, b)
    c = c + c.reversed() + c
    p = proof_from_conversion(ARITH, s, a, b, c)
    res = eliminate_cuts_atomic_asym(ARITH, p)
    assert isinstance(res, CutFree) and check_proof(ARITH, res.proof).valid
    m = instrument_measure(ARITH, res.trace)
    assert m.decreasing


def test_measure_empty_trace_and_loop():
    assert instrument_measure(ARITH, []).decreasing
    pf = load("loop")
    res = eliminate_cuts_atomic_asym(pf.system, pf.proof, loop_policy(pf.system), step_budget=5)
    with pytest.raises(NotTerminating):
        instrument_measure(pf.system, res.trace)


@given(system_seeds, st.integers(0, 10_000))
def test_end_sequent_preserved_and_full_engine_agrees(seed, r):
    R, u = system_for(seed)
    p = random_atomic_proof(R, random.Random(r), u)
    b = Budget(max_objects=500)
    res = eliminate_cuts_atomic_asym(R, p, step_budget=100, budget=b)
    for e in res.trace:
        if e.proof_after is not None:
            assert e.proof_after.conclusion.same(p.conclusion)
            assert check_proof(R, e.proof_after, b).valid
    if isinstance(res, CutFree):
        assert is_cut_free(res.proof)
    full = eliminate_cuts_full(R, p, step_budget=100, budget=b)
    assert full.status == res.status
    assert full.proof == res.proof
    assert [e.cut_prop for e in full.trace] == [e.cut_prop for e in res.trace]
