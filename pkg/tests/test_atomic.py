import random

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from cutmodulo.analysis import confluent
from cutmodulo.atomic import (
    NonAtomicInput,
    NotProvable,
    Provable,
    SymProof,
    check_sym_proof,
    cut_free_provable_atomic,
    cut_redundancy_vs_confluence,
    iter_symmetric_reduction,
    proof_from_conversion,
    provable_atomic_asym,
    provable_atomic_sym,
    reduce_symmetric_atomic,
    sequent_pair,
    sym_cut_count,
    sym_from_asym,
    sym_is_cut_free,
)
from cutmodulo.generator import random_conversion, random_sym_proof
from cutmodulo.kernel import Sequent, check_proof, cut_propositions, is_cut_free
from cutmodulo.rewriting import Budget, InvalidSequence, ReductCache, convertible, find_peaks, joinable
from cutmodulo.syntax import parse_rules, parse_sequent, show
from cutmodulo.terms import App, Atom
from strategies import ARITH, num, system_for, system_seeds

FAIL = parse_rules("pred P/1;\na -> b\na -> b'")
LOOP = parse_rules("pred P/1;\na -> b\na -> c\nb -> a\nb -> d")
LOOP_E = parse_rules("pred P/1;\na -> b\na -> c\nb -> a\nb -> d\nc -> e\nd -> e")


def P(c):
    return Atom("P", (App(c),))


def seq(R, text):
    return parse_sequent(text, R.signature)


# -- provability examples ------------------------------------------------------


def test_sym_failure_example_provable():
    ans = provable_atomic_sym(FAIL, seq(FAIL, "P(b) |- P(b')"))
    assert isinstance(ans, Provable) and check_sym_proof(FAIL, ans.proof).valid


def test_sym_distinct_predicates_not_provable():
    R = parse_rules("sig b/0; pred P/1, Q/1;")
    ans = provable_atomic_sym(R, seq(R, "P(b) |- Q(b)"))
    assert isinstance(ans, NotProvable) and ans.certificate["complete"]


def test_sym_reflexivity():
    ans = provable_atomic_sym(FAIL, Sequent((P("c"), P("a")), (P("a"), P("d"))))
    assert isinstance(ans, Provable)


def test_non_atomic_input_rejected():
    with pytest.raises(NonAtomicInput):
        provable_atomic_asym(ARITH, parse_sequent("|- forall x. eq(x, x)", ARITH.signature))


def test_asym_failure_example_one_cut_on_a():
    ans = provable_atomic_asym(FAIL, seq(FAIL, "P(b) |- P(b')"))
    p = ans.proof
    assert p.rule == "cut" and cut_propositions(p) == [P("a")]
    assert [q.annotations[0] for q in p.premises] == [P("b"), P("b'")]
    assert check_proof(FAIL, p).valid


def test_asym_arithmetic_is_cut_free():
    ans = provable_atomic_asym(ARITH, seq(ARITH, "eq(4, 4) |- eq(times(2, 2), 4)"))
    assert isinstance(ans, Provable) and is_cut_free(ans.proof)
    assert check_proof(ARITH, ans.proof).valid


def test_asym_fresh_constants_not_provable():
    R = parse_rules("sig c0/0, d0/0; pred P/1;")
    assert isinstance(provable_atomic_asym(R, seq(R, "P(c0) |- P(d0)")), NotProvable)


def test_proof_from_valley():
    c = convertible(FAIL, P("a"), P("b"))
    p = proof_from_conversion(FAIL, Sequent((P("a"),), (P("b"),)), P("a"), P("b"), c)
    assert p.rule == "axiom" and p.annotations == (P("b"),)


def test_proof_from_loop_peak():
    objs = (P("c"), P("a"), P("b"), P("d"))
    from cutmodulo.rewriting import SeqStep

    steps = (SeqStep("backward", 1, (0,)), SeqStep("forward", 0, (0,)), SeqStep("forward", 3, (0,)))
    from cutmodulo.rewriting import ConversionSequence

    c = ConversionSequence(objs, steps)
    p = proof_from_conversion(LOOP, Sequent((P("c"),), (P("d"),)), P("c"), P("d"), c)
    assert p.rule == "cut" and p.annotations == (P("a"),)
    assert [q.rule for q in p.premises] == ["axiom", "axiom"]
    assert [q.annotations[0] for q in p.premises] == [P("c"), P("d")]
    assert check_proof(LOOP, p).valid
    with pytest.raises(InvalidSequence):
        proof_from_conversion(LOOP, Sequent((P("d"),), (P("c"),)), P("d"), P("c"), c)


def test_cut_free_examples():
    assert isinstance(cut_free_provable_atomic(FAIL, seq(FAIL, "P(b) |- P(b')")), NotProvable)
    ans = cut_free_provable_atomic(LOOP_E, seq(LOOP_E, "P(c) |- P(d)"))
    assert isinstance(ans, Provable) and ans.proof.annotations == (P("e"),)
    ans = cut_free_provable_atomic(ARITH, seq(ARITH, "eq(4, 4) |- eq(times(2, 2), 4)"))
    assert show(ans.proof.annotations[0]) == "eq(4, 4)"


# -- cut redundancy versus confluence -----------------------------------------


def test_equivalence_failure_system():
    rep = cut_redundancy_vs_confluence(FAIL, [App("a"), App("b"), App("b'")])
    assert rep.cut_redundant is False and rep.confluent is False and rep.agree
    assert {show(rep.witness["left"]), show(rep.witness["right"])} == {"b", "b'"}
    assert check_proof(FAIL, rep.witness["proof_with_cuts"]).valid


def test_equivalence_arithmetic_numerals():
    u = [num(i) for i in range(9)] + [App("plus", (num(2), num(3))), App("times", (num(2), num(2)))]
    rep = cut_redundancy_vs_confluence(ARITH, u)
    assert rep.cut_redundant is True and rep.confluent is True


def test_equivalence_loop_system():
    rep = cut_redundancy_vs_confluence(LOOP, [App(c) for c in "abcd"])
    assert rep.cut_redundant is False and rep.confluent is False
    assert {show(rep.witness["left"]), show(rep.witness["right"])} == {"c", "d"}


# -- symmetric reduction ------------------------------------------------------


def test_sym_single_cut_reduces_to_axiom():
    ans = provable_atomic_asym(FAIL, seq(FAIL, "P(b) |- P(b')"))
    sym = sym_from_asym(FAIL, ans.proof)
    assert check_sym_proof(FAIL, sym).valid and sym_cut_count(sym) == 1
    out = reduce_symmetric_atomic(sym)
    assert out.rule == "axiom" and out.pair == (P("b"), P("b'"))
    assert check_sym_proof(FAIL, out).valid


def test_sym_cut_free_unchanged():
    p = provable_atomic_sym(FAIL, seq(FAIL, "P(b) |- P(b')")).proof
    assert reduce_symmetric_atomic(p) == p


def test_sym_two_stacked_cuts():
    conv = convertible(LOOP, P("c"), P("d"))
    c = conv + conv.reversed() + conv
    p = proof_from_conversion(LOOP, Sequent((P("c"),), (P("d"),)), P("c"), P("d"), c)
    sym = sym_from_asym(LOOP, p)
    assert sym_cut_count(sym) == len(find_peaks(c)) >= 2
    steps = list(iter_symmetric_reduction(sym))
    assert len(steps) == sym_cut_count(sym) and steps[-1].rule == "axiom"


@given(system_seeds, st.integers(0, 10_000))
def test_sym_step_count_property(seed, r):
    R, u = system_for(seed)
    p = random_sym_proof(R, random.Random(r), u)
    assert check_sym_proof(R, p).valid
    steps = list(iter_symmetric_reduction(p))
    final = steps[-1] if steps else p
    assert len(steps) == sym_cut_count(p)
    assert sym_is_cut_free(final) and final.conclusion.same(p.conclusion)
    assert check_sym_proof(R, final).valid


# -- properties ---------------------------------------------------------------


@given(system_seeds, st.integers(0, 10_000))
def test_cut_count_equals_peak_count(seed, r):
    R, u = system_for(seed)
    rng = random.Random(r)
    c = random_conversion(R, rng, Atom("P", (rng.choice(u),)), rng.randint(0, 8))
    s = Sequent((c.first,), (c.last,))
    p = proof_from_conversion(R, s, c.first, c.last, c)
    assert len(cut_propositions(p)) == len(find_peaks(c))
    assert check_proof(R, p).valid


@settings(max_examples=40)
@given(system_seeds, st.integers(0, 10_000))
def test_provability_matches_convertibility_and_joinability(seed, r):
    R, u = system_for(seed)
    rng = random.Random(r)
    t, v = rng.choice(u), rng.choice(u)
    s = sequent_pair(t, v)
    conv = convertible(R, s.gamma[0], s.delta[0])
    for prove in (provable_atomic_sym, provable_atomic_asym):
        ans = prove(R, s)
        assert isinstance(ans, Provable) == (conv is not None)
        if isinstance(ans, Provable):
            chk = check_sym_proof(R, ans.proof) if isinstance(ans.proof, SymProof) else check_proof(R, ans.proof)
            assert chk.valid
    ans = cut_free_provable_atomic(R, s)
    j = joinable(R, s.gamma[0], s.delta[0])
    if isinstance(ans, Provable):
        assert j is not None and is_cut_free(ans.proof) and check_proof(R, ans.proof).valid
    elif isinstance(ans, NotProvable):
        assert j is None


@settings(max_examples=40)
@given(system_seeds)
def test_cut_redundancy_agrees_with_confluence(seed):
    R, u = system_for(seed)
    b = Budget(max_objects=500)
    cache = ReductCache(R, b)
    assume(all(cache(t).complete for t in u))
    rep = cut_redundancy_vs_confluence(R, u, b)
    assert rep.complete and rep.agree
    assert rep.confluent == (confluent(R, u, b).status == "holds")
