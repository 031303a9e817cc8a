import pytest
from hypothesis import given
from hypothesis import strategies as st

from cutmodulo.rewriting import (
    Budget,
    ConversionSequence,
    InvalidSequence,
    ReductCache,
    RuleError,
    RewriteRule,
    SeqStep,
    common_reducts,
    conversion_class,
    convertible,
    find_peaks,
    is_valley,
    joinable,
    one_step_reducts,
    reducts,
    reduces_to,
    valley_bottom,
)
from cutmodulo.syntax import parse_rules, parse_term
from cutmodulo.terms import App, Var
from strategies import ARITH, num, system_for, system_seeds

FAIL = parse_rules("a -> b\na -> b'")
LOOP = parse_rules("a -> b\na -> c\nb -> a\nb -> d")


def names(rs):
    return {str(o) for o in rs.elements}


def test_rule_lhs_must_not_be_a_variable():
    with pytest.raises(RuleError):
        RewriteRule(Var("x"), App("a"))


def test_rhs_variables_must_occur_on_the_left():
    with pytest.raises(RuleError):
        RewriteRule(App("a"), Var("x"))


def test_one_step_reducts_failure_system():
    assert {str(s.result) for s in one_step_reducts(FAIL, App("a"))} == {"b", "b'"}


def test_arithmetic_one_step_is_unique():
    t = App("times", (num(2), num(2)))
    steps = one_step_reducts(ARITH, t)
    assert [s.result for s in steps] == [App("plus", (App("times", (num(1), num(2))), num(2)))]


def test_zero_is_normal():
    assert one_step_reducts(ARITH, App("0")) == []


def test_reduct_closures():
    rs = reducts(FAIL, App("a"))
    assert names(rs) == {"a", "b", "b'"} and rs.complete
    rs = reducts(LOOP, App("a"))
    assert names(rs) == {"a", "b", "c", "d"} and rs.complete
    assert num(4) in reducts(ARITH, App("times", (num(2), num(2))))


def test_truncated_closure_is_flagged():
    R = parse_rules("a -> f(a)")
    rs = reducts(R, App("a"), Budget(max_objects=20))
    assert not rs.complete


def test_derivation_replays():
    d, exact = reduces_to(ARITH, App("times", (num(2), num(2))), num(4))
    assert exact and d.first == App("times", (num(2), num(2))) and d.last == num(4)
    d.validate(ARITH)


def test_invalid_sequence_is_rejected():
    bad = ConversionSequence((App("b"), App("a")), (SeqStep("forward", 0, ()),))
    with pytest.raises(InvalidSequence):
        bad.validate(FAIL)


def test_joinability():
    assert joinable(FAIL, App("b"), App("b'")) is None
    j = joinable(LOOP, App("a"), App("b"))
    assert j is not None
    j.valley().validate(LOOP)
    assert joinable(LOOP, App("c"), App("d")) is None


def test_convertible_through_a_peak():
    c = convertible(FAIL, App("b"), App("b'"))
    assert [str(o) for o in c.objects] == ["b", "a", "b'"]
    assert find_peaks(c) == [1]
    assert not is_valley(c)
    c.validate(FAIL)


def test_valley_bottom():
    c = convertible(ARITH, parse_term("plus(0, 0)", ARITH.signature), parse_term("times(0, 0)", ARITH.signature))
    assert is_valley(c)
    assert valley_bottom(c) == App("0")


def test_conversion_class_of_loop():
    cls = conversion_class(LOOP, App("c"))
    assert cls.complete
    assert {str(o) for o in cls.elements} == {"a", "b", "c", "d"}


@given(system_seeds, st.data())
def test_closure_is_closed_under_one_step(seed, data):
    R, u = system_for(seed)
    t = data.draw(st.sampled_from(u))
    rs = reducts(R, t, Budget(max_objects=500))
    if rs.complete:
        for o in rs.elements:
            for s in one_step_reducts(R, o):
                assert s.result in rs
            rs.derivation_to(o).validate(R)


@given(system_seeds, st.data())
def test_joins_are_valid_valleys(seed, data):
    R, u = system_for(seed)
    t1, t2 = data.draw(st.sampled_from(u)), data.draw(st.sampled_from(u))
    cache = ReductCache(R, Budget(max_objects=500))
    j = joinable(R, t1, t2, cache=cache)
    if j is not None:
        v = j.valley()
        v.validate(R)
        assert is_valley(v)
        assert common_reducts(cache(t1), cache(t2))[0] == j.reduct


@given(system_seeds, st.data())
def test_conversions_validate_and_reverse(seed, data):
    R, u = system_for(seed)
    t1, t2 = data.draw(st.sampled_from(u)), data.draw(st.sampled_from(u))
    c = convertible(R, t1, t2, Budget(max_objects=500))
    if c is not None:
        c.validate(R)
        c.reversed().validate(R)
        assert c.first == t1 and c.last == t2
