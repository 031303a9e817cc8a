import pytest
from hypothesis import given

from cutmodulo.analysis import (
    EmpiricalOrdering,
    NotTerminating,
    confluent,
    critical_pairs,
    default_universe,
    ground_terms,
    locally_confluent,
    multiset_greater,
    terminating,
)
from cutmodulo.rewriting import Budget, joinable
from cutmodulo.syntax import parse_rules
from cutmodulo.terms import App, size
from strategies import ARITH, num, system_for, system_seeds

FAIL = parse_rules("a -> b\na -> b'")
LOOP = parse_rules("a -> b\na -> c\nb -> a\nb -> d")
LOOP_E = parse_rules("a -> b\na -> c\nb -> a\nb -> d\nc -> e\nd -> e")
CONSTANTS = [App(c) for c in "abcde"]


def strs(*objs):
    return tuple(str(o) for o in objs)


def test_failure_system_critical_pair():
    (cp,) = critical_pairs(FAIL)
    assert {str(cp.left), str(cp.right)} == {"b", "b'"}
    v = locally_confluent(FAIL)
    assert v.status == "fails"


def test_loop_is_locally_confluent_but_not_terminating():
    assert locally_confluent(LOOP).status == "holds"
    t = terminating(LOOP, CONSTANTS[:4])
    assert t.status == "fails"
    assert strs(*t.witness["cycle"].objects) == ("a", "b", "a")
    t.witness["cycle"].validate(LOOP)


def test_loop_confluence_witness():
    v = confluent(LOOP, CONSTANTS[:4])
    assert v.status == "fails"
    assert strs(v.witness["seed"], v.witness["left"], v.witness["right"]) == ("a", "c", "d")


def test_failure_confluence_witness():
    v = confluent(FAIL, [App("a"), App("b"), App("b'")])
    assert strs(v.witness["seed"], v.witness["left"], v.witness["right"]) == ("a", "b", "b'")


def test_loop_with_e_is_confluent_on_constants():
    assert confluent(LOOP_E, CONSTANTS).status == "holds"


def test_arithmetic_terminates_and_is_confluent():
    u = default_universe(ARITH, 3)
    assert terminating(ARITH, u).status == "holds"
    assert confluent(ARITH, u).status == "holds"
    assert locally_confluent(ARITH).status == "holds"


def test_deep_derivation_is_unknown_not_refuted():
    R = parse_rules("a -> f(a)")
    assert terminating(R, [App("a")], Budget(max_depth=10)).status != "holds"
    v = terminating(parse_rules("sig f/1, a/0;\nf(f(a)) -> a"), [App("a")])
    assert v.status == "holds"


def test_ground_terms_by_depth():
    sig = parse_rules("sig a/0, f/1;").signature
    assert strs(*ground_terms(sig, 2)) == ("a", "f(a)")


def test_empirical_ordering():
    o = EmpiricalOrdering(ARITH, [App("times", (num(2), num(2)))])
    assert o.greater(App("times", (num(2), num(2))), num(4))
    assert not o.greater(num(4), App("times", (num(2), num(2))))
    with pytest.raises(NotTerminating):
        EmpiricalOrdering(LOOP, [App("a")])


def test_multiset_extension():
    n = [num(i) for i in range(4)]
    gt = lambda x, y: size(x) > size(y)  # noqa: E731
    assert multiset_greater([n[3]], [n[2], n[2], n[1]], gt)
    assert not multiset_greater([n[2], n[2], n[1]], [n[3]], gt)
    assert not multiset_greater([n[1], n[1]], [n[1], n[1]], gt)
    assert multiset_greater([n[1], n[1]], [n[1]], gt)


@given(system_seeds)
def test_newman_corollary_on_random_systems(seed):
    R, u = system_for(seed)
    b = Budget(max_objects=500)
    if locally_confluent(R, b).status == "holds" and terminating(R, u, b).status == "holds":
        assert confluent(R, u, b).status == "holds"


@given(system_seeds)
def test_confluence_means_convertible_pairs_join(seed):
    R, u = system_for(seed)
    b = Budget(max_objects=500)
    if confluent(R, u, b).status == "holds":
        from cutmodulo.suites import convertible_pairs
        from cutmodulo.rewriting import ReductCache

        cache = ReductCache(R, b)
        for t, v in convertible_pairs(R, u, cache):
            assert joinable(R, t, v, b, cache) is not None


@given(system_seeds)
def test_fails_witnesses_are_replayable(seed):
    R, u = system_for(seed)
    b = Budget(max_objects=500)
    v = confluent(R, u, b)
    if v.status == "fails":
        w = v.witness
        (w["left_derivation"].reversed() + w["right_derivation"]).validate(R)
        assert joinable(R, w["left"], w["right"], b) is None
    t = terminating(R, u, b)
    if t.status == "fails":
        c = t.witness["cycle"]
        c.validate(R)
        assert c.first == c.last and len(c.steps) > 0
