import pytest
from hypothesis import given
from hypothesis import strategies as st

from cutmodulo.terms import (
    App,
    Atom,
    Exists,
    Forall,
    InvalidPosition,
    Var,
    alpha_equal,
    compose,
    free_vars,
    fresh_name,
    match_pattern,
    replace_at,
    size,
    subterm_at,
    substitute,
    term_positions,
    unify,
)
from strategies import VARS, props, substitutions, terms

x, y = Var("x"), Var("y")
a, b = App("a"), App("b")


def P(t):
    return Atom("P", (t,))


def test_substitution_avoids_capture():
    p = Forall("y", Atom("Q", (x, y)))
    q = substitute(p, {"x": y})
    assert q.var != "y"
    assert free_vars(q) == {"y"}
    assert alpha_equal(q, Forall("z", Atom("Q", (y, Var("z")))))


def test_substitution_leaves_bound_variable_alone():
    p = Exists("x", P(x))
    assert substitute(p, {"x": a}) == p


def test_alpha_equal_ignores_binder_names():
    assert alpha_equal(Forall("x", P(x)), Forall("y", P(y)))
    assert not alpha_equal(Forall("x", P(x)), Forall("y", P(x)))


def test_fresh_name_primes_until_unused():
    assert fresh_name("x", {"x", "x'"}) == "x''"
    # always differs from the base, even when the base itself is free
    assert fresh_name("x", set()) == "x'"


def test_match_is_one_sided():
    pat = App("f", (x, App("g", (y,))))
    subj = App("f", (a, App("g", (b,))))
    assert match_pattern(pat, subj) == {"x": a, "y": b}
    assert match_pattern(pat, App("f", (a, b))) is None
    # repeated variables must agree
    assert match_pattern(App("f", (x, x)), App("f", (a, b))) is None


def test_unify_occurs_check():
    assert unify(x, App("g", (x,))) is None
    s = unify(App("f", (x, b)), App("f", (a, y)))
    assert s == {"x": a, "y": b}


def test_positions_and_replacement():
    t = P(App("f", (a, App("g", (b,)))))
    assert subterm_at(t, (0, 1, 0)) == b
    assert replace_at(t, (0, 0), b) == P(App("f", (b, App("g", (b,)))))
    with pytest.raises(InvalidPosition):
        subterm_at(t, (0, 5))
    assert [pos for pos, _ in term_positions(t)] == [(0,), (0, 0), (0, 1), (0, 1, 0)]


@given(props())
def test_alpha_equal_is_reflexive(p):
    assert alpha_equal(p, p)


@given(props(), props(), props())
def test_alpha_equal_is_transitive(p, q, r):
    if alpha_equal(p, q) and alpha_equal(q, r):
        assert alpha_equal(p, r)
    assert alpha_equal(p, q) == alpha_equal(q, p)


@given(props(), st.sampled_from(VARS))
def test_renaming_a_binder_preserves_alpha_class(p, v):
    q = Forall(v, p)
    w = fresh_name(v, {n for n in VARS})
    renamed = Forall(w, substitute(p, {v: Var(w)}))
    assert alpha_equal(q, renamed)


@given(props(3), substitutions(), substitutions())
def test_substitution_composition(p, s1, s2):
    assert alpha_equal(substitute(substitute(p, s1), s2), substitute(p, compose(s1, s2)))


@given(terms(), terms())
def test_unifier_unifies(t, u):
    s = unify(t, u)
    if s is not None:
        assert substitute(t, s) == substitute(u, s)


@given(terms(), substitutions())
def test_match_finds_instances(t, s):
    inst = substitute(t, s)
    theta = match_pattern(t, inst)
    assert theta is not None
    assert substitute(t, theta) == inst


@given(props())
def test_size_is_positive(p):
    assert size(p) >= 1
