import random

import pytest

from cutmodulo.atomic import check_sym_proof
from cutmodulo.generator import (
    GeneratorParams,
    constant_universe,
    generate_random_system,
    random_atomic_proof,
    random_conversion,
    random_sym_proof,
)
from cutmodulo.kernel import check_proof
from cutmodulo.rewriting import Budget, ReductCache
from cutmodulo.syntax import render_system
from cutmodulo.terms import App, Var


def test_seed_zero_is_pinned():
    R = generate_random_system(0)
    assert [f"{r.lhs} -> {r.rhs}" for r in R.rules] == [
        "d -> f(e)", "b -> c", "f(a) -> c", "c -> f(a)", "c -> a",
    ]


def test_deterministic_per_seed():
    assert render_system(generate_random_system(42)) == render_system(generate_random_system(42))


def test_shape_constraints():
    for seed in range(300):
        R = generate_random_system(seed)
        assert 2 <= len(R.rules) <= 6
        assert len({(r.lhs, r.rhs) for r in R.rules}) == len(R.rules)
        for r in R.rules:
            assert not isinstance(r.lhs, Var) and r.lhs != r.rhs
            for t in (r.lhs, r.rhs):
                assert t.head in "abcdef" and (t.head != "f" or isinstance(t.args[0], App) and not t.args[0].args)


def test_enough_systems_have_finite_closures():
    b = Budget(max_objects=500)
    complete = 0
    for seed in range(1000):
        R = generate_random_system(seed)
        cache = ReductCache(R, b)
        complete += all(cache(t).complete for t in constant_universe(R))
    assert complete >= 100


def test_params_validation():
    with pytest.raises(ValueError):
        GeneratorParams(min_rules=4, max_rules=2)
    with pytest.raises(ValueError):
        GeneratorParams(constants=())
    R = generate_random_system(3, GeneratorParams(min_rules=1, max_rules=1, max_depth=1))
    assert len(R.rules) == 1 and all(not r.lhs.args for r in R.rules)


def test_random_objects_are_valid():
    for seed in range(50):
        R = generate_random_system(seed)
        u = constant_universe(R)
        rng = random.Random(seed)
        c = random_conversion(R, rng, App("a"), 6)
        c.validate(R)
        assert check_proof(R, random_atomic_proof(R, rng, u)).valid
        assert check_sym_proof(R, random_sym_proof(R, rng, u)).valid
