"""Random ground rewrite systems and random atomic proofs over them."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .atomic import SymProof, proof_from_conversion
from .kernel import Proof, Sequent
from .rewriting import ConversionSequence, RewriteRule, RewriteSystem, _fillers, neighbours
from .terms import App, Atom, Signature


@dataclass(frozen=True)
class GeneratorParams:
    constants: tuple = ("a", "b", "c", "d", "e")
    unary: str = "f"
    predicate: str = "P"
    min_rules: int = 2
    max_rules: int = 6
    max_depth: int = 2
    unary_weight: float = 0.25

    def __post_init__(self):
        if not self.constants:
            raise ValueError("at least one constant is required")
        if not 1 <= self.min_rules <= self.max_rules:
            raise ValueError("need 1 <= min_rules <= max_rules")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        if not 0.0 <= self.unary_weight <= 1.0:
            raise ValueError("unary_weight must lie in [0, 1]")


DEFAULT_PARAMS = GeneratorParams()


def generator_signature(params: GeneratorParams = DEFAULT_PARAMS) -> Signature:
    funs = {c: 0 for c in params.constants}
    funs[params.unary] = 1
    return Signature(funs, {params.predicate: 1})


def random_term(rng: random.Random, params: GeneratorParams = DEFAULT_PARAMS, depth: int | None = None):
    depth = params.max_depth if depth is None else depth
    if depth > 1 and rng.random() < params.unary_weight:
        return App(params.unary, (random_term(rng, params, depth - 1),))
    return App(rng.choice(params.constants))


def generate_random_system(seed: int, params: GeneratorParams = DEFAULT_PARAMS) -> RewriteSystem:
    """A ground system determined by ``seed``; rules are distinct and non-trivial."""
    rng = random.Random(seed)
    n = rng.randint(params.min_rules, params.max_rules)
    rules: list[RewriteRule] = []
    seen = set()
    attempts = 0
    while len(rules) < n and attempts < 100 * n:
        attempts += 1
        lhs, rhs = random_term(rng, params), random_term(rng, params)
        if lhs == rhs or (lhs, rhs) in seen:
            continue
        seen.add((lhs, rhs))
        rules.append(RewriteRule(lhs, rhs))
    return RewriteSystem(generator_signature(params), tuple(rules))


def constant_universe(R: RewriteSystem) -> list:
    """The constants of the signature together with every subterm of a rule."""
    return _fillers(R, [t for r in R.rules for t in (r.lhs, r.rhs)])


def random_conversion(R: RewriteSystem, rng: random.Random, start, length: int) -> ConversionSequence:
    """A random walk of at most ``length`` symmetric steps from ``start``."""
    fillers = _fillers(R, [start])
    objs, steps = [start], []
    for _ in range(length):
        options, _ = neighbours(R, objs[-1], fillers)
        if not options:
            break
        nxt, step = rng.choice(options)
        objs.append(nxt)
        steps.append(step)
    return ConversionSequence(tuple(objs), tuple(steps))


def random_atomic_proof(R: RewriteSystem, rng: random.Random, universe, length: int = 6,
                        pred: str = "P", extra: int = 1) -> Proof:
    """An asymmetric atomic proof built from a random conversion walk."""
    start = Atom(pred, (rng.choice(list(universe)),))
    c = random_conversion(R, rng, start, rng.randint(0, length))
    noise = [Atom(pred, (rng.choice(list(universe)),)) for _ in range(rng.randint(0, extra))]
    k = rng.randint(0, len(noise))
    s = Sequent((c.first,) + tuple(noise[:k]), tuple(noise[k:]) + (c.last,))
    return proof_from_conversion(R, s, c.first, c.last, c)


def random_sym_proof(R: RewriteSystem, rng: random.Random, universe, length: int = 6,
                     pred: str = "P", max_cuts: int = 4) -> SymProof:
    """A valid symmetric atomic proof with cuts, weakenings and contractions."""
    start = Atom(pred, (rng.choice(list(universe)),))
    c = random_conversion(R, rng, start, rng.randint(0, length))
    noise = [Atom(pred, (rng.choice(list(universe)),)) for _ in range(2)]
    budget = [rng.randint(1, max_cuts)]

    def build(gamma: tuple, delta: tuple, conv: ConversionSequence) -> SymProof:
        seq = Sequent(gamma, delta)
        roll = rng.random()
        if budget[0] > 0 and roll < 0.6:
            budget[0] -= 1
            n = len(conv.objects) - 1
            i = rng.randint(0, n)
            j = rng.randint(i, n)
            c1, c2 = conv.objects[i], conv.objects[j]
            left = build(gamma, (c1,) + delta, conv.slice(0, i))
            right = build(gamma + (c2,), delta, conv.slice(j, n))
            return SymProof("cut", seq, (left, right), (c1, c2), conv.slice(i, j))
        if roll < 0.7:
            side = rng.choice(("left", "right"))
            dup = conv.first if side == "left" else conv.last
            prem = build(gamma + (dup,), delta, conv) if side == "left" else build(gamma, delta + (dup,), conv)
            return SymProof(f"contr-{side}", seq, (prem,))
        return SymProof("axiom", seq, (), (conv.first, conv.last), conv)

    body = build((c.first,), (c.last,), c)
    # weaken the end-sequent by the noise atoms
    g, d = (c.first,), (c.last,)
    for i, w in enumerate(noise):
        if i % 2 == 0:
            g = g + (w,)
            body = SymProof("weak-left", Sequent(g, d), (body,))
        else:
            d = d + (w,)
            body = SymProof("weak-right", Sequent(g, d), (body,))
    return body
