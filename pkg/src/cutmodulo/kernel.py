"""Proof trees of the asymmetric sequent calculus modulo, and their checker.

Contexts are multisets compared up to alpha-equivalence; the tuple order
of a sequent only matters for printing.  Every side condition of the form
``X ->* Y`` is discharged by a bounded search that records the derivation
it found.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .rewriting import DEFAULT_BUDGET, Budget, ConversionSequence, ReductCache, RewriteSystem, key_of
from .terms import (
    And,
    Bottom,
    Exists,
    Forall,
    Implies,
    Or,
    Prop,
    Term,
    alpha_equal,
    free_vars,
    is_atomic,
    substitute,
)


@dataclass(frozen=True)
class Sequent:
    gamma: tuple = ()
    delta: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "gamma", tuple(self.gamma))
        object.__setattr__(self, "delta", tuple(self.delta))

    def same(self, other: Sequent) -> bool:
        return msame(self.gamma, other.gamma) and msame(self.delta, other.delta)

    def free_vars(self) -> set[str]:
        out: set[str] = set()
        for p in self.gamma + self.delta:
            out |= free_vars(p)
        return out

    def props(self) -> tuple:
        return self.gamma + self.delta

    def __str__(self):
        from .syntax import show

        return show(self)


# rule tag -> (premise count, annotation kinds: P proposition, V variable name, T term)
RULES = {
    "axiom": (0, "P"),
    "cut": (2, "P"),
    "contr-left": (1, "PPP"),
    "contr-right": (1, "PPP"),
    "weak-left": (1, ""),
    "weak-right": (1, ""),
    "imp-left": (2, "PP"),
    "imp-right": (1, "PP"),
    "and-left": (1, "PP"),
    "and-right": (2, "PP"),
    "or-left": (2, "PP"),
    "or-right": (1, "PP"),
    "bot-left": (0, ""),
    "forall-left": (1, "VPT"),
    "forall-right": (1, "VP"),
    "exists-left": (1, "VP"),
    "exists-right": (1, "VPT"),
}

SIDE = {
    "contr-left": "L", "contr-right": "R", "weak-left": "L", "weak-right": "R",
    "imp-left": "L", "imp-right": "R", "and-left": "L", "and-right": "R",
    "or-left": "L", "or-right": "R", "forall-left": "L", "forall-right": "R",
    "exists-left": "L", "exists-right": "R", "bot-left": "L",
}

EIGEN_RULES = ("forall-right", "exists-left")


@dataclass(frozen=True)
class Proof:
    rule: str
    annotations: tuple
    conclusion: Sequent
    premises: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "annotations", tuple(self.annotations))
        object.__setattr__(self, "premises", tuple(self.premises))

    def __str__(self):
        from .syntax import show

        return show(self)


def axiom(a: Prop, gamma: Sequence, delta: Sequence) -> Proof:
    return Proof("axiom", (a,), Sequent(gamma, delta))


def cut(c: Prop, left: Proof, right: Proof, conclusion: Sequent) -> Proof:
    return Proof("cut", (c,), conclusion, (left, right))


# -- multisets ---------------------------------------------------------------


def mcount(props: Sequence) -> Counter:
    return Counter(key_of(p) for p in props)


def msame(a: Sequence, b: Sequence) -> bool:
    return mcount(a) == mcount(b)


def mremove(props: Sequence, remove: Sequence) -> tuple[list, list]:
    """``props`` minus ``remove``, and the members of ``remove`` not found."""
    rest = list(props)
    missing = []
    for r in remove:
        k = key_of(r)
        for i, p in enumerate(rest):
            if key_of(p) == k:
                del rest[i]
                break
        else:
            missing.append(r)
    return rest, missing


# -- rule schemata ---------------------------------------------------------------


def connective_target(p: Proof):
    """The shape the principal formula of a logical rule must reduce to."""
    a = p.annotations
    if p.rule in ("imp-left", "imp-right"):
        return Implies(a[0], a[1])
    if p.rule in ("and-left", "and-right"):
        return And(a[0], a[1])
    if p.rule in ("or-left", "or-right"):
        return Or(a[0], a[1])
    if p.rule in ("forall-left", "forall-right"):
        return Forall(a[0], a[1])
    if p.rule in ("exists-left", "exists-right"):
        return Exists(a[0], a[1])
    return None


def instance(x: str, body: Prop, t: Term) -> Prop:
    return substitute(body, {x: t})


def premise_additions(p: Proof) -> list[tuple[list, list]]:
    """Active formulas each premise adds to the shared context: (left, right)."""
    a = p.annotations
    r = p.rule
    if r in ("contr-left",):
        return [([a[1], a[2]], [])]
    if r == "contr-right":
        return [([], [a[1], a[2]])]
    if r in ("weak-left", "weak-right"):
        return [([], [])]
    if r == "imp-left":
        return [([], [a[0]]), ([a[1]], [])]
    if r == "imp-right":
        return [([a[0]], [a[1]])]
    if r == "and-left":
        return [([a[0], a[1]], [])]
    if r == "and-right":
        return [([], [a[0]]), ([], [a[1]])]
    if r == "or-left":
        return [([a[0]], []), ([a[1]], [])]
    if r == "or-right":
        return [([], [a[0], a[1]])]
    if r == "forall-left":
        return [([instance(a[0], a[1], a[2])], [])]
    if r == "exists-right":
        return [([], [instance(a[0], a[1], a[2])])]
    if r == "forall-right":
        return [([], [a[1]])]
    if r == "exists-left":
        return [([a[1]], [])]
    raise ValueError(f"no premise schema for {r}")


def principal(p: Proof):
    """The principal formula of a one-sided rule, found by multiset difference."""
    if p.rule in ("axiom", "cut", "bot-left"):
        return None
    prem = p.premises[0]
    adds_l, adds_r = premise_additions(p)[0]
    gl, _ = mremove(prem.conclusion.gamma, adds_l)
    dl, _ = mremove(prem.conclusion.delta, adds_r)
    if SIDE[p.rule] == "L":
        extra, _ = mremove(p.conclusion.gamma, gl)
    else:
        extra, _ = mremove(p.conclusion.delta, dl)
    return extra[0] if extra else None


# -- traversal -------------------------------------------------------------------


def nodes(p: Proof, path: tuple = ()) -> Iterator[tuple[tuple, Proof]]:
    stack = [(path, p)]
    while stack:
        path, node = stack.pop()
        yield path, node
        for i in range(len(node.premises) - 1, -1, -1):
            stack.append((path + (i,), node.premises[i]))


def subproof(p: Proof, path: Sequence[int]) -> Proof:
    for i in path:
        p = p.premises[i]
    return p


def replace_subproof(p: Proof, path: Sequence[int], new: Proof) -> Proof:
    if not path:
        return new
    i = path[0]
    prem = list(p.premises)
    prem[i] = replace_subproof(prem[i], path[1:], new)
    return Proof(p.rule, p.annotations, p.conclusion, tuple(prem))


def is_cut_free(p: Proof) -> bool:
    return all(n.rule != "cut" for _, n in nodes(p))


def cut_propositions(p: Proof) -> list:
    """Cut annotations in pre-order; as a multiset, use ``mcount``."""
    return [n.annotations[0] for _, n in nodes(p) if n.rule == "cut"]


def height(p: Proof) -> int:
    return 1 + max((height(q) for q in p.premises), default=0)


def proof_size(p: Proof) -> int:
    return sum(1 for _ in nodes(p))


def all_atomic(p: Proof) -> bool:
    return all(is_atomic(q) for _, n in nodes(p) for q in n.conclusion.props())


# -- checker -----------------------------------------------------------------


@dataclass(frozen=True)
class Failure:
    path: tuple
    rule: str
    condition: str
    explanation: str
    kind: str = "violated"  # "violated" | "budget-exhausted" | "schema"


@dataclass
class CheckReport:
    failures: list = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return not self.failures

    @property
    def budget_exhausted(self) -> bool:
        return bool(self.failures) and all(f.kind == "budget-exhausted" for f in self.failures)


class _Checker:
    def __init__(self, R: RewriteSystem, budget: Budget):
        self.R = R
        self.cache = ReductCache(R, budget)
        self.report = CheckReport()

    def fail(self, path, node, condition, explanation, kind="violated"):
        self.report.failures.append(Failure(path, node.rule, condition, explanation, kind))

    def reduces(self, src, dst) -> tuple[ConversionSequence | None, bool]:
        rs = self.cache(src)
        if dst in rs:
            return rs.derivation_to(dst), True
        return None, rs.complete

    def require(self, path, node, src, dst, condition) -> bool:
        d, complete = self.reduces(src, dst)
        if d is not None:
            self.report.witnesses.setdefault(path, []).append(d)
            return True
        kind = "violated" if complete else "budget-exhausted"
        self.fail(path, node, condition, f"no derivation {src} ->* {dst}", kind)
        return False

    def check(self, p: Proof) -> CheckReport:
        for path, node in nodes(p):
            self.node(path, node)
        return self.report

    def node(self, path, node: Proof):
        spec = RULES.get(node.rule)
        if spec is None:
            self.fail(path, node, "schema", f"unknown rule {node.rule}", "schema")
            return
        arity, kinds = spec
        if len(node.premises) != arity:
            self.fail(path, node, "schema", f"{node.rule} takes {arity} premises, got {len(node.premises)}", "schema")
            return
        if len(node.annotations) != len(kinds) or not all(_kind_ok(k, a) for k, a in zip(kinds, node.annotations)):
            self.fail(path, node, "schema", f"{node.rule} expects annotations of kinds {kinds!r}", "schema")
            return
        if node.rule == "axiom":
            self.axiom(path, node)
        elif node.rule == "cut":
            self.cut(path, node)
        elif node.rule == "bot-left":
            self.bot_left(path, node)
        else:
            self.one_sided(path, node)

    def axiom(self, path, node):
        target = node.annotations[0]
        seq = node.conclusion
        incomplete = False
        for a1 in seq.gamma:
            d1, c1 = self.reduces(a1, target)
            incomplete |= not c1
            if d1 is None:
                continue
            for a2 in seq.delta:
                d2, c2 = self.reduces(a2, target)
                incomplete |= not c2
                if d2 is not None:
                    self.report.witnesses[path] = [d1, d2]
                    return
        kind = "budget-exhausted" if incomplete else "violated"
        self.fail(path, node, f"A1 ->* {target} <-* A2",
                  f"no left/right pair of {seq} reduces to {target}", kind)

    def cut(self, path, node):
        c = node.annotations[0]
        seq = node.conclusion
        left, right = (q.conclusion for q in node.premises)
        ok = True
        if not msame(left.gamma, seq.gamma):
            self.fail(path, node, "context", "left premise must keep the left context unchanged")
            ok = False
        if not msame(right.delta, seq.delta):
            self.fail(path, node, "context", "right premise must keep the right context unchanged")
            ok = False
        c1 = _single_extra(left.delta, seq.delta)
        c2 = _single_extra(right.gamma, seq.gamma)
        if c1 is None:
            self.fail(path, node, "context", "left premise must add exactly one formula on the right")
            ok = False
        if c2 is None:
            self.fail(path, node, "context", "right premise must add exactly one formula on the left")
            ok = False
        if ok:
            self.require(path, node, c, c1, f"{c} ->* C1")
            self.require(path, node, c, c2, f"{c} ->* C2")

    def bot_left(self, path, node):
        incomplete = False
        for a in node.conclusion.gamma:
            d, c = self.reduces(a, Bottom())
            if d is not None:
                self.report.witnesses[path] = [d]
                return
            incomplete |= not c
        self.fail(path, node, "A ->* _|_", "no left formula reduces to _|_",
                  "budget-exhausted" if incomplete else "violated")

    def one_sided(self, path, node):
        seq = node.conclusion
        ctxs = []
        for i, (q, (adds_l, adds_r)) in enumerate(zip(node.premises, premise_additions(node))):
            gl, miss_l = mremove(q.conclusion.gamma, adds_l)
            dl, miss_r = mremove(q.conclusion.delta, adds_r)
            if miss_l or miss_r:
                missing = ", ".join(map(str, miss_l + miss_r))
                self.fail(path, node, "context", f"premise {i} lacks active formula(s) {missing}")
                return
            ctxs.append((gl, dl))
        g0, d0 = ctxs[0]
        for g, d in ctxs[1:]:
            if not (msame(g, g0) and msame(d, d0)):
                self.fail(path, node, "context", "premises do not share their context")
                return
        side = SIDE[node.rule]
        extra_g, lack_g = mremove(seq.gamma, g0)
        extra_d, lack_d = mremove(seq.delta, d0)
        if lack_g or lack_d:
            self.fail(path, node, "context", "conclusion drops context formulas of the premises")
            return
        extra, other = (extra_g, extra_d) if side == "L" else (extra_d, extra_g)
        if len(extra) != 1 or other:
            self.fail(path, node, "context",
                      f"conclusion must add exactly one principal formula on the {'left' if side == 'L' else 'right'}")
            return
        p = extra[0]
        rule, ann = node.rule, node.annotations
        if rule.startswith("contr"):
            if not alpha_equal(p, ann[0]):
                self.fail(path, node, "principal", f"principal formula {p} is not the annotated {ann[0]}")
                return
            self.require(path, node, ann[0], ann[1], "A ->* A1")
            self.require(path, node, ann[0], ann[2], "A ->* A2")
            return
        if rule.startswith("weak"):
            return
        target = connective_target(node)
        self.require(path, node, p, target, f"C ->* {target}")
        if rule in EIGEN_RULES:
            x = ann[0]
            ctx_fv: set[str] = set()
            for q in g0 + d0:
                ctx_fv |= free_vars(q)
            if x in ctx_fv:
                self.fail(path, node, "eigenvariable", f"{x} occurs free in the context")


def _kind_ok(kind: str, value) -> bool:
    from .terms import is_term

    if kind == "P":
        return not is_term(value) and not isinstance(value, str)
    if kind == "V":
        return isinstance(value, str)
    return is_term(value)


def _single_extra(big: Sequence, small: Sequence):
    extra, lack = mremove(big, small)
    if len(extra) != 1 or lack:
        return None
    return extra[0]


def check_proof(R: RewriteSystem, p: Proof, budget: Budget = DEFAULT_BUDGET) -> CheckReport:
    return _Checker(R, budget).check(p)
