"""Cut elimination for full asymmetric deduction modulo.

Non-atomic cuts are removed by the usual structural induction, tracking
the occurrences that descend from the cut formula; atomic cuts between
axioms are handed to :func:`newman_step`.  The induction works on the
mixed form: from ``pi1`` proving ``G1 |- D1`` with tracked right
occurrences ``T1`` and ``pi2`` proving ``G2 |- D2`` with tracked left
occurrences ``T2`` it builds a proof of ``G1, G2 - T2 |- D1 - T1, D2``;
the duplicated context is contracted away at the end.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .elimination import (
    BudgetExhausted,
    CutFree,
    Failed,
    RuleOrder,
    SearchTruncated,
    Stuck,
    TraceEntry,
    highest_cut,
    in_atomic_fragment,
    newman_step,
)
from .kernel import EIGEN_RULES, SIDE, Proof, Sequent, _single_extra, axiom, cut, cut_propositions, nodes, principal, replace_subproof
from .rewriting import DEFAULT_BUDGET, Budget, ReductCache, RewriteSystem, join_sets, key_of
from .terms import (
    And,
    Bottom,
    Exists,
    Forall,
    Implies,
    Or,
    Var,
    all_names,
    fresh_name,
    is_atomic,
    substitute,
    term_vars,
)


class NormalizationFailure(ValueError):
    pass


class _Names:
    def __init__(self, used=()):
        self.used = set(used)

    def fresh(self, base: str) -> str:
        base = base.rstrip("'") or "v"
        n = fresh_name(base, self.used)
        self.used.add(n)
        return n


def proof_names(p: Proof) -> set[str]:
    out: set[str] = set()
    for _, n in nodes(p):
        for q in n.conclusion.props():
            out |= all_names(q)
        for a in n.annotations:
            if isinstance(a, str):
                out.add(a)
            else:
                out |= all_names(a)
    return out


def _minus(props, counts: Counter) -> list:
    left = Counter(counts)
    out = []
    for q in props:
        k = key_of(q)
        if left[k] > 0:
            left[k] -= 1
        else:
            out.append(q)
    return out


def _remove_one(props, q) -> tuple:
    return tuple(_minus(props, Counter({key_of(q): 1})))


# -- proof transformations ------------------------------------------------------


def weaken(p: Proof, left=(), right=()) -> Proof:
    """Add formulas to the end-sequent by weakenings at the root."""
    g, d = tuple(p.conclusion.gamma), tuple(p.conclusion.delta)
    for q in left:
        g = g + (q,)
        p = Proof("weak-left", (), Sequent(g, d), (p,))
    for q in right:
        d = d + (q,)
        p = Proof("weak-right", (), Sequent(g, d), (p,))
    return p


def subst_proof(p: Proof, s: dict, names: _Names | None = None) -> Proof:
    """Apply a substitution to every sequent, renaming clashing eigenvariables."""
    if not s:
        return p
    names = names or _Names(proof_names(p) | {v for t in s.values() for v in term_vars(t)} | set(s))
    concl = Sequent(tuple(substitute(q, s) for q in p.conclusion.gamma),
                    tuple(substitute(q, s) for q in p.conclusion.delta))
    r, a = p.rule, p.annotations
    if r in EIGEN_RULES:
        x, body = a
        prem = p.premises[0]
        if x in s or any(x in term_vars(t) for t in s.values()):
            x2 = names.fresh(x)
            prem = subst_proof(prem, {x: Var(x2)}, names)
            body = substitute(body, {x: Var(x2)})
            x = x2
        return Proof(r, (x, substitute(body, s)), concl, (subst_proof(prem, s, names),))
    if r in ("forall-left", "exists-right"):
        x, body, t = a
        q = substitute((Forall if r == "forall-left" else Exists)(x, body), s)
        anns = (q.var, q.body, substitute(t, s))
    else:
        anns = tuple(substitute(x, s) for x in a)
    return Proof(r, anns, concl, tuple(subst_proof(q, s, names) for q in p.premises))


def rename_eigen(p: Proof, names: _Names) -> Proof:
    """Give the eigenvariable of a root forall-right or exists-left a fresh name."""
    x, body = p.annotations
    x2 = names.fresh(x)
    prem = subst_proof(p.premises[0], {x: Var(x2)}, names)
    return Proof(p.rule, (x2, substitute(body, {x: Var(x2)})), p.conclusion, (prem,))


# -- axiom normalization -------------------------------------------------------------


def _expand(g: tuple, d: tuple, a1, a2, A, names: _Names) -> Proof:
    """Proof of ``g |- d`` from a1 in g and a2 in d that both reduce to A."""
    seq = Sequent(g, d)
    if is_atomic(A):
        return axiom(A, g, d)
    if isinstance(A, Bottom):
        return Proof("bot-left", (), seq)
    gr, dr = _remove_one(g, a1), _remove_one(d, a2)
    if isinstance(A, And):
        b, c = A.left, A.right
        g1 = gr + (b, c)
        pb = _expand(g1, (b,) + dr, b, b, b, names)
        pc = _expand(g1, (c,) + dr, c, c, c, names)
        right = Proof("and-right", (b, c), Sequent(g1, d), (pb, pc))
        return Proof("and-left", (b, c), seq, (right,))
    if isinstance(A, Or):
        b, c = A.left, A.right
        prems = []
        for x in (b, c):
            gx = gr + (x,)
            inner = _expand(gx, (b, c) + dr, x, x, x, names)
            prems.append(Proof("or-right", (b, c), Sequent(gx, d), (inner,)))
        return Proof("or-left", (b, c), seq, tuple(prems))
    if isinstance(A, Implies):
        b, c = A.left, A.right
        p1 = _expand(gr + (b,), (b, c) + dr, b, b, b, names)
        p2 = _expand(gr + (b, c), (c,) + dr, c, c, c, names)
        left = Proof("imp-left", (b, c), Sequent(g + (b,), (c,) + dr), (p1, p2))
        return Proof("imp-right", (b, c), seq, (left,))
    if isinstance(A, (Forall, Exists)):
        y = names.fresh(A.var)
        by = substitute(A.body, {A.var: Var(y)})
        inner = _expand(gr + (by,), (by,) + dr, by, by, by, names)
        if isinstance(A, Forall):
            left = Proof("forall-left", (y, by, Var(y)), Sequent(g, (by,) + dr), (inner,))
            return Proof("forall-right", (y, by), seq, (left,))
        right = Proof("exists-right", (y, by, Var(y)), Sequent(gr + (by,), d), (inner,))
        return Proof("exists-left", (y, by), seq, (right,))
    raise NormalizationFailure(f"cannot expand an axiom on {A}")


def normalize_axioms(R: RewriteSystem, p: Proof, cache: ReductCache | None = None,
                     names: _Names | None = None) -> Proof:
    """Replace every non-atomic axiom by logical rules over atomic axioms."""
    cache = cache or ReductCache(R, DEFAULT_BUDGET)
    names = names or _Names(proof_names(p))
    targets = [(path, n) for path, n in nodes(p) if n.rule == "axiom" and not is_atomic(n.annotations[0])]
    for path, n in reversed(targets):
        A = n.annotations[0]
        g, d = tuple(n.conclusion.gamma), tuple(n.conclusion.delta)
        pair = next(((a1, a2) for a1 in g if A in cache(a1) for a2 in d if A in cache(a2)), None)
        if pair is None:
            raise NormalizationFailure(f"axiom on {A} has no pair of propositions reducing to it")
        p = replace_subproof(p, path, _expand(g, d, pair[0], pair[1], A, names))
    return p


# -- the induction -------------------------------------------------------------------

_DUAL = {"and-right": "and-left", "or-right": "or-left", "imp-right": "imp-left",
         "forall-right": "forall-left", "exists-right": "exists-left"}


@dataclass(frozen=True)
class ElimStep:
    proof: Proof
    events: tuple = ()
    kind = "elim"


class _Eliminator:
    def __init__(self, R: RewriteSystem, cache: ReductCache, names: _Names):
        self.R = R
        self.cache = cache
        self.names = names
        self.events: list = []

    def join(self, a, b):
        ra, rb = self.cache(a), self.cache(b)
        j = join_sets(ra, rb)
        if j is None and not (ra.complete and rb.complete):
            raise SearchTruncated(f"join of {a} and {b} truncated")
        return j

    def run(self, node: Proof) -> Proof:
        seq = node.conclusion
        left, right = node.premises
        c1 = _single_extra(left.conclusion.delta, seq.delta)
        c2 = _single_extra(right.conclusion.gamma, seq.gamma)
        res = self.elim(node.annotations[0], left, Counter({key_of(c1): 1}), right, Counter({key_of(c2): 1}))
        return self.contract(res, seq)

    def contract(self, p: Proof, target: Sequent) -> Proof:
        g, d = list(p.conclusion.gamma), list(p.conclusion.delta)
        for q in target.gamma:
            g = _minus(g, Counter({key_of(q): 1}))
            p = Proof("contr-left", (q, q, q), Sequent(g, d), (p,))
        for q in target.delta:
            d = _minus(d, Counter({key_of(q): 1}))
            p = Proof("contr-right", (q, q, q), Sequent(g, d), (p,))
        return Proof(p.rule, p.annotations, target, p.premises) if p.conclusion.same(target) else p

    # classification of the last rule of one side

    def classify(self, p: Proof, T: Counter, side: str):
        seq = p.conclusion
        if p.rule == "axiom":
            gs = seq.gamma if side == "R" else _minus(seq.gamma, T)
            ds = _minus(seq.delta, T) if side == "R" else seq.delta
            A = p.annotations[0]
            if any(A in self.cache(a) for a in gs) and any(A in self.cache(b) for b in ds):
                return "context-axiom", A
            for a in gs:
                for b in ds:
                    j = join_sets(self.cache(a), self.cache(b))
                    if j is not None:
                        return "context-axiom", j.reduct
            return "tracked-axiom", None
        if p.rule == "bot-left":
            gs = seq.gamma if side == "R" else _minus(seq.gamma, T)
            if any(Bottom() in self.cache(a) for a in gs):
                return "context-bot", None
            return "tracked-bot", None
        if SIDE[p.rule] != ("R" if side == "R" else "L"):
            return "context", None
        P = principal(p)
        if T[key_of(P)] == 0:
            return "context", None
        if p.rule.startswith(("weak", "contr")):
            # a structural rule on an alpha-equal untracked copy leaves the tracking intact
            copies = sum(1 for q in (seq.delta if side == "R" else seq.gamma) if key_of(q) == key_of(P))
            return ("context", None) if copies > T[key_of(P)] else ("structural", P)
        return "logical", P

    def elim(self, C, p1: Proof, T1: Counter, p2: Proof, T2: Counter) -> Proof:
        T1, T2 = +T1, +T2
        g1, d1 = tuple(p1.conclusion.gamma), tuple(p1.conclusion.delta)
        g2, d2 = tuple(p2.conclusion.gamma), tuple(p2.conclusion.delta)
        rest_d1, rest_g2 = tuple(_minus(d1, T1)), tuple(_minus(g2, T2))
        G, D = g1 + rest_g2, rest_d1 + d2
        if not T1:
            return weaken(p1, rest_g2, d2)
        if not T2:
            return weaken(p2, g1, rest_d1)
        k1, x1 = self.classify(p1, T1, "R")
        if k1 == "context-axiom":
            self.events.append(("axiom-join", (x1,)))
            return axiom(x1, G, D)
        if k1 == "context-bot":
            return Proof("bot-left", (), Sequent(G, D))
        if k1 == "context":
            return self.lift(C, p1, T1, p2, T2, 1, G, D)
        if k1 == "structural":
            return self.elim(C, p1.premises[0], self.retrack(p1, x1, T1), p2, T2)
        k2, x2 = self.classify(p2, T2, "L")
        if k2 == "context-axiom":
            self.events.append(("axiom-join", (x2,)))
            return axiom(x2, G, D)
        if k2 == "context-bot":
            return Proof("bot-left", (), Sequent(G, D))
        if k2 == "context":
            return self.lift(C, p1, T1, p2, T2, 2, G, D)
        if k2 == "structural":
            return self.elim(C, p1, T1, p2.premises[0], self.retrack(p2, x2, T2))
        if k1 == "tracked-axiom" and k2 == "tracked-axiom":
            return self.axiom_axiom(C, p1, T1, p2, T2, G, D)
        if k1 == "logical" and k2 == "logical" and _DUAL.get(p1.rule) == p2.rule:
            return self.key(C, p1, x1, T1, p2, x2, T2, G, D)
        raise NormalizationFailure(f"unexpected pair of rules {p1.rule} / {p2.rule} on the cut formula {C}")

    def retrack(self, p: Proof, P, T: Counter) -> Counter:
        T = T - Counter({key_of(P): 1})
        if p.rule.startswith("contr"):
            T = T + Counter({key_of(p.annotations[1]): 1}) + Counter({key_of(p.annotations[2]): 1})
        return T

    def lift(self, C, p1, T1, p2, T2, which: int, G, D) -> Proof:
        p = p1 if which == 1 else p2
        other = (p2.conclusion, T2) if which == 1 else (p1.conclusion, T1)
        if p.rule in EIGEN_RULES:
            oseq, oT = other
            ctx = (_minus(oseq.gamma, oT), oseq.delta) if which == 1 else (oseq.gamma, _minus(oseq.delta, oT))
            fv = set()
            for q in list(ctx[0]) + list(ctx[1]):
                fv |= {v for v in all_names(q)}
            if p.annotations[0] in fv:
                p = rename_eigen(p, self.names)
        prems = []
        for q in p.premises:
            if which == 1:
                prems.append(self.elim(C, q, T1, p2, T2))
            else:
                prems.append(self.elim(C, p1, T1, q, T2))
        return Proof(p.rule, p.annotations, Sequent(G, D), tuple(prems))

    def axiom_axiom(self, C, p1, T1, p2, T2, G, D) -> Proof:
        tracked1 = [x for x in p1.conclusion.delta if T1[key_of(x)] > 0]
        tracked2 = [x for x in p2.conclusion.gamma if T2[key_of(x)] > 0]
        left = self._pair(p1.conclusion.gamma, tracked1)
        right = self._pair(tracked2, p2.conclusion.delta)
        if left is None or right is None:
            raise NormalizationFailure("axiom on the cut formula has no valid pair")
        a, x, b = left
        x2, e, dd = right
        j = self.join(a, e)
        if j is not None:
            self.events.append(("axiom-join", (j.reduct,)))
            return axiom(j.reduct, G, D)
        self.events.append(("residual", (C,)))
        return cut(C, axiom(b, G, (x,) + D), axiom(dd, G + (x2,), D), Sequent(G, D))

    def _pair(self, lefts, rights):
        for a in lefts:
            for b in rights:
                j = join_sets(self.cache(a), self.cache(b))
                if j is not None:
                    return a, b, j.reduct
        return None

    def key(self, C, p1, P1, T1, p2, P2, T2, G, D) -> Proof:
        rest_g2 = tuple(_minus(p2.conclusion.gamma, T2))
        g1 = tuple(p1.conclusion.gamma)
        rest_d1 = tuple(_minus(p1.conclusion.delta, T1))
        T1p = T1 - Counter({key_of(P1): 1})
        T2p = T2 - Counter({key_of(P2): 1})

        def side1(q):
            return self.elim(C, q, T1p, p2, T2) if T1p else weaken(q, rest_g2, p2.conclusion.delta)

        def side2(q):
            return self.elim(C, p1, T1, q, T2p) if T2p else weaken(q, g1, rest_d1)

        a1, a2 = p1.annotations, p2.annotations
        if isinstance(C, And):
            A, B = C.left, C.right
            rA, rB = side1(p1.premises[0]), side1(p1.premises[1])
            s = side2(p2.premises[0])
            A1, B2 = a1[0], a2[1]
            wl = Proof("weak-left", (), Sequent(G + (B2,), (A1,) + D), (rA,))
            cut_a = cut(A, wl, s, Sequent(G + (B2,), D))
            self.events.append(("key-and", (A, B)))
            return cut(B, rB, cut_a, Sequent(G, D))
        if isinstance(C, Or):
            A, B = C.left, C.right
            r = side1(p1.premises[0])
            sA, sB = side2(p2.premises[0]), side2(p2.premises[1])
            A2, B1 = a2[0], a1[1]
            wr = Proof("weak-right", (), Sequent(G + (A2,), (B1,) + D), (sA,))
            cut_a = cut(A, r, wr, Sequent(G, (B1,) + D))
            self.events.append(("key-or", (A, B)))
            return cut(B, cut_a, sB, Sequent(G, D))
        if isinstance(C, Implies):
            A, B = C.left, C.right
            r = side1(p1.premises[0])
            sA, sB = side2(p2.premises[0]), side2(p2.premises[1])
            A2, B1 = a2[0], a1[1]
            wr = Proof("weak-right", (), Sequent(G, (A2, B1) + D), (sA,))
            cut_a = cut(A, wr, r, Sequent(G, (B1,) + D))
            self.events.append(("key-imp", (A, B)))
            return cut(B, cut_a, sB, Sequent(G, D))
        if isinstance(C, Forall):
            y, A1 = a1
            t = a2[2]
            y2 = self.names.fresh(y)
            rho = subst_proof(p1.premises[0], {y: Var(y2)}, self.names)
            r = subst_proof(side1(rho), {y2: t}, self.names)
            s = side2(p2.premises[0])
            inst = substitute(C.body, {C.var: t})
            self.events.append(("key-forall", (inst,)))
            return cut(inst, r, s, Sequent(G, D))
        if isinstance(C, Exists):
            y, A2 = a2
            t = a1[2]
            y2 = self.names.fresh(y)
            sigma = subst_proof(p2.premises[0], {y: Var(y2)}, self.names)
            s = subst_proof(side2(sigma), {y2: t}, self.names)
            r = side1(p1.premises[0])
            inst = substitute(C.body, {C.var: t})
            self.events.append(("key-exists", (inst,)))
            return cut(inst, r, s, Sequent(G, D))
        raise NormalizationFailure(f"no key case for {C}")


def eliminate_cuts_full(R: RewriteSystem, p: Proof, policy=None, step_budget: int = 1000,
                        budget: Budget = DEFAULT_BUDGET):
    policy = policy or RuleOrder()
    cache = ReductCache(R, budget)
    names = _Names(proof_names(p))
    p = normalize_axioms(R, p, cache, names)
    trace: list[TraceEntry] = []
    step = 0
    while True:
        found = highest_cut(p)
        if found is None:
            return CutFree(p, trace)
        if step >= step_budget:
            return BudgetExhausted(p, trace)
        path, node = found
        C = node.annotations[0]
        before = tuple(cut_propositions(p))
        choice = policy.choice(step)
        try:
            if is_atomic(C) and all(in_atomic_fragment(q) for q in node.premises):
                outcome = newman_step(R, node, budget=budget, choice=choice, cache=cache)
                if isinstance(outcome, Stuck):
                    trace.append(TraceEntry(step, path, C, outcome, before, before, choice, None))
                    return Failed(p, trace, outcome)
                new, event, events = outcome.proof, "newman", ()
            else:
                el = _Eliminator(R, cache, names)
                new = el.run(node)
                outcome = ElimStep(new, tuple(el.events))
                event, events = "elim", tuple(el.events)
        except SearchTruncated as exc:
            return BudgetExhausted(p, trace, f"search budget exhausted: {exc}")
        p = replace_subproof(p, path, new)
        trace.append(TraceEntry(step, path, C, outcome, before, tuple(cut_propositions(p)), choice, p, event, events))
        step += 1
