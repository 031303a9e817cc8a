"""Bounded confluence and termination analyzers.

The verdicts are semi-decisions: ``Holds`` is relative to the universe and
budget it reports, ``Fails`` always carries a witness that can be replayed
against the system, and ``Unknown`` means exploration was truncated.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .rewriting import (
    DEFAULT_BUDGET,
    Budget,
    ConversionSequence,
    ReductCache,
    RewriteRule,
    RewriteSystem,
    SeqStep,
    join_sets,
    key_of,
    one_step_reducts,
)
from .terms import App, Term, Var, replace_at, substitute, term_positions, term_vars, unify


class NotTerminating(Exception):
    def __init__(self, cycle: ConversionSequence):
        super().__init__(f"cycle: {' -> '.join(map(str, cycle.objects))}")
        self.cycle = cycle


@dataclass
class Holds:
    detail: dict = field(default_factory=dict)
    status = "holds"


@dataclass
class Fails:
    witness: dict
    detail: dict = field(default_factory=dict)
    status = "fails"


@dataclass
class Unknown:
    reason: str
    detail: dict = field(default_factory=dict)
    status = "unknown"


Verdict = Holds | Fails | Unknown


# -- critical pairs ---------------------------------------------------------


@dataclass(frozen=True)
class CriticalPair:
    peak: Term
    left: Term
    right: Term
    outer: int
    inner: int
    position: tuple


def _rename(rule: RewriteRule, suffix: str) -> RewriteRule:
    ren = {v: Var(v + suffix) for v in term_vars(rule.lhs)}
    return RewriteRule(substitute(rule.lhs, ren), substitute(rule.rhs, ren), rule.name)


def critical_pairs(R: RewriteSystem) -> list[CriticalPair]:
    """Overlaps of each lhs into a non-variable position of another.

    Root overlaps of a rule with itself are trivial and skipped; root
    overlaps between two distinct rules are reported once (i < j).
    """
    out = []
    n = len(R.rules)
    for i in range(n):
        outer = _rename(R.rules[i], "_1")
        for pos, sub in term_positions(outer.lhs):
            if isinstance(sub, Var):
                continue
            for j in range(n):
                if pos == () and j <= i:
                    continue
                inner = _rename(R.rules[j], "_2")
                sigma = unify(sub, inner.lhs)
                if sigma is None:
                    continue
                peak = substitute(outer.lhs, sigma)
                left = substitute(outer.rhs, sigma)
                right = replace_at(peak, pos, substitute(inner.rhs, sigma))
                out.append(CriticalPair(peak, left, right, i, j, pos))
    return out


def locally_confluent(R: RewriteSystem, budget: Budget = DEFAULT_BUDGET) -> Verdict:
    cache = ReductCache(R, budget)
    unknown = None
    pairs = critical_pairs(R)
    for cp in pairs:
        ra, rb = cache(cp.left), cache(cp.right)
        if join_sets(ra, rb) is not None:
            continue
        if ra.complete and rb.complete:
            return Fails({"peak": cp.peak, "left": cp.left, "right": cp.right,
                          "rules": (cp.outer, cp.inner), "position": cp.position,
                          "left_reducts": list(ra.elements), "right_reducts": list(rb.elements)})
        unknown = unknown or cp
    if unknown is not None:
        return Unknown("critical pair closure truncated",
                       {"left": unknown.left, "right": unknown.right})
    return Holds({"critical_pairs": len(pairs)})


# -- universes --------------------------------------------------------------


def ground_terms(sig, depth: int) -> list[Term]:
    """All ground terms over ``sig`` of depth at most ``depth`` (constants have depth 1)."""
    levels: list[list[Term]] = []
    seen: dict[Term, None] = {}
    for d in range(1, depth + 1):
        prev = [t for lvl in levels for t in lvl]
        new = []
        for f, n in sig.function_symbols.items():
            if n == 0:
                cands = [App(f)] if d == 1 else []
            elif d == 1:
                cands = []
            else:
                last = set(levels[-1])
                cands = [App(f, args) for args in itertools.product(prev, repeat=n)
                         if any(a in last for a in args)]
            for t in cands:
                if t not in seen:
                    seen[t] = None
                    new.append(t)
        levels.append(new)
    return list(seen)


def default_universe(R: RewriteSystem, depth: int = 3, extra: Iterable = ()) -> list:
    """Subterm-closed seeds from ``extra`` plus ground terms up to ``depth``."""
    seen: dict = {}
    for o in extra:
        for _, t in term_positions(o):
            if not term_vars(t):
                seen.setdefault(t, None)
    for t in ground_terms(R.signature, depth):
        seen.setdefault(t, None)
    return list(seen)


# -- confluence -------------------------------------------------------------


def confluent(R: RewriteSystem, universe: Sequence, budget: Budget = DEFAULT_BUDGET,
              cache: ReductCache | None = None) -> Verdict:
    cache = cache or ReductCache(R, budget)
    unknown = None
    checked = 0
    for t in universe:
        rt = cache(t)
        if not rt.complete:
            # pairs inside a truncated closure cannot settle anything
            unknown = unknown or ("reduct set truncated", t)
            continue
        elems = rt.elements
        for u, v in itertools.combinations(elems, 2):
            checked += 1
            ru, rv = cache(u), cache(v)
            if join_sets(ru, rv) is not None:
                continue
            if ru.complete and rv.complete:
                return Fails({"seed": t, "left": u, "right": v,
                              "left_derivation": rt.derivation_to(u),
                              "right_derivation": rt.derivation_to(v),
                              "left_reducts": list(ru.elements), "right_reducts": list(rv.elements)})
            unknown = unknown or ("join search truncated", t)
    if unknown is not None:
        return Unknown(unknown[0], {"seed": unknown[1]})
    return Holds({"universe": len(universe), "pairs": checked, "semi_decision": True})


# -- termination ------------------------------------------------------------


def terminating(R: RewriteSystem, universe: Sequence, budget: Budget = DEFAULT_BUDGET) -> Verdict:
    """Depth-first search for a cycle in the reduct graph of the universe.

    Holds when the reachable graph is finite and acyclic within budget; the
    detail records the longest derivation.  A derivation exceeding the
    depth budget yields Unknown with that derivation attached, since a long
    derivation alone does not refute termination.
    """
    WHITE, GREY, BLACK = 0, 1, 2
    colour: dict = {}
    height: dict = {}
    for seed in universe:
        ks = key_of(seed)
        if colour.get(ks) == BLACK:
            continue
        # stack frames: (object, successor steps, next index)
        path: list = []
        stack = [(seed, None, 0)]
        colour[ks] = GREY
        path.append((seed, None))
        while stack:
            cur, succ, idx = stack[-1]
            if succ is None:
                succ = one_step_reducts(R, cur)
                stack[-1] = (cur, succ, 0)
            if idx < len(succ):
                stack[-1] = (cur, succ, idx + 1)
                st = succ[idx]
                k = key_of(st.result)
                c = colour.get(k, WHITE)
                if c == GREY:
                    start = next(i for i, (o, _) in enumerate(path) if key_of(o) == k)
                    objs = [o for o, _ in path[start:]] + [st.result]
                    steps = [s for _, s in path[start + 1:]] + [st]
                    cyc = ConversionSequence(tuple(objs), tuple(SeqStep("forward", s.rule, s.position) for s in steps))
                    return Fails({"cycle": cyc, "seed": seed})
                if c == WHITE:
                    if len(colour) >= budget.max_objects:
                        return Unknown("object budget exhausted", {"objects": len(colour)})
                    if len(path) > budget.max_depth:
                        objs = [o for o, _ in path] + [st.result]
                        steps = [s for _, s in path[1:]] + [st]
                        long = ConversionSequence(tuple(objs), tuple(SeqStep("forward", s.rule, s.position) for s in steps))
                        return Unknown("derivation exceeds depth budget", {"derivation": long})
                    colour[k] = GREY
                    path.append((st.result, st))
                    stack.append((st.result, None, 0))
            else:
                ck = key_of(cur)
                colour[ck] = BLACK
                height[ck] = max((height[key_of(s.result)] + 1 for s in succ), default=0)
                stack.pop()
                path.pop()
    longest = max(height.values(), default=0)
    return Holds({"objects": len(colour), "longest_derivation": longest})


# -- empirical reduction ordering -------------------------------------------


class EmpiricalOrdering:
    """``t > u`` iff ``t ->+ u``, on the closure of a finite carrier.

    Raises :class:`NotTerminating` when a cycle is reachable from the
    carrier.  Objects outside the closure are added on demand.
    """

    def __init__(self, R: RewriteSystem, objects: Iterable = (), budget: Budget = DEFAULT_BUDGET):
        self.R = R
        self.budget = budget
        self._below: dict = {}
        for o in objects:
            self._extend(o)

    def _extend(self, o):
        k = key_of(o)
        if k in self._below:
            return
        verdict = terminating(self.R, [o], self.budget)
        if isinstance(verdict, Fails):
            raise NotTerminating(verdict.witness["cycle"])
        if isinstance(verdict, Unknown):
            raise NotTerminating(verdict.detail.get("derivation") or ConversionSequence((o,)))
        cache = ReductCache(self.R, self.budget)
        rs = cache(o)
        for x in rs.elements:
            kx = key_of(x)
            if kx not in self._below:
                self._below[kx] = {key_of(y) for y in cache(x).elements} - {kx}

    def greater(self, t, u) -> bool:
        self._extend(t)
        return key_of(u) in self._below[key_of(t)]

    def carrier(self) -> list:
        return list(self._below)


def multiset_greater(M: Iterable, N: Iterable, gt) -> bool:
    """Dershowitz-Manna multiset extension of the strict order ``gt``."""
    M, N = list(M), list(N)
    objs = {key_of(x): x for x in M + N}
    m = Counter(key_of(x) for x in M)
    n = Counter(key_of(x) for x in N)
    if m == n:
        return False
    over = [objs[k] for k in m - n]
    under = [objs[k] for k in n - m]
    return all(any(gt(x, y) for x in over) for y in under)
