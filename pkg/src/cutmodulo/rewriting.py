"""Rewrite rules and the relations they generate on terms and propositions.

All relations are explored breadth-first under an explicit :class:`Budget`;
every search result says whether its exploration was complete, so callers
can tell an exact negative answer from a truncated one.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .terms import (
    InvalidPosition,
    Signature,
    Term,
    Var,
    canonical,
    ground_subterms,
    is_term,
    match_pattern,
    replace_at,
    substitute,
    term_positions,
    term_vars,
)


class RuleError(ValueError):
    pass


class InvalidSequence(ValueError):
    pass


@dataclass(frozen=True)
class Budget:
    max_objects: int = 10_000
    max_depth: int = 64

    def __post_init__(self):
        if self.max_objects <= 0 or self.max_depth <= 0:
            raise ValueError("budget must be positive")


DEFAULT_BUDGET = Budget()


@dataclass(frozen=True)
class RewriteRule:
    lhs: Term
    rhs: Term
    name: str | None = None

    def __post_init__(self):
        if isinstance(self.lhs, Var):
            raise RuleError(f"left-hand side of {self} is a variable")
        extra = term_vars(self.rhs) - term_vars(self.lhs)
        if extra:
            raise RuleError(f"right-hand side of {self} has variables {sorted(extra)} not in the left-hand side")

    def __str__(self):
        return f"{self.lhs} -> {self.rhs}"


@dataclass(frozen=True)
class RewriteSystem:
    signature: Signature
    rules: tuple[RewriteRule, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        names = [r.name for r in self.rules if r.name is not None]
        if len(names) != len(set(names)):
            raise RuleError("rule names must be unique")
        for r in self.rules:
            self.signature.check_term(r.lhs)
            self.signature.check_term(r.rhs)

    def label(self, index: int) -> str:
        rule = self.rules[index]
        return rule.name if rule.name is not None else f"#{index + 1}"

    def index_of(self, label: str) -> int:
        for i in range(len(self.rules)):
            if self.label(i) == label:
                return i
        raise KeyError(label)


def key_of(o):
    """Hashable identity of an object up to alpha-equivalence."""
    return o if is_term(o) else canonical(o)


# -- one step ---------------------------------------------------------------


@dataclass(frozen=True)
class Step:
    result: object
    rule: int
    position: tuple


def one_step_reducts(R: RewriteSystem, o) -> list[Step]:
    """Every ``o'`` with ``o ->1 o'``, leftmost-outermost, rules in order."""
    out = []
    for pos, sub in term_positions(o):
        if isinstance(sub, Var):
            continue
        for i, rule in enumerate(R.rules):
            theta = match_pattern(rule.lhs, sub)
            if theta is not None:
                out.append(Step(replace_at(o, pos, substitute(rule.rhs, theta)), i, pos))
    return out


def apply_rule_at(R: RewriteSystem, o, rule: int, position: Sequence[int]):
    from .terms import subterm_at

    try:
        sub = subterm_at(o, position)
    except InvalidPosition:
        return None
    if not is_term(sub):
        return None
    r = R.rules[rule]
    theta = match_pattern(r.lhs, sub)
    if theta is None:
        return None
    return replace_at(o, tuple(position), substitute(r.rhs, theta))


def predecessors(R: RewriteSystem, o, fillers: Sequence[Term] = ()) -> tuple[list[Step], bool]:
    """Objects ``o'`` with ``o' ->1 o``; each Step records the step o' -> o.

    Left-hand variables absent from the right-hand side can be instantiated
    arbitrarily; they range over ``fillers`` only and the result is then
    flagged inexact.
    """
    out = []
    exact = True
    for pos, sub in term_positions(o):
        for i, rule in enumerate(R.rules):
            theta = match_pattern(rule.rhs, sub)
            if theta is None:
                continue
            missing = sorted(term_vars(rule.lhs) - set(theta))
            if missing:
                exact = False
                choices = itertools.product(fillers, repeat=len(missing))
            else:
                choices = [()]
            for combo in choices:
                full = dict(theta)
                full.update(zip(missing, combo))
                prev = replace_at(o, pos, substitute(rule.lhs, full))
                out.append(Step(prev, i, pos))
    return out, exact


# -- closures ---------------------------------------------------------------


@dataclass(frozen=True)
class SeqStep:
    direction: str  # "forward" | "backward"
    rule: int
    position: tuple


@dataclass(frozen=True)
class ConversionSequence:
    objects: tuple
    steps: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "steps", tuple(self.steps))
        if not self.objects:
            raise InvalidSequence("a conversion sequence has at least one object")
        if len(self.steps) != len(self.objects) - 1:
            raise InvalidSequence("steps must number objects - 1")

    @property
    def first(self):
        return self.objects[0]

    @property
    def last(self):
        return self.objects[-1]

    def reversed(self) -> ConversionSequence:
        flip = {"forward": "backward", "backward": "forward"}
        steps = tuple(SeqStep(flip[s.direction], s.rule, s.position) for s in reversed(self.steps))
        return ConversionSequence(tuple(reversed(self.objects)), steps)

    def __add__(self, other: ConversionSequence) -> ConversionSequence:
        if key_of(self.last) != key_of(other.first):
            raise InvalidSequence("sequences do not meet")
        return ConversionSequence(self.objects + other.objects[1:], self.steps + other.steps)

    def slice(self, i: int, j: int) -> ConversionSequence:
        """Objects i..j inclusive."""
        return ConversionSequence(self.objects[i:j + 1], self.steps[i:j])

    def errors(self, R: RewriteSystem) -> list[str]:
        out = []
        for i, s in enumerate(self.steps):
            src, dst = self.objects[i], self.objects[i + 1]
            if s.direction == "backward":
                src, dst = dst, src
            elif s.direction != "forward":
                out.append(f"step {i}: unknown direction {s.direction!r}")
                continue
            got = apply_rule_at(R, src, s.rule, s.position)
            if got is None or key_of(got) != key_of(dst):
                out.append(f"step {i}: rule {R.label(s.rule)} at {list(s.position)} does not rewrite {src} to {dst}")
        return out

    def validate(self, R: RewriteSystem) -> None:
        errs = self.errors(R)
        if errs:
            raise InvalidSequence("; ".join(errs))


def derivation(objects: Sequence, steps: Iterable[Step]) -> ConversionSequence:
    return ConversionSequence(tuple(objects), tuple(SeqStep("forward", s.rule, s.position) for s in steps))


@dataclass
class ReductSet:
    """Breadth-first approximation of the ``->*`` closure of a seed."""

    seed: object
    elements: list = field(default_factory=list)
    complete: bool = False
    steps_used: int = 0
    _parent: dict = field(default_factory=dict, repr=False)
    _depth: dict = field(default_factory=dict, repr=False)
    _obj: dict = field(default_factory=dict, repr=False)

    def __contains__(self, o) -> bool:
        return key_of(o) in self._obj

    def __len__(self) -> int:
        return len(self.elements)

    def depth(self, o) -> int:
        return self._depth[key_of(o)]

    def get(self, o):
        return self._obj.get(key_of(o))

    def derivation_to(self, o) -> ConversionSequence:
        k = key_of(o)
        objs, steps = [self._obj[k]], []
        while self._parent[k] is not None:
            pk, step = self._parent[k]
            steps.append(step)
            objs.append(self._obj[pk])
            k = pk
        objs.reverse()
        steps.reverse()
        return derivation(objs, steps)


def reducts(R: RewriteSystem, o, budget: Budget = DEFAULT_BUDGET) -> ReductSet:
    rs = ReductSet(seed=o)
    k0 = key_of(o)
    rs.elements.append(o)
    rs._obj[k0] = o
    rs._parent[k0] = None
    rs._depth[k0] = 0
    queue = deque([o])
    complete = True
    while queue:
        cur = queue.popleft()
        ck = key_of(cur)
        d = rs._depth[ck]
        succ = one_step_reducts(R, cur)
        rs.steps_used += 1
        for st in succ:
            k = key_of(st.result)
            if k in rs._obj:
                continue
            if d + 1 > budget.max_depth or len(rs.elements) >= budget.max_objects:
                complete = False
                continue
            rs._obj[k] = st.result
            rs._parent[k] = (ck, st)
            rs._depth[k] = d + 1
            rs.elements.append(st.result)
            queue.append(st.result)
    rs.complete = complete
    return rs


class ReductCache:
    """Memoized :func:`reducts` for a fixed system and budget."""

    def __init__(self, R: RewriteSystem, budget: Budget = DEFAULT_BUDGET):
        self.R = R
        self.budget = budget
        self._sets: dict = {}

    def __call__(self, o) -> ReductSet:
        k = key_of(o)
        rs = self._sets.get(k)
        if rs is None:
            rs = self._sets[k] = reducts(self.R, o, self.budget)
        return rs


def reduces_to(R: RewriteSystem, src, dst, budget: Budget = DEFAULT_BUDGET,
               cache: ReductCache | None = None) -> tuple[ConversionSequence | None, bool]:
    """A derivation ``src ->* dst`` if found, and whether the search was exhaustive."""
    rs = cache(src) if cache is not None else reducts(R, src, budget)
    if dst in rs:
        return rs.derivation_to(dst), True
    return None, rs.complete


@dataclass(frozen=True)
class Join:
    reduct: object
    left: ConversionSequence
    right: ConversionSequence

    def valley(self) -> ConversionSequence:
        return self.left + self.right.reversed()


def join_sets(ra: ReductSet, rb: ReductSet) -> Join | None:
    best = None
    for o in ra.elements:
        if o in rb:
            cost = ra.depth(o) + rb.depth(o)
            if best is None or cost < best[0]:
                best = (cost, o)
    if best is None:
        return None
    c = best[1]
    return Join(c, ra.derivation_to(c), rb.derivation_to(rb.get(c)))


def common_reducts(ra: ReductSet, rb: ReductSet) -> list:
    """Common reducts ordered by combined distance, then by discovery order."""
    found = [(ra.depth(o) + rb.depth(o), i, o) for i, o in enumerate(ra.elements) if o in rb]
    return [o for _, _, o in sorted(found, key=lambda x: (x[0], x[1]))]


def joinable(R: RewriteSystem, a, b, budget: Budget = DEFAULT_BUDGET,
             cache: ReductCache | None = None) -> Join | None:
    """Some common reduct of ``a`` and ``b`` (closest first), or None.

    None is exact only when both reduct sets are complete; use
    :func:`join_status` to learn which.
    """
    return join_status(R, a, b, budget, cache)[0]


def join_status(R, a, b, budget=DEFAULT_BUDGET, cache=None) -> tuple[Join | None, bool]:
    get = cache if cache is not None else (lambda o: reducts(R, o, budget))
    ra, rb = get(a), get(b)
    j = join_sets(ra, rb)
    return j, (j is not None or (ra.complete and rb.complete))


# -- conversion ---------------------------------------------------------------


def _fillers(R: RewriteSystem, objs) -> list[Term]:
    pool: dict = {}
    for o in objs:
        for t in ground_subterms(o):
            pool.setdefault(t, None)
    for c in R.signature.constants():
        pool.setdefault(c, None)
    return list(pool)


def neighbours(R: RewriteSystem, o, fillers) -> tuple[list[tuple[object, SeqStep]], bool]:
    """Symmetric one-step neighbours, each with the step leading from ``o`` to it."""
    out = [(s.result, SeqStep("forward", s.rule, s.position)) for s in one_step_reducts(R, o)]
    preds, exact = predecessors(R, o, fillers)
    out.extend((s.result, SeqStep("backward", s.rule, s.position)) for s in preds)
    return out, exact


def convertible(R: RewriteSystem, a, b, budget: Budget = DEFAULT_BUDGET) -> ConversionSequence | None:
    """A conversion sequence from ``a`` to ``b``, or None within the budget.

    A valley through the closest common reduct is returned when one
    exists; otherwise the symmetric one-step relation is searched
    bidirectionally, layer by layer, so the sequence found is short but
    not guaranteed minimal.
    """
    j, _ = join_status(R, a, b, budget)
    if j is not None:
        return j.valley()
    return _bidirectional(R, a, b, budget)


def _bidirectional(R, a, b, budget):
    fillers = _fillers(R, [a, b])
    ka, kb = key_of(a), key_of(b)
    if ka == kb:
        return ConversionSequence((a,))
    # parent maps: key -> (prev key, step from prev to this) on each side
    sides = [({ka: None}, {ka: a}, [a]), ({kb: None}, {kb: b}, [b])]
    for depth in range(budget.max_depth):
        side = 0 if len(sides[0][2]) <= len(sides[1][2]) else 1
        parent, objs, frontier = sides[side]
        other_parent = sides[1 - side][0]
        nxt = []
        meet = None
        for cur in frontier:
            ck = key_of(cur)
            for o, step in neighbours(R, cur, fillers)[0]:
                k = key_of(o)
                if k in parent:
                    continue
                parent[k] = (ck, step)
                objs[k] = o
                nxt.append(o)
                if k in other_parent and meet is None:
                    meet = k
                if len(parent) + len(other_parent) > budget.max_objects:
                    return None
            if meet is not None:
                break
        if meet is not None:
            left = _trace(sides[0][0], sides[0][1], meet)
            right = _trace(sides[1][0], sides[1][1], meet)
            return left + right.reversed()
        if not nxt:
            return None
        sides[side] = (parent, objs, nxt)
    return None


def _trace(parent, objs, k) -> ConversionSequence:
    items, steps = [objs[k]], []
    while parent[k] is not None:
        pk, step = parent[k]
        steps.append(step)
        items.append(objs[pk])
        k = pk
    items.reverse()
    steps.reverse()
    return ConversionSequence(tuple(items), tuple(steps))


@dataclass
class ConversionClass:
    seed: object
    elements: list
    complete: bool
    _obj: dict = field(default_factory=dict, repr=False)

    def __contains__(self, o) -> bool:
        return key_of(o) in self._obj


def conversion_class(R: RewriteSystem, o, budget: Budget = DEFAULT_BUDGET, fillers=None) -> ConversionClass:
    """Breadth-first approximation of the ``==`` class of ``o``."""
    fillers = _fillers(R, [o]) if fillers is None else fillers
    seen = {key_of(o): o}
    queue = deque([(o, 0)])
    complete = True
    while queue:
        cur, d = queue.popleft()
        nbrs, exact = neighbours(R, cur, fillers)
        complete &= exact
        for n, _ in nbrs:
            k = key_of(n)
            if k in seen:
                continue
            if d + 1 > budget.max_depth or len(seen) >= budget.max_objects:
                complete = False
                continue
            seen[k] = n
            queue.append((n, d + 1))
    return ConversionClass(o, list(seen.values()), complete, seen)


def find_peaks(s: ConversionSequence) -> list[int]:
    return [i for i in range(1, len(s.objects) - 1)
            if s.steps[i - 1].direction == "backward" and s.steps[i].direction == "forward"]


def is_valley(s: ConversionSequence) -> bool:
    return not find_peaks(s)


def valley_bottom(s: ConversionSequence):
    """The lowest object of a valley: the end of its forward prefix."""
    k = 0
    while k < len(s.steps) and s.steps[k].direction == "forward":
        k += 1
    return s.objects[k]
