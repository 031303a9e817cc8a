"""Newman-style reduction of atomic cuts, and the engines built on it.

A single :func:`newman_step` rewrites one cut whose premises are cut free
into an axiom, or into two cuts on one-step reducts of the cut
proposition, or reports that the divergence it needs to close has no
joiner.  The engines apply it to the highest cut (leftmost first) until
the proof is cut free, the reducer is stuck, or the step budget runs out.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .analysis import EmpiricalOrdering, multiset_greater
from .kernel import Proof, Sequent, _single_extra, axiom, cut, cut_propositions, is_cut_free, nodes, replace_subproof
from .rewriting import (
    DEFAULT_BUDGET,
    Budget,
    ConversionSequence,
    ReductCache,
    RewriteSystem,
    SeqStep,
    common_reducts,
    join_sets,
    key_of,
    one_step_reducts,
)
from .terms import alpha_equal, is_atomic


class PreconditionViolation(ValueError):
    pass


class SearchTruncated(Exception):
    """A reduct closure needed by a step was cut off by the budget."""


# -- outcomes ----------------------------------------------------------------


@dataclass(frozen=True)
class ReducedToAxiom:
    proof: Proof
    reduct: object
    kind = "reduced-to-axiom"


@dataclass(frozen=True)
class ShortCircuit(ReducedToAxiom):
    side: str = "B=C"
    kind = "short-circuit"


@dataclass(frozen=True)
class SplitIntoTwoCuts:
    proof: Proof
    cut_prop: object
    c1: object
    c2: object
    joiner: object
    kind = "split"


@dataclass(frozen=True)
class Stuck:
    cut_prop: object
    divergence: ConversionSequence
    left_reducts: tuple = ()
    right_reducts: tuple = ()
    kind = "stuck"


StepOutcome = ReducedToAxiom | SplitIntoTwoCuts | Stuck


# -- policies ----------------------------------------------------------------


@dataclass(frozen=True)
class Choice:
    """One scripted decision.

    ``auto`` runs the case analysis in order; ``no-common`` skips the
    common-reduct shortcut; ``split`` forces case (iii) with the given
    one-step reducts and, optionally, the joiner.
    """

    case: str = "auto"
    c1: object = None
    c2: object = None
    joiner: object = None


AUTO = Choice()


@dataclass(frozen=True)
class RuleOrder:
    kind = "rule-order"

    def choice(self, step: int) -> Choice:
        return AUTO


@dataclass(frozen=True)
class Scripted:
    steps: tuple = ()
    cycle: bool = False
    kind = "scripted"

    def choice(self, step: int) -> Choice:
        if step < len(self.steps):
            return self.steps[step]
        if self.cycle and self.steps:
            return self.steps[step % len(self.steps)]
        return AUTO


def load_policy(data: dict, signature=None):
    from .syntax import parse_prop

    kind = data.get("kind", "rule-order")
    if kind == "rule-order":
        return RuleOrder()
    if kind != "scripted":
        raise ValueError(f"unknown policy kind {kind!r}")
    steps = []
    for entry in data.get("steps", []):
        case = entry.get("case", "auto")
        if case not in ("auto", "no-common", "split"):
            raise ValueError(f"unknown policy case {case!r}")
        props = {k: parse_prop(entry[k], signature) for k in ("c1", "c2", "joiner") if entry.get(k) is not None}
        steps.append(Choice(case, **props))
    return Scripted(tuple(steps), bool(data.get("cycle", False)))


def policy_json(policy) -> dict:
    from .syntax import show

    if isinstance(policy, RuleOrder):
        return {"kind": "rule-order"}
    out = []
    for c in policy.steps:
        e = {"case": c.case}
        for k in ("c1", "c2", "joiner"):
            if getattr(c, k) is not None:
                e[k] = show(getattr(c, k))
        out.append(e)
    return {"kind": "scripted", "cycle": policy.cycle, "steps": out}


# -- the step ------------------------------------------------------------------

_FRAGMENT = {"axiom", "weak-left", "weak-right", "contr-left", "contr-right"}


def in_atomic_fragment(p: Proof) -> bool:
    """Only axioms and structural rules (context formulas may be compound)."""
    return all(n.rule in _FRAGMENT for _, n in nodes(p))


def _join(cache: ReductCache, a, b):
    ra, rb = cache(a), cache(b)
    return join_sets(ra, rb), ra.complete and rb.complete


def _partner(cache, side, target, prefer):
    """First member of ``side`` sharing a reduct with ``target``.

    Returns (member, reduct); the reduct is ``prefer`` when that is a
    common reduct of some member, so the short-circuit case can fire.
    """
    exact = True
    first = None
    for a in side:
        ra, rt = cache(a), cache(target)
        exact &= ra.complete and rt.complete
        commons = common_reducts(ra, rt)
        if not commons:
            continue
        if prefer in ra and prefer in rt:
            return a, ra.get(prefer), True
        if first is None:
            first = (a, commons[0])
    if first is not None:
        return first[0], first[1], exact
    if not exact:
        raise SearchTruncated(f"no partner for {target} within budget")
    return None, None, True


def newman_step(R: RewriteSystem, p: Proof, policy=None, budget: Budget = DEFAULT_BUDGET,
                choice: Choice | None = None, cache: ReductCache | None = None) -> StepOutcome:
    if p.rule != "cut":
        raise PreconditionViolation("root is not a cut")
    if not all(is_cut_free(q) and in_atomic_fragment(q) for q in p.premises):
        raise PreconditionViolation("premises must be cut free and use only axioms and structural rules")
    choice = choice or (policy.choice(0) if policy is not None else AUTO)
    cache = cache or ReductCache(R, budget)
    C = p.annotations[0]
    if not is_atomic(C):
        raise PreconditionViolation(f"cut proposition {C} is not atomic")
    seq = p.conclusion
    g, d = tuple(seq.gamma), tuple(seq.delta)
    c1 = _single_extra(p.premises[0].conclusion.delta, d)
    c2 = _single_extra(p.premises[1].conclusion.gamma, g)
    if c1 is None or c2 is None:
        raise PreconditionViolation("premises do not match the cut schema")

    # (i) the conclusion is already an axiom
    if choice.case == "auto":
        for a in g:
            for e in d:
                j, _ = _join(cache, a, e)
                if j is not None:
                    return ReducedToAxiom(axiom(j.reduct, g, d), j.reduct)

    a, b, _ = _partner(cache, g, c1, C)
    e, dd, _ = _partner(cache, d, c2, C)
    if a is None or e is None:
        raise PreconditionViolation("premises have no axiom pair through the cut formula")

    # (ii) one of the valleys already passes through C
    if choice.case != "split":
        if alpha_equal(b, C):
            return ShortCircuit(axiom(dd, g, d), dd, "B=C")
        if alpha_equal(C, dd):
            return ShortCircuit(axiom(b, g, d), b, "C=D")

    # (iii) split C into two one-step reducts and join them
    steps = one_step_reducts(R, C)
    towards_b = [s for s in steps if b in cache(s.result)]
    towards_d = [s for s in steps if dd in cache(s.result)]
    if choice.case == "split" and choice.c1 is not None:
        towards_b = [s for s in towards_b if alpha_equal(s.result, choice.c1)]
        if not towards_b:
            raise PreconditionViolation(f"{choice.c1} is not a one-step reduct of {C} above {b}")
    if choice.case == "split" and choice.c2 is not None:
        towards_d = [s for s in towards_d if alpha_equal(s.result, choice.c2)]
        if not towards_d:
            raise PreconditionViolation(f"{choice.c2} is not a one-step reduct of {C} above {dd}")
    if not towards_b or not towards_d:
        incomplete = not all(cache(s.result).complete for s in steps)
        if incomplete:
            raise SearchTruncated(f"cannot locate the first steps from {C}")
        raise PreconditionViolation("cut proposition does not reduce to the valley bottoms")
    exact = True
    for s1 in towards_b:
        for s2 in towards_d:
            x, y = s1.result, s2.result
            if choice.case == "split" and choice.joiner is not None:
                rx, ry = cache(x), cache(y)
                if not (choice.joiner in rx and choice.joiner in ry):
                    raise PreconditionViolation(f"{choice.joiner} does not join {x} and {y}")
                joiner = rx.get(choice.joiner)
            else:
                j, ex = _join(cache, x, y)
                exact &= ex
                if j is None:
                    continue
                joiner = j.reduct
            ax_b = axiom(b, g, (x, y) + d)
            ax_j = axiom(joiner, g + (x,), (y,) + d)
            inner = cut(x, ax_b, ax_j, Sequent(g, (y,) + d))
            ax_d = axiom(dd, g + (y,), d)
            root = cut(y, inner, ax_d, seq)
            return SplitIntoTwoCuts(root, C, x, y, joiner)
    if not exact:
        raise SearchTruncated(f"joiner search for the reducts of {C} truncated")
    s1, s2 = towards_b[0], towards_d[0]
    div = ConversionSequence((s1.result, C, s2.result),
                             (SeqStep("backward", s1.rule, s1.position), SeqStep("forward", s2.rule, s2.position)))
    return Stuck(C, div, tuple(cache(s1.result).elements), tuple(cache(s2.result).elements))


# -- traces and results --------------------------------------------------------


@dataclass(frozen=True)
class TraceEntry:
    step: int
    path: tuple
    cut_prop: object
    outcome: object
    cuts_before: tuple
    cuts_after: tuple
    choice: Choice = AUTO
    proof_after: Proof | None = None
    event: str = "newman"
    events: tuple = ()


@dataclass
class CutFree:
    proof: Proof
    trace: list = field(default_factory=list)
    status = "cut-free"


@dataclass
class Failed:
    proof: Proof
    trace: list
    stuck: Stuck
    status = "failed"


@dataclass
class BudgetExhausted:
    proof: Proof
    trace: list
    reason: str = "step budget exhausted"
    status = "budget-exhausted"


EliminationResult = CutFree | Failed | BudgetExhausted


def highest_cut(p: Proof):
    """Leftmost cut whose premises are cut free, as (path, node), or None."""
    for path, n in nodes(p):
        if n.rule == "cut" and all(is_cut_free(q) for q in n.premises):
            return path, n
    return None


def require_atomic_proof(p: Proof) -> None:
    from .atomic import NonAtomicInput

    for _, n in nodes(p):
        for q in n.conclusion.props():
            if not is_atomic(q):
                raise NonAtomicInput(f"{q} is not atomic")


def eliminate_cuts_atomic_asym(R: RewriteSystem, p: Proof, policy=None, step_budget: int = 1000,
                               budget: Budget = DEFAULT_BUDGET, keep_proofs: bool = True):
    require_atomic_proof(p)
    policy = policy or RuleOrder()
    cache = ReductCache(R, budget)
    trace: list[TraceEntry] = []
    step = 0
    while True:
        found = highest_cut(p)
        if found is None:
            return CutFree(p, trace)
        if step >= step_budget:
            return BudgetExhausted(p, trace)
        path, node = found
        choice = policy.choice(step)
        before = tuple(cut_propositions(p))
        try:
            outcome = newman_step(R, node, budget=budget, choice=choice, cache=cache)
        except SearchTruncated as exc:
            return BudgetExhausted(p, trace, f"search budget exhausted: {exc}")
        if isinstance(outcome, Stuck):
            trace.append(TraceEntry(step, path, node.annotations[0], outcome, before, before, choice, None))
            return Failed(p, trace, outcome)
        p = replace_subproof(p, path, outcome.proof)
        trace.append(TraceEntry(step, path, node.annotations[0], outcome, before, tuple(cut_propositions(p)),
                                choice, p if keep_proofs else None))
        step += 1


# -- termination measure -----------------------------------------------------------


@dataclass
class MeasureReport:
    decreasing: bool
    steps_checked: int
    violation: dict | None = None


def instrument_measure(R: RewriteSystem, trace, carrier=(), budget: Budget = DEFAULT_BUDGET) -> MeasureReport:
    """Check that every Newman step strictly decreases the multiset of cut propositions.

    Raises :class:`NotTerminating` when the empirical reduction ordering
    cannot be built because a cycle is reachable.
    """
    order = EmpiricalOrdering(R, carrier, budget)
    checked = 0
    for entry in trace:
        if entry.event != "newman" or isinstance(entry.outcome, Stuck):
            continue
        for c in entry.cuts_before:
            order.greater(c, c)  # extends the carrier, raising on cycles
        checked += 1
        out = entry.outcome
        if isinstance(out, SplitIntoTwoCuts):
            one = {key_of(s.result) for s in one_step_reducts(R, out.cut_prop)}
            if key_of(out.c1) not in one or key_of(out.c2) not in one:
                return MeasureReport(False, checked, {"step": entry.step, "reason": "split reducts are not one-step reducts"})
        if not multiset_greater(entry.cuts_before, entry.cuts_after, order.greater):
            return MeasureReport(False, checked, {"step": entry.step, "before": entry.cuts_before,
                                                  "after": entry.cuts_after})
    return MeasureReport(True, checked)


# -- symmetric engine -------------------------------------------------------------


def eliminate_sym_atomic(p):
    """Symmetric atomic reduction: one cut replaced by an axiom per step."""
    from .atomic import _highest_cut, _at, _reduce_cut, _replace, sym_cut_count

    trace = []
    step = 0
    while True:
        path = _highest_cut(p)
        if path is None:
            return CutFree(p, trace)
        node = _at(p, path)
        before = sym_cut_count(p)
        new = _reduce_cut(node)
        p = _replace(p, path, new)
        trace.append(TraceEntry(step, path, node.pair[0], ReducedToAxiom(new, new.pair), (before,),
                                (sym_cut_count(p),), AUTO, None, "sym-atomic"))
        step += 1
