"""Decision procedures and proof builders for the atomic fragments.

Symmetric atomic proofs use conversions as side conditions; asymmetric
ones use reductions and are ordinary kernel proofs.  Both deciders answer
``Provable`` with a proof, ``NotProvable`` with complete closures as a
certificate, or ``Unknown`` when a closure was truncated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .analysis import Unknown, confluent
from .kernel import CheckReport, Failure, Proof, Sequent, axiom, cut, mremove, msame
from .rewriting import (
    DEFAULT_BUDGET,
    Budget,
    ConversionSequence,
    InvalidSequence,
    ReductCache,
    RewriteSystem,
    _fillers,
    conversion_class,
    convertible,
    find_peaks,
    join_sets,
    key_of,
    one_step_reducts,
    valley_bottom,
)
from .terms import Atom, alpha_equal, is_atomic


class NonAtomicInput(ValueError):
    pass


@dataclass(frozen=True)
class Provable:
    proof: object
    witness: object = None


@dataclass(frozen=True)
class NotProvable:
    certificate: dict


AtomicAnswer = Provable | NotProvable | Unknown


def require_atomic(s: Sequent) -> None:
    for p in s.props():
        if not is_atomic(p):
            raise NonAtomicInput(f"{p} is not atomic")


# -- symmetric proofs --------------------------------------------------------


@dataclass(frozen=True)
class SymProof:
    """A proof in the symmetric atomic fragment.

    ``pair`` is (A, B) with A on the left and B on the right for an axiom,
    and (C1, C2) for a cut; ``conversion`` witnesses their convertibility.
    """

    rule: str
    conclusion: Sequent
    premises: tuple = ()
    pair: tuple = ()
    conversion: ConversionSequence | None = None


SYM_RULES = {"axiom": 0, "cut": 2, "contr-left": 1, "contr-right": 1, "weak-left": 1, "weak-right": 1}


def sym_nodes(p: SymProof, path: tuple = ()) -> Iterator[tuple[tuple, SymProof]]:
    yield path, p
    for i, q in enumerate(p.premises):
        yield from sym_nodes(q, path + (i,))


def sym_cut_count(p: SymProof) -> int:
    return sum(1 for _, n in sym_nodes(p) if n.rule == "cut")


def sym_is_cut_free(p: SymProof) -> bool:
    return sym_cut_count(p) == 0


def _contains(props: Sequence, a) -> bool:
    return any(alpha_equal(a, p) for p in props)


def check_sym_proof(R: RewriteSystem, p: SymProof) -> CheckReport:
    report = CheckReport()

    def fail(path, node, cond, why):
        report.failures.append(Failure(path, node.rule, cond, why))

    for path, node in sym_nodes(p):
        seq = node.conclusion
        if not all(is_atomic(q) for q in seq.props()):
            fail(path, node, "atomic", "non-atomic proposition in the symmetric atomic fragment")
            continue
        if SYM_RULES.get(node.rule) != len(node.premises):
            fail(path, node, "schema", f"bad rule or premise count for {node.rule}")
            continue
        if node.rule in ("axiom", "cut"):
            if len(node.pair) != 2 or node.conversion is None:
                fail(path, node, "schema", "missing pair or conversion")
                continue
            c = node.conversion
            errs = c.errors(R)
            if errs:
                fail(path, node, "conversion", "; ".join(errs))
            if not (alpha_equal(c.first, node.pair[0]) and alpha_equal(c.last, node.pair[1])):
                fail(path, node, "conversion", "conversion does not connect the annotated pair")
        if node.rule == "axiom":
            a, b = node.pair
            if not (_contains(seq.gamma, a) and _contains(seq.delta, b)):
                fail(path, node, "axiom", "annotated pair is not in the sequent")
        elif node.rule == "cut":
            c1, c2 = node.pair
            left, right = (q.conclusion for q in node.premises)
            if not (msame(left.gamma, seq.gamma) and msame(left.delta, (c1,) + seq.delta)):
                fail(path, node, "context", "left premise must be the conclusion plus C1 on the right")
            if not (msame(right.gamma, seq.gamma + (c2,)) and msame(right.delta, seq.delta)):
                fail(path, node, "context", "right premise must be the conclusion plus C2 on the left")
        else:
            prem = node.premises[0].conclusion
            left_side = node.rule.endswith("left")
            big, small = (prem, seq) if node.rule.startswith("contr") else (seq, prem)
            bs, ss = (big.gamma, small.gamma) if left_side else (big.delta, small.delta)
            same_other = msame(big.delta, small.delta) if left_side else msame(big.gamma, small.gamma)
            extra, lack = mremove(bs, ss)
            ok = same_other and not lack and len(extra) == 1
            if ok and node.rule.startswith("contr"):
                ok = _contains(ss, extra[0])
            if not ok:
                fail(path, node, "context", f"sequents do not match the {node.rule} schema")
    return report


def _pair_of(p: SymProof) -> tuple:
    """(X, Y, X == Y) with X on the left and Y on the right of a cut-free proof."""
    if p.rule == "axiom":
        return p.pair[0], p.pair[1], p.conversion
    if p.rule == "cut":
        raise ValueError("proof is not cut free")
    return _pair_of(p.premises[0])


def _reduce_cut(node: SymProof) -> SymProof:
    seq = node.conclusion
    c1, c2 = node.pair
    x1, y1, conv1 = _pair_of(node.premises[0])
    x2, y2, conv2 = _pair_of(node.premises[1])
    # the pairs survive into the conclusion unless they use the cut formulas
    rest_delta, _ = mremove(node.premises[0].conclusion.delta, [c1])
    rest_gamma, _ = mremove(node.premises[1].conclusion.gamma, [c2])
    if _contains(rest_delta, y1):
        return SymProof("axiom", seq, (), (x1, y1), conv1)
    if _contains(rest_gamma, x2):
        return SymProof("axiom", seq, (), (x2, y2), conv2)
    conv = conv1 + node.conversion + conv2
    return SymProof("axiom", seq, (), (x1, y2), conv)


def _highest_cut(p: SymProof, path=()):
    for i, q in enumerate(p.premises):
        found = _highest_cut(q, path + (i,))
        if found is not None:
            return found
    if p.rule == "cut":
        return path
    return None


def _replace(p: SymProof, path, new: SymProof) -> SymProof:
    if not path:
        return new
    prem = list(p.premises)
    prem[path[0]] = _replace(prem[path[0]], path[1:], new)
    return SymProof(p.rule, p.conclusion, tuple(prem), p.pair, p.conversion)


def _at(p: SymProof, path) -> SymProof:
    for i in path:
        p = p.premises[i]
    return p


def iter_symmetric_reduction(p: SymProof) -> Iterator[SymProof]:
    """Successive proofs, each with the highest cut replaced by an axiom."""
    while True:
        path = _highest_cut(p)
        if path is None:
            return
        p = _replace(p, path, _reduce_cut(_at(p, path)))
        yield p


def reduce_symmetric_atomic(p: SymProof) -> SymProof:
    for p in iter_symmetric_reduction(p):
        pass
    return p


# -- deciders ----------------------------------------------------------------


def _not_convertible(R, s: Sequent, budget: Budget) -> NotProvable | Unknown:
    fillers = _fillers(R, s.props())
    classes = []
    for a in s.gamma:
        cls = conversion_class(R, a, budget, fillers)
        if not cls.complete:
            return Unknown("conversion class truncated", {"seed": a})
        hit = next((b for b in s.delta if b in cls), None)
        if hit is not None:
            return Unknown("convertible pair found but no sequence within budget", {"left": a, "right": hit})
        classes.append({"seed": a, "class": list(cls.elements)})
    return NotProvable({"classes": classes, "complete": True})


def provable_atomic_sym(R: RewriteSystem, s: Sequent, budget: Budget = DEFAULT_BUDGET) -> AtomicAnswer:
    require_atomic(s)
    for a in s.gamma:
        for b in s.delta:
            c = convertible(R, a, b, budget)
            if c is not None:
                return Provable(SymProof("axiom", s, (), (a, b), c), c)
    return _not_convertible(R, s, budget)


def proof_from_conversion(R: RewriteSystem, s: Sequent, a, b, c: ConversionSequence) -> Proof:
    """One cut per peak of ``c``, splitting at the leftmost peak."""
    c.validate(R)
    if not (alpha_equal(c.first, a) and alpha_equal(c.last, b)):
        raise InvalidSequence("conversion does not connect the given propositions")
    if not (_contains(s.gamma, a) and _contains(s.delta, b)):
        raise InvalidSequence("propositions do not occur on the expected sides")

    def build(gamma: tuple, delta: tuple, c: ConversionSequence) -> Proof:
        peaks = find_peaks(c)
        if not peaks:
            return axiom(valley_bottom(c), gamma, delta)
        i = peaks[0]
        ci = c.objects[i]
        left = build(gamma, (ci,) + delta, c.slice(0, i))
        right = build(gamma + (ci,), delta, c.slice(i, len(c.objects) - 1))
        return cut(ci, left, right, Sequent(gamma, delta))

    return build(tuple(s.gamma), tuple(s.delta), c)


def provable_atomic_asym(R: RewriteSystem, s: Sequent, budget: Budget = DEFAULT_BUDGET) -> AtomicAnswer:
    require_atomic(s)
    for a in s.gamma:
        for b in s.delta:
            c = convertible(R, a, b, budget)
            if c is not None:
                return Provable(proof_from_conversion(R, s, a, b, c), c)
    return _not_convertible(R, s, budget)


def cut_free_provable_atomic(R: RewriteSystem, s: Sequent, budget: Budget = DEFAULT_BUDGET,
                             cache: ReductCache | None = None) -> AtomicAnswer:
    require_atomic(s)
    cache = cache or ReductCache(R, budget)
    exact = True
    for a in s.gamma:
        for b in s.delta:
            ra, rb = cache(a), cache(b)
            j = join_sets(ra, rb)
            if j is not None:
                return Provable(axiom(j.reduct, s.gamma, s.delta), j)
            exact &= ra.complete and rb.complete
    if not exact:
        return Unknown("reduct closure truncated")
    closures = [{"seed": p, "reducts": list(cache(p).elements)} for p in s.props()]
    return NotProvable({"closures": closures, "complete": True})


# -- cut redundancy versus confluence ------------------------------------------


@dataclass
class EquivalenceReport:
    cut_redundant: bool | None
    confluence: object
    pairs_checked: int
    complete: bool
    witness: dict | None = None
    detail: dict = field(default_factory=dict)

    @property
    def confluent(self) -> bool | None:
        status = self.confluence.status
        return None if status == "unknown" else status == "holds"

    @property
    def agree(self) -> bool | None:
        if self.cut_redundant is None or self.confluent is None:
            return None
        return self.cut_redundant == self.confluent


def _predicate(R: RewriteSystem) -> str:
    name = "P"
    while name in R.signature.predicate_symbols and R.signature.predicate_symbols[name] != 1:
        name += "'"
    return name


def cut_redundancy_vs_confluence(R: RewriteSystem, universe: Sequence, budget: Budget = DEFAULT_BUDGET) -> EquivalenceReport:
    """Check every atomic sequent P(t) |- P(u) with t == u inside the universe closure.

    Convertibility is connectivity in the one-step graph of the reduct
    closure of the universe.  Cut redundancy holds when each such sequent
    has a cut-free proof; the result is compared with ``confluent``.
    """
    cache = ReductCache(R, budget)
    complete = True
    nodes: dict = {}
    for t in universe:
        rs = cache(t)
        complete &= rs.complete
        for o in rs.elements:
            nodes.setdefault(key_of(o), o)
    parent = {k: k for k in nodes}
    edge: dict = {}

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    for k, o in nodes.items():
        for st in one_step_reducts(R, o):
            k2 = key_of(st.result)
            if k2 not in nodes:
                continue
            edge.setdefault(k, []).append((k2, st))
            ra, rb = find(k), find(k2)
            if ra != rb:
                parent[rb] = ra
    comps: dict = {}
    for k in nodes:
        comps.setdefault(find(k), []).append(k)

    pred = _predicate(R)
    conf = confluent(R, universe, budget, cache)
    checked = 0
    witness = None
    redundant: bool | None = True
    for members in comps.values():
        for i, ku in enumerate(members):
            for kv in members[i + 1:]:
                checked += 1
                ru, rv = cache(nodes[ku]), cache(nodes[kv])
                if join_sets(ru, rv) is not None:
                    continue
                if not (ru.complete and rv.complete):
                    redundant = None if redundant is not False else False
                    continue
                if witness is None:
                    t, u = nodes[ku], nodes[kv]
                    s = Sequent((Atom(pred, (t,)),), (Atom(pred, (u,)),))
                    conv = convertible(R, t, u, budget)
                    proof = None
                    if conv is not None:
                        pconv = _lift(conv, pred)
                        proof = proof_from_conversion(R, s, s.gamma[0], s.delta[0], pconv)
                    witness = {"left": t, "right": u, "sequent": s, "conversion": conv, "proof_with_cuts": proof}
                redundant = False
    return EquivalenceReport(redundant, conf, checked, complete, witness,
                             {"universe": len(universe), "closure": len(nodes), "components": len(comps)})


def _lift(c: ConversionSequence, pred: str) -> ConversionSequence:
    """A term conversion seen inside the atom ``pred(_)``."""
    from .rewriting import SeqStep

    objs = tuple(Atom(pred, (t,)) for t in c.objects)
    steps = tuple(SeqStep(s.direction, s.rule, (0,) + tuple(s.position)) for s in c.steps)
    return ConversionSequence(objs, steps)


def lift_conversion(c: ConversionSequence, pred: str = "P") -> ConversionSequence:
    return _lift(c, pred)


def sequent_pair(t, u, pred: str = "P") -> Sequent:
    return Sequent((Atom(pred, (t,)),), (Atom(pred, (u,)),))


def sym_from_asym(R: RewriteSystem, p: Proof, budget: Budget = DEFAULT_BUDGET) -> SymProof:
    """Read an atomic asymmetric proof as a symmetric one.

    Axioms become the valley through their annotation; cuts connect the
    cut proposition to itself.
    """
    seq = p.conclusion
    prems = tuple(sym_from_asym(R, q, budget) for q in p.premises)
    if p.rule == "axiom":
        A = p.annotations[0]
        cache = ReductCache(R, budget)
        for a in seq.gamma:
            ra = cache(a)
            if A not in ra:
                continue
            for b in seq.delta:
                rb = cache(b)
                if A in rb:
                    conv = ra.derivation_to(A) + rb.derivation_to(A).reversed()
                    return SymProof("axiom", seq, (), (a, b), conv)
        raise ValueError(f"axiom on {A} has no valid pair in {seq}")
    if p.rule == "cut":
        C = p.annotations[0]
        return SymProof("cut", seq, prems, (C, C), ConversionSequence((C,), ()))
    if p.rule not in SYM_RULES:
        raise NonAtomicInput(f"rule {p.rule} is outside the atomic fragment")
    return SymProof(p.rule, seq, prems)


__all__ = [
    "AtomicAnswer", "EquivalenceReport", "NonAtomicInput", "NotProvable", "Provable", "SymProof",
    "check_sym_proof", "cut_free_provable_atomic", "cut_redundancy_vs_confluence",
    "iter_symmetric_reduction", "lift_conversion", "proof_from_conversion", "provable_atomic_asym",
    "provable_atomic_sym", "reduce_symmetric_atomic", "sequent_pair", "sym_cut_count", "sym_from_asym",
]
