"""Property suites over randomly generated ground systems.

Each suite walks the seeds ``seed .. seed + count - 1``; the system and
every random choice for seed ``s`` depend on ``s`` alone, so a violation
can be replayed from its recorded seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .analysis import confluent, locally_confluent, terminating
from .atomic import (
    check_sym_proof,
    cut_redundancy_vs_confluence,
    iter_symmetric_reduction,
    lift_conversion,
    proof_from_conversion,
    sequent_pair,
    sym_cut_count,
    sym_nodes,
)
from .elimination import (
    CutFree,
    Failed,
    RuleOrder,
    eliminate_cuts_atomic_asym,
    instrument_measure,
)
from .generator import (
    DEFAULT_PARAMS,
    GeneratorParams,
    constant_universe,
    generate_random_system,
    random_atomic_proof,
    random_sym_proof,
)
from .kernel import check_proof, cut_propositions
from .rewriting import DEFAULT_BUDGET, Budget, ReductCache, convertible, key_of, one_step_reducts
from .syntax import render_system

SUITES = ("newman", "main-equivalence", "prop6", "prop7", "sym-steps")


@dataclass
class SuiteReport:
    suite: str
    seed: int
    count: int
    checked: int = 0
    skipped: int = 0
    violations: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def bump(self, key: str, n: int = 1) -> None:
        self.stats[key] = self.stats.get(key, 0) + n


def _closures_complete(R, universe, cache) -> bool:
    return all(cache(t).complete for t in universe)


def convertible_pairs(R, universe, cache) -> list[tuple]:
    """Unordered pairs of distinct, convertible terms in the reduct closure of ``universe``."""
    nodes: dict = {}
    for t in universe:
        for o in cache(t).elements:
            nodes.setdefault(key_of(o), o)
    parent = {k: k for k in nodes}

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    for k, o in nodes.items():
        for st in one_step_reducts(R, o):
            k2 = key_of(st.result)
            if k2 in nodes:
                parent[find(k2)] = find(k)
    groups: dict = {}
    for k, o in nodes.items():
        groups.setdefault(find(k), []).append(o)
    return [(g[i], g[j]) for g in groups.values() for i in range(len(g)) for j in range(i + 1, len(g))]


def _pair_proof(R, t, u, budget):
    conv = convertible(R, t, u, budget)
    if conv is None:
        return None
    s = sequent_pair(t, u)
    return proof_from_conversion(R, s, s.gamma[0], s.delta[0], lift_conversion(conv))


def _violation(report: SuiteReport, seed: int, R, what: str, **detail) -> None:
    report.violations.append({"seed": seed, "system": render_system(R), "violation": what, **detail})


def _synthesized(R, universe, cache, rng, budget, random_proofs: int):
    """Proofs of every convertible pair plus a few random multi-peak proofs."""
    for t, u in convertible_pairs(R, universe, cache):
        p = _pair_proof(R, t, u, budget)
        if p is not None:
            yield (t, u), p
    for _ in range(random_proofs):
        yield None, random_atomic_proof(R, rng, universe)


def suite_newman(seed: int, R, report: SuiteReport, budget: Budget, random_proofs: int = 3) -> None:
    cache = ReductCache(R, budget)
    universe = constant_universe(R)
    lc = locally_confluent(R, budget)
    term = terminating(R, universe, budget)
    if lc.status != "holds" or term.status != "holds":
        report.skipped += 1
        return
    report.checked += 1
    conf = confluent(R, universe, budget, cache)
    if conf.status != "holds":
        _violation(report, seed, R, "local confluence and termination hold but confluence does not",
                   confluence=conf.status)
    rng = random.Random(seed)
    carrier = [o for t in universe for o in cache(t).elements]
    for pair, p in _synthesized(R, universe, cache, rng, budget, random_proofs):
        report.bump("proofs")
        res = eliminate_cuts_atomic_asym(R, p, RuleOrder(), step_budget=1000, budget=budget)
        if not isinstance(res, CutFree):
            _violation(report, seed, R, f"elimination returned {res.status}", sequent=str(p.conclusion))
            continue
        chk = check_proof(R, res.proof, budget)
        if not chk.valid:
            _violation(report, seed, R, "eliminated proof does not re-check", sequent=str(p.conclusion))
        if pair is not None:
            ann = res.proof.annotations[0] if res.proof.rule == "axiom" else None
            t, u = (cache(q) for q in p.conclusion.props())
            if ann is None or ann not in t or ann not in u:
                _violation(report, seed, R, "result is not an axiom on a common reduct", sequent=str(p.conclusion))
        m = instrument_measure(R, res.trace, carrier, budget)
        if not m.decreasing:
            _violation(report, seed, R, "cut multiset did not decrease", step=m.violation)


def suite_no_stuck(seed: int, R, report: SuiteReport, budget: Budget, random_proofs: int = 3,
                step_budget: int = 200) -> None:
    cache = ReductCache(R, budget)
    universe = constant_universe(R)
    if locally_confluent(R, budget).status != "holds" or not _closures_complete(R, universe, cache):
        report.skipped += 1
        return
    report.checked += 1
    rng = random.Random(seed)
    for _, p in _synthesized(R, universe, cache, rng, budget, random_proofs):
        report.bump("proofs")
        res = eliminate_cuts_atomic_asym(R, p, RuleOrder(), step_budget=step_budget, budget=budget)
        report.bump("steps", len(res.trace))
        report.bump(res.status)
        if isinstance(res, Failed):
            _violation(report, seed, R, "newman step returned Stuck on a locally confluent system",
                       sequent=str(p.conclusion), cut=str(res.stuck.cut_prop))


def suite_bounded_termination(seed: int, R, report: SuiteReport, budget: Budget, random_proofs: int = 3) -> None:
    """Termination of the Newman reducer with a strictly decreasing cut multiset.

    On locally confluent systems the run must be cut free within
    ``cuts * (longest derivation + 1)`` steps.  Otherwise it may end stuck,
    and must do so within the sum over cuts of ``2 ** (h + 1) - 1``, ``h``
    being the longest derivation from the cut proposition: every step
    either closes a cut or trades it for two cuts on one-step reducts.
    """
    cache = ReductCache(R, budget)
    universe = constant_universe(R)
    term = terminating(R, universe, budget)
    if term.status != "holds":
        report.skipped += 1
        return
    report.checked += 1
    lc = locally_confluent(R, budget).status == "holds"
    longest = term.detail["longest_derivation"]
    rng = random.Random(seed)
    carrier = [o for t in universe for o in cache(t).elements]
    for _, p in _synthesized(R, universe, cache, rng, budget, random_proofs):
        report.bump("proofs")
        cuts = cut_propositions(p)
        if lc:
            limit = max(1, len(cuts) * (longest + 1))
        else:
            limit = max(1, sum(2 ** (terminating(R, [c], budget).detail["longest_derivation"] + 1) - 1 for c in cuts))
        res = eliminate_cuts_atomic_asym(R, p, RuleOrder(), step_budget=limit, budget=budget)
        report.bump(res.status)
        if not isinstance(res, (CutFree, Failed)) or (lc and not isinstance(res, CutFree)):
            _violation(report, seed, R, f"not finished within {limit} steps: {res.status}", sequent=str(p.conclusion))
            continue
        m = instrument_measure(R, res.trace, carrier, budget)
        if not m.decreasing:
            _violation(report, seed, R, "cut multiset did not decrease", step=m.violation)


def suite_main_equivalence(seed: int, R, report: SuiteReport, budget: Budget) -> None:
    cache = ReductCache(R, budget)
    universe = constant_universe(R)
    if not _closures_complete(R, universe, cache):
        report.skipped += 1
        return
    rep = cut_redundancy_vs_confluence(R, universe, budget)
    if rep.agree is None:
        report.skipped += 1
        return
    report.checked += 1
    report.bump("confluent" if rep.confluent else "not-confluent")
    if not rep.agree:
        _violation(report, seed, R, "cut redundancy and confluence disagree",
                   cut_redundant=rep.cut_redundant, confluence=rep.confluence.status)


def suite_sym_steps(seed: int, R, report: SuiteReport, budget: Budget) -> None:
    rng = random.Random(seed)
    universe = constant_universe(R)
    p = random_sym_proof(R, rng, universe)
    if not check_sym_proof(R, p).valid:
        _violation(report, seed, R, "generated symmetric proof is invalid")
        return
    report.checked += 1
    cuts = sym_cut_count(p)
    report.bump("cuts", cuts)
    steps = list(iter_symmetric_reduction(p))
    final = steps[-1] if steps else p
    n = len(steps)
    if n != cuts:
        _violation(report, seed, R, f"{n} steps for {cuts} cuts")
    kinds = [n.rule for _, n in sym_nodes(final)]
    if kinds.count("axiom") != 1 or "cut" in kinds or (p.rule == "cut" and final.rule != "axiom"):
        _violation(report, seed, R, "result is not a single axiom under structural rules")
    if not final.conclusion.same(p.conclusion) or not check_sym_proof(R, final).valid:
        _violation(report, seed, R, "result does not re-check on the same end-sequent")


_RUNNERS = {
    "newman": suite_newman,
    "main-equivalence": suite_main_equivalence,
    "prop6": suite_no_stuck,
    "prop7": suite_bounded_termination,
    "sym-steps": suite_sym_steps,
}


def run_suite(name: str, count: int, seed: int = 0, budget: Budget = DEFAULT_BUDGET,
              params: GeneratorParams = DEFAULT_PARAMS) -> SuiteReport:
    if name not in _RUNNERS:
        raise ValueError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")
    report = SuiteReport(name, seed, count)
    for s in range(seed, seed + count):
        _RUNNERS[name](s, generate_random_system(s, params), report, budget)
    return report
