"""Command-line interface: ``cutmod <command> ...``.

Exit codes: 0 success or valid, 1 invalid or refuted, 2 unknown or budget
exhausted, 3 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .analysis import NotTerminating, confluent, default_universe, locally_confluent, terminating
from .atomic import (
    NonAtomicInput,
    NotProvable,
    Provable,
    check_sym_proof,
    cut_free_provable_atomic,
    cut_redundancy_vs_confluence,
    provable_atomic_asym,
    provable_atomic_sym,
    sym_from_asym,
    sym_nodes,
)
from .elimination import (
    BudgetExhausted,
    CutFree,
    Failed,
    PreconditionViolation,
    RuleOrder,
    eliminate_cuts_atomic_asym,
    eliminate_sym_atomic,
    instrument_measure,
    load_policy,
    policy_json,
)
from .full import NormalizationFailure, eliminate_cuts_full
from .kernel import Failure, check_proof, nodes
from .reports import (
    RunReport,
    conversion_witness,
    digest,
    encode,
    outcome_json,
    problem_witness,
    trace_json,
    verdict_json,
)
from .rewriting import Budget
from .suites import SUITES, run_suite
from .syntax import ParseError, parse_problem, show, show_conversion, show_derivation, show_proof
from .terms import ArityError

OK, REFUTED, UNKNOWN, USAGE = 0, 1, 2, 3
_VERDICT_CODE = {"holds": OK, "fails": REFUTED, "unknown": UNKNOWN}


class UsageError(Exception):
    pass


def _budget(args) -> Budget:
    n = getattr(args, "budget", None)
    return Budget(max_objects=n) if n else Budget()


def _load(args):
    path = Path(args.problem)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return parse_problem(text), text
    except ParseError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _need(pf, what: str):
    value = getattr(pf, what)
    if value is None:
        raise UsageError(f"the problem file has no {what} section")
    return value


def _proof_text(p, numerals: bool) -> str:
    return show_proof(p, numerals, indent=2) + "\n  derivation:\n" + show_derivation(p, numerals, indent=4)


# -- commands ------------------------------------------------------------------


def cmd_check(args) -> RunReport:
    pf, text = _load(args)
    proof = _need(pf, "proof")
    rep = check_proof(pf.system, proof, _budget(args))
    if pf.sequent is not None and not proof.conclusion.same(pf.sequent):
        rep.failures.append(Failure((), proof.rule, "end-sequent", "the proof does not prove the stated sequent"))
    code = OK if rep.valid else (UNKNOWN if rep.budget_exhausted else REFUTED)
    outcome = {OK: "valid", REFUTED: "invalid", UNKNOWN: "budget-exhausted"}[code]
    witnesses = []
    if args.witnesses:
        for path, ds in sorted(rep.witnesses.items()):
            for d in ds:
                w = conversion_witness(d, pf.system, "side-condition")
                w["path"] = list(path)
                witnesses.append(w)
    failures = [{"path": list(f.path), "rule": f.rule, "condition": f.condition,
                 "explanation": f.explanation, "kind": f.kind} for f in rep.failures]
    lines = [outcome]
    lines += [f"  at {'.'.join(map(str, f['path'])) or 'root'} ({f['rule']}, {f['condition']}): {f['explanation']}"
              for f in failures]
    lines += [f"  witness at {'.'.join(map(str, w['path'])) or 'root'}: {w['text']}"
              for w in witnesses if w["steps"]]
    return RunReport("check", digest(text), outcome, code, witnesses, budgets={"max_objects": _budget(args).max_objects},
                     complete=not rep.budget_exhausted, detail={"failures": failures, "text": "\n".join(lines)})


def cmd_prove_atomic(args) -> RunReport:
    pf, text = _load(args)
    s = _need(pf, "sequent")
    budget = _budget(args)
    fn = {"sym": provable_atomic_sym, "asym": provable_atomic_asym, "cutfree": cut_free_provable_atomic}[args.mode]
    try:
        ans = fn(pf.system, s, budget)
    except NonAtomicInput as exc:
        raise UsageError(f"non-atomic input: {exc}") from exc
    num = pf.signature.has_numerals()
    witnesses, detail = [], {"mode": args.mode}
    if isinstance(ans, Provable):
        code, outcome = OK, "provable"
        if args.mode == "sym":
            detail["proof"] = encode(ans.proof.conversion, pf.system)
            detail["sym_valid"] = check_sym_proof(pf.system, ans.proof).valid
            witnesses.append(conversion_witness(ans.proof.conversion, pf.system, "axiom-conversion"))
            body = f"axiom on {show(ans.proof.pair[0], num)} == {show(ans.proof.pair[1], num)}\n  " + \
                show_conversion(ans.proof.conversion, num, pf.system)
        else:
            witnesses.append(problem_witness(pf.system, ans.proof))
            body = _proof_text(ans.proof, num)
        detail["cuts"] = sum(1 for _ in _cuts(ans.proof)) if args.mode != "sym" else 0
    elif isinstance(ans, NotProvable):
        code, outcome = REFUTED, "not-provable"
        detail["certificate"] = encode(ans.certificate, pf.system)
        body = "\n".join(f"  {show(c['seed'], num)}: {{{', '.join(show(x, num) for x in c['reducts'])}}}"
                         for c in ans.certificate.get("closures", []))
    else:
        code, outcome = UNKNOWN, "unknown"
        detail["reason"] = ans.reason
        body = f"  {ans.reason}"
    detail["text"] = f"{outcome}\n{body}"
    return RunReport("prove-atomic", digest(text), outcome, code, witnesses,
                     budgets={"max_objects": budget.max_objects}, complete=code != UNKNOWN, detail=detail)


def _cuts(p):
    return (n for _, n in nodes(p) if n.rule == "cut")


def cmd_eliminate(args) -> RunReport:
    pf, text = _load(args)
    proof = _need(pf, "proof")
    budget = _budget(args)
    policy = RuleOrder()
    policy_text = ""
    if args.policy:
        try:
            policy_text = Path(args.policy).read_text(encoding="utf-8")
            policy = load_policy(json.loads(policy_text), pf.signature)
        except (OSError, ValueError, ParseError) as exc:
            raise UsageError(f"bad policy file {args.policy}: {exc}") from exc
    R = pf.system
    num = pf.signature.has_numerals()
    try:
        if args.engine == "sym-atomic":
            res = eliminate_sym_atomic(sym_from_asym(R, proof, budget))
        elif args.engine == "newman":
            res = eliminate_cuts_atomic_asym(R, proof, policy, args.steps, budget)
        else:
            res = eliminate_cuts_full(R, proof, policy, args.steps, budget)
    except (NonAtomicInput, PreconditionViolation, NormalizationFailure) as exc:
        raise UsageError(f"{args.engine} engine cannot run on this proof: {exc}") from exc
    code = {CutFree: OK, Failed: REFUTED, BudgetExhausted: UNKNOWN}[type(res)]
    witnesses = []
    detail = {"engine": args.engine, "policy": policy_json(policy), "steps": len(res.trace)}
    if args.engine == "sym-atomic":
        final = res.proof
        detail["result"] = f"axiom on {show(final.pair[0], num)} == {show(final.pair[1], num)}" \
            if final.rule == "axiom" else final.rule
        body = detail["result"]
        for _, n in sym_nodes(final):
            if n.rule == "axiom":
                witnesses.append(conversion_witness(n.conversion, R, "axiom-conversion"))
    else:
        witnesses.append(problem_witness(R, res.proof, "result"))
        body = _proof_text(res.proof, num)
    if isinstance(res, Failed):
        detail["stuck"] = outcome_json(res.stuck, R)
        witnesses.append(conversion_witness(res.stuck.divergence, R, "divergence"))
        body += "\n  stuck on the divergence " + show_conversion(res.stuck.divergence, num, R)
    if isinstance(res, BudgetExhausted):
        detail["reason"] = res.reason
    if args.engine == "newman" and isinstance(res, CutFree):
        try:
            m = instrument_measure(R, res.trace, budget=budget)
            detail["measure"] = {"decreasing": m.decreasing, "steps_checked": m.steps_checked,
                                 "violation": encode(m.violation)}
        except NotTerminating as exc:
            detail["measure"] = {"not_terminating": conversion_witness(exc.cycle, R, "cycle")}
    trace = trace_json(res.trace, R)
    lines = [f"{res.status} after {len(res.trace)} steps", body, "trace:"]
    for e in trace:
        lines.append(f"  {e['step']}: [{e['event']}] cut {e['cut']}: {_describe(e)}")
    detail["text"] = "\n".join(lines)
    return RunReport("eliminate", digest(text, policy_text), res.status, code, witnesses, trace=trace,
                     budgets={"steps": args.steps, "max_objects": budget.max_objects},
                     complete=not isinstance(res, BudgetExhausted), detail=detail)


def _describe(e: dict) -> str:
    o = e["outcome"]
    if e["event"] == "elim":
        return ", ".join(f"{x['kind']}({'; '.join(x['props'])})" for x in e["events"]) or "structural"
    if o["kind"] == "split":
        return f"split into {o['c1']} and {o['c2']}, joined at {o['joiner']}"
    if o["kind"] == "stuck":
        return f"stuck on {o['divergence']['text']}"
    return f"{o['kind']} {o.get('reduct', '')}".rstrip()


def cmd_analyze(args) -> RunReport:
    pf, text = _load(args)
    R = pf.system
    budget = _budget(args)
    extra = [t for r in R.rules for t in (r.lhs, r.rhs)]
    if pf.sequent is not None:
        extra += [a for q in pf.sequent.props() for a in getattr(q, "args", ())]
    universe = default_universe(R, args.universe_depth, extra)
    witnesses = []
    num = pf.signature.has_numerals()
    if args.check == "local-confluence":
        v = locally_confluent(R, budget)
    elif args.check == "confluence":
        v = confluent(R, universe, budget)
        if v.status == "fails":
            w = v.witness
            witnesses.append(conversion_witness(w["left_derivation"].reversed() + w["right_derivation"], R, "peak"))
    elif args.check == "termination":
        v = terminating(R, universe, budget)
        if v.status == "fails":
            witnesses.append(conversion_witness(v.witness["cycle"], R, "cycle"))
    else:
        rep = cut_redundancy_vs_confluence(R, universe, budget)
        code = OK if rep.agree else (UNKNOWN if rep.agree is None else REFUTED)
        outcome = {OK: "agree", REFUTED: "disagree", UNKNOWN: "unknown"}[code]
        detail = {"cut_redundant": rep.cut_redundant, "confluence": verdict_json(rep.confluence, R),
                  "pairs_checked": rep.pairs_checked, **encode(rep.detail)}
        if rep.witness is not None:
            detail["witness"] = {"left": show(rep.witness["left"], num), "right": show(rep.witness["right"], num)}
            if rep.witness.get("proof_with_cuts") is not None:
                witnesses.append(problem_witness(R, rep.witness["proof_with_cuts"], "cut-needed"))
        detail["text"] = (f"{outcome}: cut redundant = {rep.cut_redundant}, confluence = {rep.confluence.status}"
                          + (f"\n  witness pair ({detail['witness']['left']}, {detail['witness']['right']})"
                             if "witness" in detail else ""))
        return RunReport("analyze", digest(text), outcome, code, witnesses,
                         budgets={"max_objects": budget.max_objects, "universe_depth": args.universe_depth},
                         complete=rep.complete, detail=detail)
    detail = {"check": args.check, "universe": len(universe), **verdict_json(v, R)}
    lines = [f"{args.check}: {v.status}"]
    if v.status == "fails" and args.check == "confluence":
        w = v.witness
        lines.append(f"  seed {show(w['seed'], num)} reduces to {show(w['left'], num)} and {show(w['right'], num)},"
                     " which have no common reduct")
    for w in witnesses:
        lines.append(f"  {w['role']}: {w['text']}")
    if v.status == "unknown":
        lines.append(f"  {v.reason}")
    detail["text"] = "\n".join(lines)
    return RunReport("analyze", digest(text), v.status, _VERDICT_CODE[v.status], witnesses,
                     budgets={"max_objects": budget.max_objects, "universe_depth": args.universe_depth},
                     complete=v.status != "unknown", detail=detail)


def cmd_random_test(args) -> RunReport:
    rep = run_suite(args.suite, args.count, args.seed, _budget(args))
    code = OK if rep.ok else REFUTED
    outcome = "passed" if rep.ok else "violations"
    detail = {"suite": rep.suite, "seed": rep.seed, "count": rep.count, "checked": rep.checked,
              "skipped": rep.skipped, "violations": rep.violations, "stats": rep.stats}
    lines = [f"{rep.suite}: {outcome} ({rep.checked} checked, {rep.skipped} skipped, "
             f"{len(rep.violations)} violations)"]
    for v in rep.violations[:10]:
        lines.append(f"  seed {v['seed']}: {v['violation']}")
    detail["text"] = "\n".join(lines)
    return RunReport("random-test", digest(args.suite, str(args.count), str(args.seed)), outcome, code,
                     budgets={"max_objects": _budget(args).max_objects}, complete=True, detail=detail)


# -- entry point ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # accepted before or after the command; SUPPRESS keeps a later default from hiding an earlier value
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)
    common.add_argument("--trace", metavar="FILE", default=argparse.SUPPRESS,
                        help="write the trace as JSON to FILE")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="cutmod", description="Cut elimination modulo rewrite systems.",
                                parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="check a proof")
    c.add_argument("--problem", required=True)
    c.add_argument("--budget", type=int)
    c.add_argument("--witnesses", action="store_true")
    c.set_defaults(run=cmd_check)

    c = sub.add_parser("prove-atomic", parents=[common], help="decide an atomic sequent")
    c.add_argument("--problem", required=True)
    c.add_argument("--mode", choices=("sym", "asym", "cutfree"), required=True)
    c.add_argument("--budget", type=int)
    c.set_defaults(run=cmd_prove_atomic)

    c = sub.add_parser("eliminate", parents=[common], help="eliminate the cuts of a proof")
    c.add_argument("--problem", required=True)
    c.add_argument("--engine", choices=("sym-atomic", "newman", "full"), required=True)
    c.add_argument("--policy", metavar="FILE")
    c.add_argument("--steps", type=int, default=1000)
    c.add_argument("--budget", type=int)
    c.set_defaults(run=cmd_eliminate)

    c = sub.add_parser("analyze", parents=[common], help="analyse the rewrite system")
    c.add_argument("--problem", required=True)
    c.add_argument("--check", choices=("local-confluence", "confluence", "termination", "equivalence"),
                   required=True)
    c.add_argument("--universe-depth", type=int, default=3)
    c.add_argument("--budget", type=int)
    c.set_defaults(run=cmd_analyze)

    c = sub.add_parser("random-test", parents=[common], help="run a property suite")
    c.add_argument("--suite", choices=SUITES, required=True)
    c.add_argument("--count", type=int, required=True)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--budget", type=int)
    c.set_defaults(run=cmd_random_test)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return OK if exc.code == 0 else USAGE
    fmt, trace_file = getattr(args, "format", "text"), getattr(args, "trace", None)
    logging.basicConfig(level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(message)s")
    try:
        for name in ("budget", "steps", "count"):
            if getattr(args, name, None) is not None and getattr(args, name) < 0:
                raise UsageError(f"--{name} must be non-negative")
        report = args.run(args)
    except (UsageError, ArityError) as exc:
        print(f"cutmod: error: {exc}", file=sys.stderr)
        return USAGE
    if trace_file and report.trace is not None:
        Path(trace_file).write_text(json.dumps(report.trace, indent=2) + "\n", encoding="utf-8")
        report.trace_file = trace_file
    if fmt == "json":
        print(report.dumps())
    else:
        print(report.detail.get("text", report.outcome))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
