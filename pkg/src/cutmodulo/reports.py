"""JSON encodings of verdicts, answers, traces and whole command runs.

Objects are written in the concrete syntax, so every proof or problem
inside a report can be parsed back and re-checked.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .analysis import Fails, Unknown
from .elimination import Choice, ReducedToAxiom, ShortCircuit, SplitIntoTwoCuts, Stuck
from .kernel import Proof, Sequent
from .rewriting import ConversionSequence, Join, ReductSet
from .syntax import ProblemFile, render_problem, show, show_conversion
from .terms import _Node

SCHEMA_VERSION = 1


def digest(*texts: str) -> str:
    h = hashlib.sha256()
    for t in texts:
        h.update(t.encode("utf-8"))
        h.update(b"\0")
    return h.hexdigest()


def conversion_json(c: ConversionSequence, R=None) -> dict:
    return {
        "objects": [show(o) for o in c.objects],
        "steps": [{"direction": s.direction, "rule": R.label(s.rule) if R is not None else s.rule,
                   "position": list(s.position)} for s in c.steps],
        "text": show_conversion(c, R=R),
    }


def conversion_from_json(data: dict, R) -> ConversionSequence:
    """Rebuild a conversion written by :func:`conversion_json` and validate it against ``R``."""
    from .rewriting import SeqStep
    from .syntax import ParseError, parse_prop, parse_term

    def obj(text):
        try:
            return parse_term(text, R.signature)
        except ParseError:
            return parse_prop(text, R.signature)

    steps = tuple(SeqStep(s["direction"], R.index_of(s["rule"]), tuple(s["position"])) for s in data["steps"])
    c = ConversionSequence(tuple(obj(o) for o in data["objects"]), steps)
    c.validate(R)
    return c


def problem_witness(R, proof: Proof, role: str = "proof") -> dict:
    """A self-contained problem file whose proof can be fed back to ``check``."""
    text = render_problem(ProblemFile(R, proof.conclusion, proof))
    return {"kind": "problem", "role": role, "text": text}


def conversion_witness(c: ConversionSequence, R, role: str) -> dict:
    return {"kind": "conversion", "role": role, **conversion_json(c, R)}


def encode(o, R=None):
    """Best-effort JSON view of library objects."""
    if o is None or isinstance(o, (bool, int, float, str)):
        return o
    if isinstance(o, ConversionSequence):
        return conversion_json(o, R)
    if isinstance(o, Join):
        return {"reduct": show(o.reduct), "left": conversion_json(o.left, R), "right": conversion_json(o.right, R)}
    if isinstance(o, ReductSet):
        return {"seed": show(o.seed), "elements": [show(x) for x in o.elements], "complete": o.complete}
    if isinstance(o, (Proof, Sequent)):
        return show(o)
    if isinstance(o, dict):
        return {str(k): encode(v, R) for k, v in o.items()}
    if isinstance(o, (list, tuple, set, frozenset)):
        return [encode(x, R) for x in o]
    if isinstance(o, _Node):
        return show(o)
    return str(o)


def verdict_json(v, R=None) -> dict:
    out = {"status": v.status}
    if isinstance(v, Fails):
        out["witness"] = encode(v.witness, R)
    if isinstance(v, Unknown):
        out["reason"] = v.reason
    out["detail"] = encode(v.detail, R)
    return out


def choice_json(c: Choice) -> dict:
    out = {"case": c.case}
    for k in ("c1", "c2", "joiner"):
        if getattr(c, k) is not None:
            out[k] = show(getattr(c, k))
    return out


def outcome_json(o, R=None) -> dict:
    out = {"kind": o.kind}
    if isinstance(o, (ReducedToAxiom, ShortCircuit)):
        out["reduct"] = encode(o.reduct)
        if isinstance(o, ShortCircuit):
            out["side"] = o.side
    elif isinstance(o, SplitIntoTwoCuts):
        out.update(cut=show(o.cut_prop), c1=show(o.c1), c2=show(o.c2), joiner=show(o.joiner))
    elif isinstance(o, Stuck):
        out.update(cut=show(o.cut_prop), divergence=conversion_json(o.divergence, R),
                   left_reducts=[show(x) for x in o.left_reducts],
                   right_reducts=[show(x) for x in o.right_reducts])
    return out


def trace_json(trace, R=None) -> list[dict]:
    out = []
    for e in trace:
        out.append({
            "step": e.step,
            "path": list(e.path),
            "event": e.event,
            "cut": encode(e.cut_prop),
            "outcome": outcome_json(e.outcome, R),
            "choice": choice_json(e.choice),
            "cuts_before": [encode(c) for c in e.cuts_before],
            "cuts_after": [encode(c) for c in e.cuts_after],
            "events": [{"kind": k, "props": [show(p) for p in ps]} for k, ps in e.events],
        })
    return out


@dataclass
class RunReport:
    command: str
    inputs_digest: str
    outcome: str
    exit_code: int
    witnesses: list = field(default_factory=list)
    trace: list | None = None
    trace_file: str | None = None
    budgets: dict = field(default_factory=dict)
    complete: bool | None = None
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "inputs_digest": self.inputs_digest,
            "outcome": self.outcome,
            "exit_code": self.exit_code,
            "witnesses": self.witnesses,
            "trace": self.trace,
            "trace_file": self.trace_file,
            "budgets": self.budgets,
            "complete": self.complete,
            "detail": self.detail,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


__all__ = [
    "RunReport", "choice_json", "conversion_from_json", "conversion_json", "conversion_witness", "digest", "encode",
    "outcome_json", "problem_witness", "trace_json", "verdict_json",
]
