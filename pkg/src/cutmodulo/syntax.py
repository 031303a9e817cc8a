"""Concrete syntax: a tokenizer, a recursive-descent parser for problem
files, and printers that are inverse to it.

Terms are prefix-only.  A problem file looks like::

    sig 0/0, S/1, plus/2;
    pred eq/2;
    rules:
      [p0] plus(0, y) -> y
    sequent: forall x. eq(x, x) |- eq(plus(0, 2), 2)
    proof:
      (forall-left {x; eq(x, x); 2} (forall x. eq(x, x) |- eq(plus(0, 2), 2))
        (axiom {eq(2, 2)} (eq(2, 2) |- eq(plus(0, 2), 2))))

Without a ``sig`` line function symbols are inferred from use, and bare
identifiers of the shape ``u``..``z`` followed by digits or primes are
variables.  Without a ``pred`` line predicates are inferred likewise.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .kernel import RULES, Proof, Sequent
from .rewriting import ConversionSequence, RewriteRule, RewriteSystem
from .terms import (
    And,
    App,
    ArityError,
    Atom,
    Bottom,
    Exists,
    Forall,
    Implies,
    Or,
    Signature,
    Var,
    _Binary,
    _Quant,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"line {line}, column {column}: {message}" if line else message)
        self.line = line
        self.column = column
        self.message = message


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<op>->|\|-|=>|/\\|\\/|_\|_)
  | (?P<ident>[A-Za-z0-9_][A-Za-z0-9_']*(?:-[A-Za-z][A-Za-z0-9_']*)*)
  | (?P<punct>[(){}\[\],;.:/~])
    """,
    re.X,
)

_VARIABLE = re.compile(r"[u-z][0-9_']*$")
_KEYWORDS = {"forall", "exists"}
_SECTIONS = {"rules", "sequent", "proof"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), line, pos - line_start + 1))
        for i, ch in enumerate(m.group()):
            if ch == "\n":
                line, line_start = line + 1, pos + i + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


@dataclass
class ProblemFile:
    system: RewriteSystem
    sequent: Sequent | None = None
    proof: Proof | None = None

    @property
    def signature(self) -> Signature:
        return self.system.signature


class _Parser:
    def __init__(self, text: str, signature: Signature | None = None):
        self.toks = tokenize(text)
        self.i = 0
        self.bound: list[str] = []
        if signature is None:
            self.funcs: dict[str, int] = {}
            self.preds: dict[str, int] = {}
            self.funcs_fixed = self.preds_fixed = False
        else:
            self.funcs = dict(signature.function_symbols)
            self.preds = dict(signature.predicate_symbols)
            self.funcs_fixed = self.preds_fixed = True

    # -- token plumbing

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.kind != "eof" and self.tok.text == text

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        raise ParseError(message, tok.line, tok.column)

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = "end of input" if self.tok.kind == "eof" else repr(self.tok.text)
            self.error(f"expected {text!r}, found {found}")
        return self.advance()

    def ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != "ident":
            found = "end of input" if self.tok.kind == "eof" else repr(self.tok.text)
            self.error(f"expected {what}, found {found}")
        return self.advance()

    def eof(self):
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r}")

    # -- symbols

    def signature(self) -> Signature:
        return Signature(dict(self.funcs), dict(self.preds))

    def numerals(self) -> bool:
        return self.funcs.get("S") == 1 and self.funcs.get("0") == 0

    def use_function(self, tok: Token, arity: int):
        name = tok.text
        known = self.funcs.get(name)
        if known is None:
            if self.funcs_fixed:
                self.error(f"unbound function symbol {name}", tok)
            self.funcs[name] = arity
        elif known != arity:
            self.error(f"{name} expects {known} arguments, got {arity}", tok)

    def use_predicate(self, tok: Token, arity: int):
        name = tok.text
        known = self.preds.get(name)
        if known is None:
            if self.preds_fixed:
                self.error(f"unbound predicate symbol {name}", tok)
            self.preds[name] = arity
        elif known != arity:
            self.error(f"{name} expects {known} arguments, got {arity}", tok)

    # -- declarations

    def decls(self) -> dict[str, int]:
        out: dict[str, int] = {}
        while not self.at(";"):
            name = self.ident("symbol name")
            self.expect("/")
            n = self.ident("arity")
            if not n.text.isdigit():
                self.error("arity must be a natural number", n)
            if name.text in out:
                self.error(f"{name.text} declared twice", name)
            out[name.text] = int(n.text)
            if not self.at(";"):
                self.expect(",")
        self.expect(";")
        return out

    def header(self):
        while self.tok.kind == "ident" and self.tok.text in ("sig", "pred") and self.peek().text != "(":
            kw = self.advance().text
            if kw == "sig":
                self.funcs, self.funcs_fixed = self.decls(), True
            else:
                self.preds, self.preds_fixed = self.decls(), True

    # -- terms

    def term(self):
        tok = self.ident("term")
        name = tok.text
        if self.at("("):
            self.advance()
            args = [self.term()]
            while self.at(","):
                self.advance()
                args.append(self.term())
            self.expect(")")
            self.use_function(tok, len(args))
            return App(name, tuple(args))
        if name in self.bound:
            return Var(name)
        if name in self.funcs:
            self.use_function(tok, 0)
            return App(name)
        if name.isdigit():
            if self.numerals():
                t = App("0")
                for _ in range(int(name)):
                    t = App("S", (t,))
                return t
            if self.funcs_fixed:
                self.error(f"unbound constant {name}", tok)
            self.use_function(tok, 0)
            return App(name)
        if self.funcs_fixed or _VARIABLE.match(name):
            return Var(name)
        self.use_function(tok, 0)
        return App(name)

    # -- propositions

    def prop(self):
        if self.tok.text in _KEYWORDS and self.tok.kind == "ident":
            return self.quant()
        left = self.disj()
        if self.at("=>"):
            self.advance()
            return Implies(left, self.prop())
        return left

    def quant(self):
        kw = self.advance().text
        var = self.ident("bound variable")
        self.expect(".")
        self.bound.append(var.text)
        try:
            body = self.prop()
        finally:
            self.bound.pop()
        return (Forall if kw == "forall" else Exists)(var.text, body)

    def disj(self):
        p = self.conj()
        while self.at("\\/"):
            self.advance()
            p = Or(p, self.conj())
        return p

    def conj(self):
        p = self.unary()
        while self.at("/\\"):
            self.advance()
            p = And(p, self.unary())
        return p

    def unary(self):
        if self.at("~"):
            self.advance()
            return Implies(self.unary(), Bottom())
        if self.at("_|_"):
            self.advance()
            return Bottom()
        if self.at("("):
            self.advance()
            p = self.prop()
            self.expect(")")
            return p
        if self.tok.kind == "ident" and self.tok.text in _KEYWORDS:
            return self.quant()
        tok = self.ident("proposition")
        args = []
        if self.at("("):
            self.advance()
            args.append(self.term())
            while self.at(","):
                self.advance()
                args.append(self.term())
            self.expect(")")
        self.use_predicate(tok, len(args))
        return Atom(tok.text, tuple(args))

    # -- sequents and proofs

    def props_until(self, stops: tuple) -> list:
        out = []
        if any(self.at(s) for s in stops) or self.tok.kind == "eof":
            return out
        out.append(self.prop())
        while self.at(","):
            self.advance()
            out.append(self.prop())
        return out

    def sequent(self, stops=(")",)) -> Sequent:
        gamma = self.props_until(("|-",))
        self.expect("|-")
        delta = self.props_until(stops)
        return Sequent(tuple(gamma), tuple(delta))

    def proof(self) -> Proof:
        self.expect("(")
        tag = self.ident("rule tag")
        if tag.text not in RULES:
            self.error(f"unknown rule {tag.text}", tag)
        arity, kinds = RULES[tag.text]
        anns = []
        if self.at("{"):
            self.advance()
            for k, kind in enumerate(kinds):
                if k:
                    self.expect(";")
                anns.append(self.annotation(kind, anns))
            self.expect("}")
        elif kinds:
            self.error(f"{tag.text} needs annotations {{{'; '.join(kinds)}}}")
        self.expect("(")
        concl = self.sequent()
        self.expect(")")
        premises = []
        while self.at("("):
            premises.append(self.proof())
        self.expect(")")
        return Proof(tag.text, tuple(anns), concl, tuple(premises))

    def annotation(self, kind: str, previous: list):
        if kind == "V":
            return self.ident("variable").text
        if kind == "T":
            return self.term()
        if previous and isinstance(previous[0], str):
            # the body of a quantifier annotation may mention its variable
            self.bound.append(previous[0])
            try:
                return self.prop()
            finally:
                self.bound.pop()
        return self.prop()

    # -- problem files

    def rules(self) -> list[RewriteRule]:
        out = []
        while self.tok.kind != "eof" and not self.section_start():
            name = None
            if self.at("["):
                self.advance()
                name = self.ident("rule name").text
                self.expect("]")
            start = self.tok
            lhs = self.term()
            self.expect("->")
            rhs = self.term()
            try:
                out.append(RewriteRule(lhs, rhs, name))
            except ValueError as e:
                self.error(str(e), start)
        return out

    def section_start(self) -> bool:
        return self.tok.kind == "ident" and self.tok.text in _SECTIONS and self.peek().text == ":"

    def problem(self) -> ProblemFile:
        self.header()
        rules = []
        if self.section_start() and self.tok.text == "rules":
            self.advance()
            self.advance()
        if not self.section_start():
            rules = self.rules()
        sequent = proof = None
        if self.section_start() and self.tok.text == "sequent":
            self.advance()
            self.advance()
            sequent = self.sequent(stops=("proof",))
        if self.section_start() and self.tok.text == "proof":
            self.advance()
            self.advance()
            proof = self.proof()
        self.eof()
        if sequent is not None and proof is not None and not sequent.same(proof.conclusion):
            raise ParseError("proof does not conclude the stated sequent")
        if sequent is None and proof is not None:
            sequent = proof.conclusion
        try:
            system = RewriteSystem(self.signature(), tuple(rules))
        except ValueError as e:
            raise ParseError(str(e)) from e
        return ProblemFile(system, sequent, proof)


def parse_problem(text: str) -> ProblemFile:
    return _Parser(text).problem()


def _parse_one(text: str, signature: Signature | None, what):
    p = _Parser(text, signature)
    out = what(p)
    p.eof()
    return out


def parse_term(text: str, signature: Signature | None = None):
    return _parse_one(text, signature, _Parser.term)


def parse_prop(text: str, signature: Signature | None = None):
    return _parse_one(text, signature, _Parser.prop)


def parse_sequent(text: str, signature: Signature | None = None) -> Sequent:
    return _parse_one(text, signature, lambda p: p.sequent(stops=()))


def parse_proof(text: str, signature: Signature | None = None) -> Proof:
    return _parse_one(text, signature, _Parser.proof)


def parse_rules(text: str, signature: Signature | None = None) -> RewriteSystem:
    p = _Parser(text, signature)
    p.header()
    rules = p.rules()
    p.eof()
    return RewriteSystem(p.signature(), tuple(rules))


# -- printing ----------------------------------------------------------------

_PREC = {Implies: 1, Or: 2, And: 3}
_OPS = {Implies: "=>", Or: "\\/", And: "/\\"}


def _numeral(t) -> int | None:
    n = 0
    while isinstance(t, App) and t.head == "S" and len(t.args) == 1:
        t, n = t.args[0], n + 1
    if n and isinstance(t, App) and t.head == "0" and not t.args:
        return n
    return None


def show_term(t, numerals: bool = True) -> str:
    if isinstance(t, Var):
        return t.name
    if numerals:
        n = _numeral(t)
        if n is not None:
            return str(n)
    if not t.args:
        return t.head
    return f"{t.head}({', '.join(show_term(a, numerals) for a in t.args)})"


def show_prop(p, numerals: bool = True) -> str:
    if isinstance(p, Atom):
        if not p.args:
            return p.pred
        return f"{p.pred}({', '.join(show_term(a, numerals) for a in p.args)})"
    if isinstance(p, Bottom):
        return "_|_"
    if isinstance(p, _Quant):
        kw = "forall" if isinstance(p, Forall) else "exists"
        return f"{kw} {p.var}. {show_prop(p.body, numerals)}"
    prec = _PREC[type(p)]

    def child(c, parens_at_equal: bool) -> str:
        s = show_prop(c, numerals)
        if isinstance(c, _Quant):
            return f"({s})"
        if isinstance(c, _Binary):
            cp = _PREC[type(c)]
            if cp < prec or (cp == prec and parens_at_equal):
                return f"({s})"
        return s

    right_assoc = isinstance(p, Implies)
    left = child(p.left, parens_at_equal=right_assoc)
    right = child(p.right, parens_at_equal=not right_assoc)
    return f"{left} {_OPS[type(p)]} {right}"


def show_sequent(s: Sequent, numerals: bool = True) -> str:
    g = ", ".join(show_prop(p, numerals) for p in s.gamma)
    d = ", ".join(show_prop(p, numerals) for p in s.delta)
    return " ".join(x for x in (g, "|-", d) if x)


def show_annotation(a, numerals: bool = True) -> str:
    if isinstance(a, str):
        return a
    if isinstance(a, (Var, App)):
        return show_term(a, numerals)
    return show_prop(a, numerals)


def show_proof(p: Proof, numerals: bool = True, indent: int = 0) -> str:
    pad = " " * indent
    head = p.rule
    if p.annotations:
        head += " {" + "; ".join(show_annotation(a, numerals) for a in p.annotations) + "}"
    line = f"{pad}({head} ({show_sequent(p.conclusion, numerals)})"
    if not p.premises:
        return line + ")"
    parts = [line] + [show_proof(q, numerals, indent + 2) for q in p.premises]
    return "\n".join(parts) + ")"


def show_derivation(p: Proof, numerals: bool = True, indent: int = 0) -> str:
    """Indented human-readable derivation: conclusion first, premises below."""
    anns = ", ".join(show_annotation(a, numerals) for a in p.annotations)
    label = f"{p.rule}({anns})" if anns else p.rule
    lines = [f"{' ' * indent}{show_sequent(p.conclusion, numerals)}    [{label}]"]
    for q in p.premises:
        lines.append(show_derivation(q, numerals, indent + 2))
    return "\n".join(lines)


def show_conversion(s: ConversionSequence, numerals: bool = True, R: RewriteSystem | None = None) -> str:
    out = [show(s.objects[0], numerals)]
    for st, o in zip(s.steps, s.objects[1:]):
        label = R.label(st.rule) if R is not None else f"#{st.rule + 1}"
        arrow = "->" if st.direction == "forward" else "<-"
        out.append(f"{arrow}[{label}@{'.'.join(map(str, st.position)) or 'e'}] {show(o, numerals)}")
    return " ".join(out)


def show(o, numerals: bool = True) -> str:
    if isinstance(o, (Var, App)):
        return show_term(o, numerals)
    if isinstance(o, Proof):
        return show_proof(o, numerals)
    if isinstance(o, Sequent):
        return show_sequent(o, numerals)
    if isinstance(o, ConversionSequence):
        return show_conversion(o, numerals)
    if isinstance(o, RewriteRule):
        return f"{show_term(o.lhs, numerals)} -> {show_term(o.rhs, numerals)}"
    return show_prop(o, numerals)


def _decls(table: dict) -> str:
    return ", ".join(f"{k}/{v}" for k, v in table.items())


def render_system(R: RewriteSystem) -> str:
    sig = R.signature
    num = sig.has_numerals()
    lines = [f"sig {_decls(sig.function_symbols)};".replace("sig ;", "sig;"),
             f"pred {_decls(sig.predicate_symbols)};".replace("pred ;", "pred;"),
             "rules:"]
    for r in R.rules:
        prefix = f"[{r.name}] " if r.name is not None else ""
        lines.append(f"  {prefix}{show_term(r.lhs, num)} -> {show_term(r.rhs, num)}")
    return "\n".join(lines)


def render_problem(pf: ProblemFile) -> str:
    num = pf.signature.has_numerals()
    parts = [render_system(pf.system)]
    if pf.sequent is not None:
        parts.append(f"sequent: {show_sequent(pf.sequent, num)}")
    if pf.proof is not None:
        parts.append("proof:\n" + show_proof(pf.proof, num, indent=2))
    return "\n".join(parts) + "\n"


def render(o, signature: Signature | None = None) -> str:
    """Text for any object; numerals are used only if the signature has them."""
    if isinstance(o, ProblemFile):
        return render_problem(o)
    if isinstance(o, RewriteSystem):
        return render_system(o) + "\n"
    num = signature.has_numerals() if signature is not None else True
    return show(o, num)


__all__ = [
    "ArityError", "ParseError", "ProblemFile", "Token", "parse_problem", "parse_proof",
    "parse_prop", "parse_rules", "parse_sequent", "parse_term", "render", "render_problem",
    "render_system", "show", "show_derivation", "show_proof", "show_prop", "show_sequent",
    "show_term", "tokenize",
]
