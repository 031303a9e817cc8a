"""First-order terms and propositions.

Objects are immutable and hash-consed by value: two structurally equal
terms compare equal and share a hash, so they can be used directly as
set members and dictionary keys.  Bound variables are kept by name;
:func:`canonical` maps a proposition to a representative where each
binder is renamed by its nesting depth, which is what alpha-equivalence
and proposition sets are keyed on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence, Union


class InvalidPosition(ValueError):
    pass


class ArityError(ValueError):
    pass


@dataclass
class Signature:
    function_symbols: dict[str, int] = field(default_factory=dict)
    predicate_symbols: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        for table in (self.function_symbols, self.predicate_symbols):
            for name, arity in table.items():
                if arity < 0:
                    raise ArityError(f"negative arity for {name}")

    def constants(self) -> list[App]:
        return [App(f) for f, n in self.function_symbols.items() if n == 0]

    def has_numerals(self) -> bool:
        return self.function_symbols.get("S") == 1 and self.function_symbols.get("0") == 0

    def check_term(self, t: Term) -> None:
        if isinstance(t, Var):
            if t.name in self.function_symbols:
                raise ArityError(f"{t.name} is a function symbol, not a variable")
            return
        arity = self.function_symbols.get(t.head)
        if arity is None:
            raise ArityError(f"undeclared function symbol {t.head}")
        if arity != len(t.args):
            raise ArityError(f"{t.head} expects {arity} arguments, got {len(t.args)}")
        for a in t.args:
            self.check_term(a)

    def check_prop(self, p: Prop) -> None:
        if isinstance(p, Atom):
            arity = self.predicate_symbols.get(p.pred)
            if arity is None:
                raise ArityError(f"undeclared predicate symbol {p.pred}")
            if arity != len(p.args):
                raise ArityError(f"{p.pred} expects {arity} arguments, got {len(p.args)}")
            for a in p.args:
                self.check_term(a)
        else:
            for child in p.children():
                self.check_prop(child)


class _Node:
    """Shared value semantics: cached structural hash and equality."""

    __slots__ = ()

    def _key(self) -> tuple:
        raise NotImplementedError

    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((type(self).__name__,) + self._key())
            object.__setattr__(self, "_hash", h)
        return h

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if type(other) is not type(self) or hash(self) != hash(other):
            return False
        return self._key() == other._key()

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)

    def __str__(self) -> str:
        from .syntax import show

        return show(self)


@dataclass(frozen=True, eq=False, repr=False)
class Var(_Node):
    name: str

    def _key(self):
        return (self.name,)

    def __repr__(self):
        return f"Var({self.name!r})"


@dataclass(frozen=True, eq=False, repr=False)
class App(_Node):
    head: str
    args: tuple = ()

    def _key(self):
        return (self.head, self.args)

    def __repr__(self):
        if not self.args:
            return f"App({self.head!r})"
        return f"App({self.head!r}, {self.args!r})"


Term = Union[Var, App]


@dataclass(frozen=True, eq=False, repr=False)
class Atom(_Node):
    pred: str
    args: tuple = ()

    def _key(self):
        return (self.pred, self.args)

    def children(self) -> tuple:
        return ()

    def __repr__(self):
        return f"Atom({self.pred!r}, {self.args!r})"


@dataclass(frozen=True, eq=False, repr=False)
class Bottom(_Node):
    def _key(self):
        return ()

    def children(self) -> tuple:
        return ()

    def __repr__(self):
        return "Bottom()"


@dataclass(frozen=True, eq=False, repr=False)
class _Binary(_Node):
    left: "Prop"
    right: "Prop"

    def _key(self):
        return (self.left, self.right)

    def children(self) -> tuple:
        return (self.left, self.right)

    def __repr__(self):
        return f"{type(self).__name__}({self.left!r}, {self.right!r})"


class Implies(_Binary):
    pass


class And(_Binary):
    pass


class Or(_Binary):
    pass


@dataclass(frozen=True, eq=False, repr=False)
class _Quant(_Node):
    var: str
    body: "Prop"

    def _key(self):
        return (self.var, self.body)

    def children(self) -> tuple:
        return (self.body,)

    def __repr__(self):
        return f"{type(self).__name__}({self.var!r}, {self.body!r})"


class Forall(_Quant):
    pass


class Exists(_Quant):
    pass


Prop = Union[Atom, Bottom, Implies, And, Or, Forall, Exists]
Position = tuple

BINARY = (Implies, And, Or)
QUANTIFIERS = (Forall, Exists)


def is_term(o) -> bool:
    return isinstance(o, (Var, App))


def is_atomic(p: Prop) -> bool:
    return isinstance(p, Atom)


def rebuild(p: Prop, children: Sequence) -> Prop:
    if isinstance(p, _Binary):
        return type(p)(children[0], children[1])
    if isinstance(p, _Quant):
        return type(p)(p.var, children[0])
    return p


# -- free variables -------------------------------------------------------


def term_vars(t: Term) -> set[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Var):
            out.add(s.name)
        else:
            stack.extend(s.args)
    return out


def free_vars(o) -> set[str]:
    if isinstance(o, (Var, App)):
        return term_vars(o)
    if isinstance(o, Atom):
        out: set[str] = set()
        for a in o.args:
            out |= term_vars(a)
        return out
    if isinstance(o, _Quant):
        return free_vars(o.body) - {o.var}
    if isinstance(o, _Binary):
        return free_vars(o.left) | free_vars(o.right)
    return set()


def all_names(o) -> set[str]:
    """Free and bound variable names occurring anywhere in ``o``."""
    if isinstance(o, _Quant):
        return all_names(o.body) | {o.var}
    if isinstance(o, _Binary):
        return all_names(o.left) | all_names(o.right)
    return free_vars(o)


def fresh_name(base: str, avoid) -> str:
    name = base + "'"
    while name in avoid:
        name += "'"
    return name


# -- substitution ---------------------------------------------------------


def _subst_term(t: Term, s: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return s.get(t.name, t)
    if not t.args:
        return t
    args = tuple(_subst_term(a, s) for a in t.args)
    return t if args == t.args else App(t.head, args)


def substitute(o, s: Mapping[str, Term]):
    """Simultaneous capture-avoiding substitution on terms and propositions."""
    s = {k: v for k, v in s.items() if not (isinstance(v, Var) and v.name == k)}
    if not s:
        return o
    if isinstance(o, (Var, App)):
        return _subst_term(o, s)
    return _subst_prop(o, s)


def _subst_prop(p: Prop, s: Mapping[str, Term]) -> Prop:
    if isinstance(p, Atom):
        return Atom(p.pred, tuple(_subst_term(a, s) for a in p.args))
    if isinstance(p, Bottom):
        return p
    if isinstance(p, _Binary):
        return type(p)(_subst_prop(p.left, s), _subst_prop(p.right, s))
    inner = {k: v for k, v in s.items() if k != p.var and k in free_vars(p.body)}
    if not inner:
        return p
    incoming: set[str] = set()
    for v in inner.values():
        incoming |= term_vars(v)
    var, body = p.var, p.body
    if var in incoming:
        new = fresh_name(var, incoming | all_names(body) | set(inner))
        body = _subst_prop(body, {var: Var(new)})
        var = new
    return type(p)(var, _subst_prop(body, inner))


def compose(s1: Mapping[str, Term], s2: Mapping[str, Term]) -> dict[str, Term]:
    """The substitution applying ``s1`` first, then ``s2``."""
    out = {k: _subst_term(v, s2) for k, v in s1.items()}
    for k, v in s2.items():
        out.setdefault(k, v)
    return {k: v for k, v in out.items() if not (isinstance(v, Var) and v.name == k)}


# -- alpha-equivalence ----------------------------------------------------


def canonical(p):
    """Representative of the alpha-class of ``p``: binders renamed by depth.

    The generated names contain ``%`` and so never clash with parsed
    identifiers.  Terms are returned unchanged.
    """
    if isinstance(p, (Var, App)):
        return p
    return _canon(p, {}, 0)


def _canon(p: Prop, env: dict[str, str], depth: int) -> Prop:
    if isinstance(p, Atom):
        if not env:
            return p
        return Atom(p.pred, tuple(_subst_term(a, {k: Var(v) for k, v in env.items()}) for a in p.args))
    if isinstance(p, Bottom):
        return p
    if isinstance(p, _Binary):
        return type(p)(_canon(p.left, env, depth), _canon(p.right, env, depth))
    name = f"%{depth}"
    return type(p)(name, _canon(p.body, {**env, p.var: name}, depth + 1))


def alpha_equal(a, b) -> bool:
    return canonical(a) == canonical(b)


# -- matching and unification --------------------------------------------


def match_pattern(pattern: Term, subject: Term, theta: dict | None = None) -> dict[str, Term] | None:
    """Substitution over the pattern's variables sending it to ``subject``.

    Variables of the subject are rigid: they are only matched by a
    pattern variable, never bound themselves.
    """
    theta = {} if theta is None else dict(theta)
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            bound = theta.get(p.name)
            if bound is None:
                theta[p.name] = s
            elif bound != s:
                return None
        elif isinstance(s, Var) or p.head != s.head or len(p.args) != len(s.args):
            return None
        else:
            stack.extend(zip(p.args, s.args))
    return {k: v for k, v in theta.items() if not (isinstance(v, Var) and v.name == k)}


def _walk(t: Term, s: dict[str, Term]) -> Term:
    while isinstance(t, Var) and t.name in s:
        t = s[t.name]
    return t


def _occurs(name: str, t: Term, s: dict[str, Term]) -> bool:
    t = _walk(t, s)
    if isinstance(t, Var):
        return t.name == name
    return any(_occurs(name, a, s) for a in t.args)


def unify(t: Term, u: Term) -> dict[str, Term] | None:
    """Most general unifier with occurs check, in idempotent form."""
    s: dict[str, Term] = {}
    stack = [(t, u)]
    while stack:
        a, b = stack.pop()
        a, b = _walk(a, s), _walk(b, s)
        if a == b:
            continue
        if isinstance(a, Var):
            if _occurs(a.name, b, s):
                return None
            s[a.name] = b
        elif isinstance(b, Var):
            if _occurs(b.name, a, s):
                return None
            s[b.name] = a
        elif a.head != b.head or len(a.args) != len(b.args):
            return None
        else:
            stack.extend(zip(a.args, b.args))

    def resolve(x: Term) -> Term:
        x = _walk(x, s)
        if isinstance(x, Var) or not x.args:
            return x
        return App(x.head, tuple(resolve(a) for a in x.args))

    return {k: resolve(v) for k, v in s.items()}


# -- positions ------------------------------------------------------------


def _children(o) -> tuple:
    if isinstance(o, (App, Atom)):
        return o.args
    if isinstance(o, Var):
        return ()
    return o.children()


def subterm_at(o, pos: Sequence[int]):
    cur = o
    for i in pos:
        kids = _children(cur)
        if not 0 <= i < len(kids):
            raise InvalidPosition(f"position {list(pos)} does not address a subtree")
        cur = kids[i]
    return cur


def replace_at(o, pos: Sequence[int], replacement: Term):
    """``o`` with the term subtree at ``pos`` replaced."""
    if not pos:
        if not is_term(o):
            raise InvalidPosition("root of a proposition is not a term position")
        return replacement
    i, rest = pos[0], pos[1:]
    kids = _children(o)
    if not 0 <= i < len(kids):
        raise InvalidPosition(f"index {i} out of range")
    new = replace_at(kids[i], rest, replacement)
    if new is kids[i]:
        return o
    if isinstance(o, App):
        return App(o.head, kids[:i] + (new,) + kids[i + 1:])
    if isinstance(o, Atom):
        return Atom(o.pred, kids[:i] + (new,) + kids[i + 1:])
    return rebuild(o, kids[:i] + (new,) + kids[i + 1:])


def term_positions(o) -> Iterator[tuple[Position, Term]]:
    """Term-sorted subtrees in leftmost-outermost (pre-order) order."""
    stack: list[tuple[Position, object]] = [((), o)]
    while stack:
        pos, cur = stack.pop()
        if is_term(cur):
            yield pos, cur
        kids = _children(cur)
        for i in range(len(kids) - 1, -1, -1):
            stack.append((pos + (i,), kids[i]))


def ground_subterms(o) -> list[Term]:
    seen: dict[Term, None] = {}
    for _, t in term_positions(o):
        if not term_vars(t):
            seen.setdefault(t, None)
    return list(seen)


def size(o) -> int:
    return 1 + sum(size(c) for c in _children(o))
