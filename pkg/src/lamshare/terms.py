"""Lambda calculus with letrec: terms, parser, printer and static analyses."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

class Term:
    """Base class for letrec terms.  Instances are immutable values."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Var(Term):
    name: str


@dataclass(frozen=True, slots=True)
class Abs(Term):
    binder: str
    body: Term


@dataclass(frozen=True, slots=True)
class App(Term):
    fun: Term
    arg: Term


@dataclass(frozen=True, slots=True)
class Let(Term):
    # bindings are ordered; order is significant for alpha_eq
    bindings: tuple[tuple[str, Term], ...]
    body: Term

    def __post_init__(self):
        if not self.bindings:
            raise ValueError("empty binding group")
        names = [f for f, _ in self.bindings]
        if len(set(names)) != len(names):
            raise ValueError("duplicate recursion variable in binding group")


@dataclass(frozen=True, slots=True)
class BlackHole(Term):
    pass


BH = BlackHole()

# A position is a path of child indices from the root.
# Abs: 0 = body.  App: 0 = fun, 1 = arg.  Let with k bindings: i < k = rhs of
# binding i, k = body.
Position = tuple[int, ...]


def children(t: Term) -> tuple[Term, ...]:
    match t:
        case Abs(_, b):
            return (b,)
        case App(f, a):
            return (f, a)
        case Let(bs, b):
            return tuple(r for _, r in bs) + (b,)
        case _:
            return ()


def subterm_at(t: Term, p: Position) -> Term:
    for i in p:
        cs = children(t)
        if not 0 <= i < len(cs):
            raise ValueError(f"invalid position {p!r}")
        t = cs[i]
    return t


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


_TOKEN_RE = re.compile(
    r"""(?P<ws>[ \t\r]+)
      | (?P<comment>\#[^\n]*)
      | (?P<nl>\n)
      | (?P<bot>_\|_)
      | (?P<lam>[\\λ])
      | (?P<dot>\.)
      | (?P<lpar>\()
      | (?P<rpar>\))
      | (?P<comma>,)
      | (?P<eq>=)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)

_KEYWORDS = {"let", "in"}


def _tokenize(src: str) -> list[tuple[str, str, int, int]]:
    toks = []
    line, col, pos = 1, 1, 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", line, col)
        kind = m.lastgroup
        text = m.group()
        if kind == "nl":
            line += 1
            col = 1
        elif kind in ("ws", "comment"):
            col += len(text)
        else:
            if kind == "ident" and text in _KEYWORDS:
                kind = text
            toks.append((kind, text, line, col))
            col += len(text)
        pos = m.end()
    toks.append(("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self) -> tuple[str, str, int, int]:
        return self.toks[self.i]

    def next(self) -> tuple[str, str, int, int]:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str) -> tuple[str, str, int, int]:
        k, text, line, col = self.peek()
        if k != kind:
            raise ParseError(f"expected {kind!r}, found {text or 'end of input'!r}", line, col)
        return self.next()

    def term(self) -> Term:
        if self.peek()[0] == "lam":
            self.next()
            _, name, _, _ = self.expect("ident")
            self.expect("dot")
            return Abs(name, self.term())
        return self.app()

    def app(self) -> Term:
        t = self.atom()
        while self.peek()[0] in ("ident", "lpar", "let", "bot"):
            t = App(t, self.atom())
        return t

    def atom(self) -> Term:
        kind, text, line, col = self.peek()
        if kind == "ident":
            self.next()
            return Var(text)
        if kind == "bot":
            self.next()
            return BH
        if kind == "lpar":
            self.next()
            t = self.term()
            self.expect("rpar")
            return t
        if kind == "let":
            self.next()
            bindings = [self.binding()]
            seen = {bindings[0][0]}
            while self.peek()[0] == "comma":
                self.next()
                _, _, bline, bcol = self.peek()
                f, rhs = self.binding()
                if f in seen:
                    raise ParseError(f"duplicate recursion variable {f!r}", bline, bcol)
                seen.add(f)
                bindings.append((f, rhs))
            self.expect("in")
            return Let(tuple(bindings), self.term())
        raise ParseError(f"expected a term, found {text or 'end of input'!r}", line, col)

    def binding(self) -> tuple[str, Term]:
        _, name, _, _ = self.expect("ident")
        self.expect("eq")
        return name, self.term()


def parse(source: str) -> Term:
    p = _Parser(source)
    t = p.term()
    kind, text, line, col = p.peek()
    if kind != "eof":
        raise ParseError(f"trailing input {text!r}", line, col)
    return t


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

_CTX_TERM, _CTX_FUN, _CTX_ARG = 0, 1, 2


def pretty(t: Term) -> str:
    """Render a term; `parse(pretty(t))` reproduces `t` exactly."""
    return _pp(t, _CTX_TERM)


def _pp(t: Term, ctx: int) -> str:
    match t:
        case Var(n):
            return n
        case BlackHole():
            return "_|_"
        case Abs(b, body):
            s = f"\\{b}. {_pp(body, _CTX_TERM)}"
            return f"({s})" if ctx > _CTX_TERM else s
        case App(f, a):
            s = f"{_pp(f, _CTX_FUN)} {_pp(a, _CTX_ARG)}"
            return f"({s})" if ctx > _CTX_FUN else s
        case Let(bs, body):
            eqs = ", ".join(f"{f} = {_pp(r, _CTX_TERM)}" for f, r in bs)
            s = f"let {eqs} in {_pp(body, _CTX_TERM)}"
            return f"({s})" if ctx > _CTX_TERM else s
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Alpha equivalence, free variables
# ---------------------------------------------------------------------------

def alpha_eq(a: Term, b: Term) -> bool:
    """Equality up to consistent renaming of binders.

    Lambda binders and recursion variables share one namespace; binding
    groups are compared positionally (no permutation).
    """
    return _aeq(a, b, {}, {}, 0)


def _aeq(a: Term, b: Term, ea: dict, eb: dict, lvl: int) -> bool:
    match a, b:
        case Var(x), Var(y):
            return ea.get(x, x) == eb.get(y, y)
        case BlackHole(), BlackHole():
            return True
        case Abs(x, ba), Abs(y, bb):
            return _aeq(ba, bb, {**ea, x: lvl}, {**eb, y: lvl}, lvl + 1)
        case App(f1, a1), App(f2, a2):
            return _aeq(f1, f2, ea, eb, lvl) and _aeq(a1, a2, ea, eb, lvl)
        case Let(bs1, b1), Let(bs2, b2):
            if len(bs1) != len(bs2):
                return False
            ea2, eb2 = dict(ea), dict(eb)
            for k, ((f1, _), (f2, _)) in enumerate(zip(bs1, bs2)):
                ea2[f1] = lvl + k
                eb2[f2] = lvl + k
            lvl2 = lvl + len(bs1)
            return all(
                _aeq(r1, r2, ea2, eb2, lvl2) for (_, r1), (_, r2) in zip(bs1, bs2)
            ) and _aeq(b1, b2, ea2, eb2, lvl2)
        case _:
            return False


def free_vars(t: Term) -> frozenset[str]:
    match t:
        case Var(n):
            return frozenset((n,))
        case BlackHole():
            return frozenset()
        case Abs(x, b):
            return free_vars(b) - {x}
        case App(f, a):
            return free_vars(f) | free_vars(a)
        case Let(bs, body):
            bound = {f for f, _ in bs}
            fv = free_vars(body)
            for _, r in bs:
                fv = fv | free_vars(r)
            return fv - bound
    raise TypeError(f"not a term: {t!r}")


def term_size(t: Term) -> int:
    """Number of syntax-tree symbols; each binding equation counts one '='."""
    match t:
        case Var(_) | BlackHole():
            return 1
        case Abs(_, b):
            return 1 + term_size(b)
        case App(f, a):
            return 1 + term_size(f) + term_size(a)
        case Let(bs, body):
            return 1 + sum(1 + term_size(r) for _, r in bs) + term_size(body)
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Renaming apart
# ---------------------------------------------------------------------------

def rename_apart(t: Term) -> Term:
    """Alpha-rename so that all binders (lambda and letrec) are distinct.

    Deterministic: binders become base_%d in traversal order.
    """
    counter = [0]

    def fresh(base: str) -> str:
        counter[0] += 1
        return f"{base}_{counter[0]}"

    def go(t: Term, env: dict[str, str]) -> Term:
        match t:
            case Var(n):
                return Var(env.get(n, n))
            case BlackHole():
                return BH
            case Abs(x, b):
                nx = fresh(x)
                return Abs(nx, go(b, {**env, x: nx}))
            case App(f, a):
                return App(go(f, env), go(a, env))
            case Let(bs, body):
                env2 = dict(env)
                new_names = []
                for f, _ in bs:
                    nf = fresh(f)
                    new_names.append(nf)
                    env2[f] = nf
                return Let(
                    tuple((nf, go(r, env2)) for nf, (_, r) in zip(new_names, bs)),
                    go(body, env2),
                )
        raise TypeError(f"not a term: {t!r}")

    return go(t, {})


# ---------------------------------------------------------------------------
# Garbage removal
# ---------------------------------------------------------------------------

def garbage_collect(t: Term) -> Term:
    """Drop let bindings unreachable from their group's in-part.

    Reachability runs through the free recursion variables of kept
    right-hand sides; emptied groups are replaced by their body.
    """
    match t:
        case Var(_) | BlackHole():
            return t
        case Abs(x, b):
            return Abs(x, garbage_collect(b))
        case App(f, a):
            return App(garbage_collect(f), garbage_collect(a))
        case Let(bs, body):
            body2 = garbage_collect(body)
            rhss = {f: garbage_collect(r) for f, r in bs}
            group = set(rhss)
            used: set[str] = set()
            frontier = free_vars(body2) & group
            while frontier:
                used |= frontier
                frontier = (
                    frozenset().union(*(free_vars(rhss[f]) for f in frontier)) & group
                ) - used
            kept = tuple((f, rhss[f]) for f, _ in bs if f in used)
            if not kept:
                return body2
            return Let(kept, body2)
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Required-variable analysis
# ---------------------------------------------------------------------------

def required_vars(t: Term, p: Position) -> frozenset[str]:
    """Lambda variables bound above `p` that occur free in the complete
    unfolding below `p`.

    Computed as a downward traversal that enters in-parts at lets and jumps
    to the corresponding right-hand side at recursion variables, memoizing
    visited bindings so cyclic groups terminate.
    """
    t2 = rename_apart(t)
    # walk both terms down p, collecting the lambda binders above p
    above: list[tuple[str, str]] = []  # (original, renamed)
    orig, ren = t, t2
    for i in p:
        if isinstance(orig, Abs):
            above.append((orig.binder, ren.binder))
        orig, ren = children(orig)[i], children(ren)[i]

    bindings = _all_bindings(t2)
    reached = _reach(ren, bindings)
    return frozenset(o for o, r in above if r in reached)


def _all_bindings(t: Term) -> dict[str, Term]:
    """All binding equations of a renamed-apart term, keyed by recursion variable."""
    out: dict[str, Term] = {}
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Let):
            for f, r in s.bindings:
                out[f] = r
        stack.extend(children(s))
    return out


def _reach(t: Term, bindings: dict[str, Term]) -> frozenset[str]:
    """Variable names reached by the unfolding traversal from `t`.

    Recursion variables are followed into their right-hand sides once;
    everything else free is collected.  Valid only on renamed-apart terms.
    """
    reached: set[str] = set()
    visited: set[str] = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Var):
            if s.name in bindings:
                if s.name not in visited:
                    visited.add(s.name)
                    stack.append(bindings[s.name])
            else:
                reached.add(s.name)
        else:
            stack.extend(children(s))
    return frozenset(reached)
