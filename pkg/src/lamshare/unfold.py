"""Finite unfolding of letrec terms: single rewrite steps and a depth-bounded
unfolding used as the semantic oracle."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .terms import BH, Abs, App, BlackHole, Let, Term, Var, free_vars


# ---------------------------------------------------------------------------
# Finite trees: prefixes of the infinite unfolding
# ---------------------------------------------------------------------------

class FiniteTree:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class FAbs(FiniteTree):
    binder: str
    body: FiniteTree


@dataclass(frozen=True, slots=True)
class FApp(FiniteTree):
    fun: FiniteTree
    arg: FiniteTree


@dataclass(frozen=True, slots=True)
class FVar(FiniteTree):
    name: str


@dataclass(frozen=True, slots=True)
class FBlackHole(FiniteTree):
    pass


@dataclass(frozen=True, slots=True)
class FCut(FiniteTree):
    """Truncation marker: the unfolding continues below here."""


FBH = FBlackHole()
CUT = FCut()


def tree_alpha_eq(a: FiniteTree, b: FiniteTree) -> bool:
    """Alpha equality of finite trees; Cut is equal only to Cut."""

    def go(a, b, ea, eb, lvl):
        match a, b:
            case FVar(x), FVar(y):
                return ea.get(x, x) == eb.get(y, y)
            case FBlackHole(), FBlackHole():
                return True
            case FCut(), FCut():
                return True
            case FAbs(x, ba), FAbs(y, bb):
                return go(ba, bb, {**ea, x: lvl}, {**eb, y: lvl}, lvl + 1)
            case FApp(f1, a1), FApp(f2, a2):
                return go(f1, f2, ea, eb, lvl) and go(a1, a2, ea, eb, lvl)
            case _:
                return False

    return go(a, b, {}, {}, 0)


def pretty_tree(t: FiniteTree) -> str:
    """Term-syntax rendering; Cut prints as '...'."""

    def pp(t, ctx):
        match t:
            case FVar(n):
                return n
            case FBlackHole():
                return "_|_"
            case FCut():
                return "..."
            case FAbs(b, body):
                s = f"\\{b}. {pp(body, 0)}"
                return f"({s})" if ctx > 0 else s
            case FApp(f, a):
                s = f"{pp(f, 1)} {pp(a, 2)}"
                return f"({s})" if ctx > 1 else s
        raise TypeError(f"not a tree: {t!r}")

    return pp(t, 0)


# ---------------------------------------------------------------------------
# One-step unfolding
# ---------------------------------------------------------------------------

def _fresh_variant(name: str, avoid: set[str]) -> str:
    while name in avoid:
        name += "'"
    return name


def _all_names(t: Term) -> set[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        s = stack.pop()
        match s:
            case Var(n):
                out.add(n)
            case Abs(x, b):
                out.add(x)
                stack.append(b)
            case App(f, a):
                stack += (f, a)
            case Let(bs, b):
                for f, r in bs:
                    out.add(f)
                    stack.append(r)
                stack.append(b)
    return out


def _rename_free(t: Term, old: str, new: str) -> Term:
    """Replace free occurrences of `old` by `new`, renaming binders on the
    way down where `new` would be captured."""
    if old not in free_vars(t):
        return t
    match t:
        case Var(_):
            return Var(new)
        case Abs(x, b):
            if x == new:
                x2 = _fresh_variant(x, _all_names(b) | {old, new, x})
                b = _rename_free(b, x, x2)
                x = x2
            return Abs(x, _rename_free(b, old, new))
        case App(f, a):
            return App(_rename_free(f, old, new), _rename_free(a, old, new))
        case Let(bs, body):
            if new in {f for f, _ in bs}:
                g2 = _fresh_variant(new, _all_names(t) | {old, new})
                bs = tuple(
                    (g2 if f == new else f, _rename_free(r, new, g2)) for f, r in bs
                )
                body = _rename_free(body, new, g2)
            return Let(
                tuple((f, _rename_free(r, old, new)) for f, r in bs),
                _rename_free(body, old, new),
            )
    raise TypeError(f"not a term: {t!r}")


def _step_eager(t: Term) -> Optional[Term]:
    """Leftmost-outermost (black-hole) or (tighten) step, if any."""
    match t:
        case Let(bs, body):
            group = {f for f, _ in bs}
            for k, (f, r) in enumerate(bs):
                if isinstance(r, Var) and r.name in group:
                    if r.name == f:
                        # (black hole): f = f  becomes  f = _|_
                        bs2 = bs[:k] + ((f, BH),) + bs[k + 1 :]
                        return Let(bs2, body)
                    # (tighten): drop f = g, substituting g for f
                    g = r.name
                    bs2 = tuple(
                        (h, _rename_free(rr, f, g)) for h, rr in bs if h != f
                    )
                    body2 = _rename_free(body, f, g)
                    return Let(bs2, body2) if bs2 else body2
    for i, c in enumerate(_term_children(t)):
        c2 = _step_eager(c)
        if c2 is not None:
            return _replace_child(t, i, c2)
    return None


def _step_main(t: Term) -> Optional[Term]:
    """Leftmost-outermost step with the remaining unfolding rules."""
    match t:
        case Let(bs, body):
            group = {f for f, _ in bs}
            if not (free_vars(body) & group):
                # (gc): no recursion variable of the group occurs in the body
                return body
            match body:
                case App(f, a):
                    return App(Let(bs, f), Let(bs, a))
                case Abs(x, b):
                    avoid = set().union(*(free_vars(r) for _, r in bs)) | group
                    if x in avoid:
                        x2 = _fresh_variant(x, avoid | _all_names(b))
                        b = _rename_free(b, x, x2)
                        x = x2
                    return Abs(x, Let(bs, b))
                case Let(bs2, body2):
                    # (let_in): merge groups, renaming inner variables that
                    # would clash with or capture outer ones
                    avoid = group | set().union(*(free_vars(r) for _, r in bs))
                    taken = avoid | {g for g, _ in bs2}
                    for f, _ in tuple(bs2):
                        if f in avoid:
                            f2 = _fresh_variant(f, taken)
                            taken.add(f2)
                            bs2 = tuple(
                                (f2 if g == f else g, _rename_free(r, f, f2))
                                for g, r in bs2
                            )
                            body2 = _rename_free(body2, f, f2)
                    return Let(bs + bs2, body2)
                case Var(n) if n in group:
                    # (let-rec): copy the right-hand side into the body
                    rhs = next(r for f, r in bs if f == n)
                    return Let(bs, rhs)
    for i, c in enumerate(_term_children(t)):
        c2 = _step_main(c)
        if c2 is not None:
            return _replace_child(t, i, c2)
    return None


def _term_children(t: Term) -> tuple[Term, ...]:
    match t:
        case Abs(_, b):
            return (b,)
        case App(f, a):
            return (f, a)
        case Let(bs, b):
            return tuple(r for _, r in bs) + (b,)
        case _:
            return ()


def _replace_child(t: Term, i: int, c: Term) -> Term:
    match t:
        case Abs(x, _):
            return Abs(x, c)
        case App(f, a):
            return App(c, a) if i == 0 else App(f, c)
        case Let(bs, b):
            if i < len(bs):
                return Let(bs[:i] + ((bs[i][0], c),) + bs[i + 1 :], b)
            return Let(bs, c)
    raise TypeError(f"not a term: {t!r}")


def unfold_step(t: Term) -> Optional[Term]:
    """One unfolding rewrite step, or None when `t` contains no let.

    (tighten) and (black hole) are applied eagerly; otherwise the
    leftmost-outermost redex fires.
    """
    return _step_eager(t) or _step_main(t)


# ---------------------------------------------------------------------------
# Depth-bounded unfolding
# ---------------------------------------------------------------------------

class _Env:
    """Immutable chained scope: name -> ('lam', out_name) | ('rec', _Binding)."""

    __slots__ = ("parent", "entries")

    def __init__(self, parent: Optional["_Env"], entries: dict):
        self.parent = parent
        self.entries = entries

    def lookup(self, name: str):
        env = self
        while env is not None:
            if name in env.entries:
                return env.entries[name]
            env = env.parent
        return None


class _Binding:
    __slots__ = ("rhs", "env")

    def __init__(self, rhs: Term, env: _Env):
        self.rhs = rhs
        self.env = env


def _resolve(t: Term, env: Optional[_Env]):
    """Push lets into the environment and chase recursion variables until a
    constructor (or free variable) appears; revisiting a binding without
    passing a constructor is a black hole."""
    seen: set[int] = set()
    while True:
        if isinstance(t, Let):
            entries: dict = {}
            env = _Env(env, entries)
            for f, r in t.bindings:
                entries[f] = ("rec", _Binding(r, env))
            t = t.body
        elif isinstance(t, Var):
            hit = env.lookup(t.name) if env is not None else None
            if hit is None or hit[0] == "lam":
                return t, env
            binding = hit[1]
            if id(binding) in seen:
                return BH, env
            seen.add(id(binding))
            t, env = binding.rhs, binding.env
        else:
            return t, env


def bounded_unfold(t: Term, depth: int) -> FiniteTree:
    """The depth-`depth` truncation of the infinite unfolding of `t`.

    Abs/App nodes at the depth bound are replaced by Cut; variables and
    black holes at the bound are kept.  Binders are renamed only as needed
    to avoid capture.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")

    def build(t: Term, env: Optional[_Env], in_scope: frozenset[str], budget: int) -> FiniteTree:
        t, env = _resolve(t, env)
        match t:
            case Var(n):
                hit = env.lookup(n) if env is not None else None
                return FVar(hit[1]) if hit is not None else FVar(n)
            case BlackHole():
                return FBH
            case Abs(x, b):
                if budget == 0:
                    return CUT
                out = _fresh_variant(x, set(in_scope))
                env2 = _Env(env, {x: ("lam", out)})
                return FAbs(out, build(b, env2, in_scope | {out}, budget - 1))
            case App(f, a):
                if budget == 0:
                    return CUT
                return FApp(
                    build(f, env, in_scope, budget - 1),
                    build(a, env, in_scope, budget - 1),
                )
        raise TypeError(f"not a term: {t!r}")

    return build(t, None, frozenset(), depth)


def oracle_equiv(a: Term, b: Term, depth: int = 10) -> bool:
    """Finite witness for unfolding equality: alpha equality of the
    depth-bounded unfoldings."""
    return tree_alpha_eq(bounded_unfold(a, depth), bounded_unfold(b, depth))
