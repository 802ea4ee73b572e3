"""Readback of first-order lambda term graphs into letrec terms, and the
end-to-end maximal-sharing pipeline."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .bisim import bisimilar, collapse, unshare_S, unshare_variables
from .graphs import (
    APP,
    BH,
    INDIR,
    LAM,
    S,
    TOP,
    VAR0,
    TermGraph,
    infer_abspre,
    is_backlink,
)
from .terms import Abs, App as TApp, BlackHole, Let, Term, Var
from .translate import translate_fo_max


# An edge label is a prefixed term: entries are (lam vertex | None for the
# dummy leftmost slot, bindings); bindings map names to a Term, or to None
# while the binding is still unfinished.
_Prefix = tuple[tuple[Optional[int], tuple[tuple[str, Optional[Term]], ...]], ...]


@dataclass(frozen=True)
class _Labelled:
    prefix: _Prefix
    body: Term


def _vs0(p: _Prefix) -> tuple[int, ...]:
    return tuple(v for v, _ in p[1:])


def _xname(v: int) -> str:
    return f"x{v}"


def _fname(v: int) -> str:
    return f"f{v}"


def _merge_bindings(b0, b1):
    out = list(b0)
    index = {name: k for k, (name, _) in enumerate(out)}
    for name, t in b1:
        if name in index:
            k = index[name]
            old = out[k][1]
            if old is None:
                out[k] = (name, t)
            else:
                assert t is None, f"binding {name} completed twice"
        else:
            index[name] = len(out)
            out.append((name, t))
    return tuple(out)


def _merge_prefix(p0: _Prefix, p1: _Prefix) -> _Prefix:
    assert _vs0(p0) == _vs0(p1), "application children disagree on scopes"
    return tuple(
        (v0, _merge_bindings(b0, b1)) for (v0, b0), (_, b1) in zip(p0, p1)
    )


def _set_binding(p: _Prefix, name: str, t: Optional[Term]) -> _Prefix:
    entry, bindings = p[-1]
    return p[:-1] + ((entry, _merge_bindings(bindings, ((name, t),))),)


def _finished(bindings) -> tuple[tuple[str, Term], ...]:
    assert all(t is not None for _, t in bindings), "unfinished binding escaped"
    return tuple(bindings)


class _Readback:
    def __init__(self, g: TermGraph):
        pre = infer_abspre(g)
        n = len(g)
        labels = list(g.labels)
        args = [list(a) for a in g.args]
        # add the top vertex
        top = len(labels)
        labels.append(TOP)
        args.append([g.root])
        pre[top] = ()
        # shared vertices get an indirection; only indirections stay shared
        indeg = [0] * (n + 1)
        for u in range(n + 1):
            for i, c in enumerate(args[u]):
                if not is_backlink(labels[u], i):
                    indeg[c] += 1
        for v in range(n):
            if indeg[v] < 2:
                continue
            w = len(labels)
            labels.append(INDIR)
            args.append([v])
            pre[w] = pre[v]
            for u in range(w):
                if u == w:
                    continue
                for i, c in enumerate(args[u]):
                    if c == v and not is_backlink(labels[u], i):
                        args[u][i] = w
        self.labels = labels
        self.args = args
        self.pre = pre
        self.top = top

        # depth-first spanning tree from the top, children in argument order
        self.parent_edge: dict[int, tuple[int, int]] = {}
        order: list[int] = []
        visited = {top}
        stack: list[tuple[int, int]] = [(top, 0)]
        while stack:
            u, i = stack.pop()
            if i == len(self.args[u]):
                order.append(u)
                continue
            stack.append((u, i + 1))
            if is_backlink(self.labels[u], i):
                continue
            c = self.args[u][i]
            if c not in visited:
                visited.add(c)
                self.parent_edge[c] = (u, i)
                stack.append((c, 0))
        self.postorder = order  # children appear before their parents
        self.tree_label: dict[int, _Labelled] = {}

    def edge_label(self, u: int, i: int) -> _Labelled:
        c = self.args[u][i]
        if self.parent_edge.get(c) == (u, i):
            return self.tree_label[c]
        # non-tree edge: only indirection vertices are shared
        assert self.labels[c] == INDIR, "shared vertex without indirection"
        entries: list = [(None, ())]
        word = self.pre[c]
        entries += [(v, ()) for v in word]
        prefix = tuple(entries)
        return _Labelled(_set_binding(prefix, _fname(c), None), Var(_fname(c)))

    def synth(self, c: int) -> _Labelled:
        """Label of the spanning-tree edge into `c` (Fig-style local rules)."""
        lab = self.labels[c]
        if lab == VAR0:
            word = self.pre[c]
            prefix = ((None, ()),) + tuple((v, ()) for v in word)
            return _Labelled(prefix, Var(_xname(word[-1])))
        if lab == BH:
            name = _fname(c)
            prefix = ((None, ((name, Var(name)),)),)
            return _Labelled(prefix, Var(name))
        if lab == S:
            inner = self.edge_label(c, 0)
            closed = self.pre[c][-1]
            assert self.args[c][1] == closed
            return _Labelled(inner.prefix + ((closed, ()),), inner.body)
        if lab == LAM:
            inner = self.edge_label(c, 0)
            entry, bindings = inner.prefix[-1]
            assert entry == c, "abstraction body lost its scope entry"
            body = inner.body
            if bindings:
                body = Let(_finished(bindings), body)
            return _Labelled(inner.prefix[:-1], Abs(_xname(c), body))
        if lab == APP:
            l0 = self.edge_label(c, 0)
            l1 = self.edge_label(c, 1)
            return _Labelled(
                _merge_prefix(l0.prefix, l1.prefix), TApp(l0.body, l1.body)
            )
        if lab == INDIR:
            inner = self.edge_label(c, 0)
            assert _vs0(inner.prefix) == self.pre[c]
            prefix = _set_binding(inner.prefix, _fname(c), inner.body)
            return _Labelled(prefix, Var(_fname(c)))
        raise AssertionError(f"unexpected label {lab}")

    def run(self) -> Term:
        for c in self.postorder:
            if c == self.top:
                continue
            self.tree_label[c] = self.synth(c)
        final = self.edge_label(self.top, 0)
        assert len(final.prefix) == 1, "scopes still open at the top"
        _, bindings = final.prefix[0]
        if bindings:
            return Let(_finished(bindings), final.body)
        return final.body


def readback(g: TermGraph) -> Term:
    """A letrec term whose maximal-prefix translation reproduces `g`.

    Bindings are introduced for exactly the shared vertices and declared at
    the innermost abstraction enclosing them (or at the top for closed ones).
    """
    return _Readback(g).run()


def maximal_shared_form(
    t: Term, *, unshare_vars: bool = True, unshare_s: bool = False
) -> Term:
    """Collapse the graph interpretation of `t` and read the result back.

    The optional unsharing passes split variable or delimiter vertices again
    before readback, suppressing bindings that would only alias a variable
    (on by default) or another binding (off by default).
    """
    g = collapse(translate_fo_max(t))
    if unshare_s:
        g = unshare_S(g)
    if unshare_vars:
        g = unshare_variables(g)
    return readback(g)


def unfolding_equivalent(a: Term, b: Term) -> bool:
    """Whether `a` and `b` have the same infinite unfolding, decided through
    bisimilarity of their graph interpretations."""
    return bisimilar(translate_fo_max(a), translate_fo_max(b))
