"""Higher-order lambda term graphs (abstraction prefixes carried intrinsically)
and the correspondences with first-order graphs: delimiter insertion and
delimiter erasure."""

from __future__ import annotations

from dataclasses import dataclass

from . import bisim
from .graphs import (
    APP,
    BH,
    LAM,
    S,
    VAR0,
    AbsPrefix,
    GraphBuilder,
    TermGraph,
    infer_abspre,
    is_eager_scope,
)

_HO_LABELS = {APP, LAM, VAR0, BH}


class NotAHoTermGraph(ValueError):
    def __init__(self, vertex: int, clause: str):
        super().__init__(f"vertex {vertex}: clause {clause} violated")
        self.vertex = vertex
        self.clause = clause


@dataclass(frozen=True)
class HoTermGraph:
    graph: TermGraph
    prefix: AbsPrefix


def _is_prefix(p: tuple[int, ...], q: tuple[int, ...]) -> bool:
    return q[: len(p)] == p


def check_ho(g: TermGraph, pre: AbsPrefix) -> HoTermGraph:
    """Validate the correctness clauses of a prefix function over
    {@, lambda, 0, black hole} and wrap the pair."""
    for v, lab in enumerate(g.labels):
        if lab not in _HO_LABELS:
            raise NotAHoTermGraph(v, f"label {lab}")
        if v not in pre:
            raise NotAHoTermGraph(v, "missing prefix")
    if pre[g.root] != ():
        raise NotAHoTermGraph(g.root, "root")
    for v, lab in enumerate(g.labels):
        p = pre[v]
        if lab == BH and p != ():
            raise NotAHoTermGraph(v, "black hole")
        elif lab == LAM:
            if not _is_prefix(pre[g.args[v][0]], p + (v,)):
                raise NotAHoTermGraph(v, "lambda")
        elif lab == APP:
            for c in g.args[v]:
                if not _is_prefix(pre[c], p):
                    raise NotAHoTermGraph(v, "@")
        elif lab == VAR0:
            b = g.args[v][0]
            if g.labels[b] != LAM or pre[b] + (b,) != p:
                raise NotAHoTermGraph(v, "0")
    return HoTermGraph(g, dict(pre))


def ht(h: HoTermGraph) -> TermGraph:
    """Insert a chain of scope delimiters along every edge where the prefix
    shrinks; the first inserted delimiter closes the innermost scope.

    The result is a first-order lambda term graph with no shared delimiter
    vertex; fresh ids are allocated after all existing ones.
    """
    g, pre = h.graph, h.prefix
    n = len(g)
    labels = list(g.labels)
    args = [list(a) for a in g.args]
    for v in range(n):
        lab = g.labels[v]
        if lab == LAM:
            edges = [(0, g.args[v][0], pre[v] + (v,))]
        elif lab == APP:
            edges = [(0, g.args[v][0], pre[v]), (1, g.args[v][1], pre[v])]
        else:
            continue  # variable backlinks and black holes carry no scope edge
        for i, c, source_word in edges:
            target = pre[c]
            assert _is_prefix(target, source_word)
            prev = None
            for k in range(len(source_word), len(target), -1):
                s = len(labels)
                labels.append(S)
                args.append([-1, source_word[k - 1]])
                if prev is None:
                    args[v][i] = s
                else:
                    args[prev][0] = s
                prev = s
            if prev is not None:
                args[prev][0] = c
    return TermGraph(tuple(labels), tuple(tuple(a) for a in args), g.root)


def th(g: TermGraph) -> HoTermGraph:
    """Remove every delimiter vertex, connecting incoming and outgoing edges,
    and restrict the prefix function to the survivors."""
    pre = infer_abspre(g)
    keep = [v for v in range(len(g)) if g.labels[v] != S]
    new_id = {v: i for i, v in enumerate(keep)}

    def resolve(v: int) -> int:
        while g.labels[v] == S:
            v = g.args[v][0]
        return v

    labels = tuple(g.labels[v] for v in keep)
    args = tuple(tuple(new_id[resolve(c)] for c in g.args[v]) for v in keep)
    root = new_id[resolve(g.root)]
    new_pre = {new_id[v]: tuple(new_id[x] for x in pre[v]) for v in keep}
    return check_ho(TermGraph(labels, args, root), new_pre)


def ho_bisimilar(a: HoTermGraph, b: HoTermGraph) -> bool:
    """Bisimilarity of higher-order graphs, decided on their first-order
    delimiter interpretations (which preserve and reflect it)."""
    return bisim.bisimilar(ht(a), ht(b))


def ho_eager_scope(h: HoTermGraph) -> bool:
    return is_eager_scope(h.graph, h.prefix)
