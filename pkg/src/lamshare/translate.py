"""Interpretation of letrec terms as lambda term graphs.

One box-driven engine produces all three semantics: the higher-order graph,
the first-order graph with minimal prefixes (no delimiter sharing), and the
first-order graph with maximal prefixes under eager scope closure (delimiters
arising from one binding group are shared among its references).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .graphs import APP, BH, INDIR, LAM, S, VAR0, AbsPrefix, TermGraph
from .hograph import HoTermGraph, check_ho
from .terms import (
    Abs,
    App as TApp,
    BlackHole,
    Let,
    Term,
    Var,
    children,
    free_vars,
    garbage_collect,
    rename_apart,
)

_HO, _MIN, _MAX = "ho", "min", "max"


# ---------------------------------------------------------------------------
# Static analysis on a garbage-free, renamed-apart term
# ---------------------------------------------------------------------------

class _Analysis:
    """Per-node free variables, per-binding required variables, and the
    reference contexts that bound maximal binding placement."""

    def __init__(self, root: Term):
        self.root = root
        self.fv_lam: dict[int, frozenset[str]] = {}
        self.fv_rec: dict[int, frozenset[str]] = {}
        self._index(root)
        self.req = self._required_fixpoint()
        self.ref_reqs = self._reference_contexts()

    def _index(self, root: Term) -> None:
        binders: set[str] = set()
        self.rhs_of: dict[str, Term] = {}
        stack = [root]
        nodes = []
        while stack:
            t = stack.pop()
            nodes.append(t)
            if isinstance(t, Abs):
                binders.add(t.binder)
            elif isinstance(t, Let):
                for f, r in t.bindings:
                    self.rhs_of[f] = r
            stack.extend(children(t))
        self._lam_names = binders
        # free-variable sets, children before parents
        for t in reversed(nodes):
            match t:
                case Var(n):
                    if n in self.rhs_of:
                        lam, rec = frozenset(), frozenset((n,))
                    else:
                        lam, rec = frozenset((n,)), frozenset()
                case Abs(x, b):
                    lam = self.fv_lam[id(b)] - {x}
                    rec = self.fv_rec[id(b)]
                case TApp(f, a):
                    lam = self.fv_lam[id(f)] | self.fv_lam[id(a)]
                    rec = self.fv_rec[id(f)] | self.fv_rec[id(a)]
                case Let(bs, body):
                    group = frozenset(f for f, _ in bs)
                    lam = self.fv_lam[id(body)]
                    rec = self.fv_rec[id(body)]
                    for _, r in bs:
                        lam |= self.fv_lam[id(r)]
                        rec |= self.fv_rec[id(r)]
                    rec -= group
                case _:
                    lam, rec = frozenset(), frozenset()
            self.fv_lam[id(t)] = lam
            self.fv_rec[id(t)] = rec
        self._nodes = nodes  # keeps ids alive and provides iteration order

    def _required_fixpoint(self) -> dict[str, frozenset[str]]:
        """Lambda variables free in the complete unfolding of each binding's
        right-hand side (recursion variables followed into their equations)."""
        req = {f: self.fv_lam[id(r)] for f, r in self.rhs_of.items()}
        changed = True
        while changed:
            changed = False
            for f, r in self.rhs_of.items():
                acc = req[f]
                for g in self.fv_rec[id(r)]:
                    acc |= req[g]
                if acc != req[f]:
                    req[f] = acc
                    changed = True
        return req

    def node_req(self, t: Term) -> frozenset[str]:
        acc = self.fv_lam[id(t)]
        for g in self.fv_rec[id(t)]:
            acc |= self.req[g]
        return acc

    def _alias_closure(self, f: str, memo: dict[str, frozenset[str]]) -> frozenset[str]:
        if f in memo:
            return memo[f]
        memo[f] = frozenset((f,))  # cycle guard
        rhs = self.rhs_of[f]
        if isinstance(rhs, Var) and rhs.name in self.rhs_of:
            memo[f] = frozenset((f,)) | self._alias_closure(rhs.name, memo)
        return memo[f]

    def _reference_contexts(self) -> dict[str, list[frozenset[str]]]:
        """For each binding, the required-variable sets of every application
        or abstraction node in which it occurs free (closed under bare-alias
        bindings: a reference to an alias also constrains its target)."""
        memo: dict[str, frozenset[str]] = {}
        out: dict[str, set[frozenset[str]]] = {f: set() for f in self.rhs_of}
        for t in self._nodes:
            if not isinstance(t, (TApp, Abs)):
                continue
            rec = self.fv_rec[id(t)]
            if not rec:
                continue
            reqs = self.node_req(t)
            for g in rec:
                for f in self._alias_closure(g, memo):
                    out[f].add(reqs)
        return {f: sorted(s, key=sorted) for f, s in out.items()}


# ---------------------------------------------------------------------------
# Translation boxes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Entry:
    lam_name: Optional[str]  # None for the dummy leftmost entry
    lam_vid: Optional[int]
    bindings: dict[str, int]  # recursion variable -> indirection vertex


class _Engine:
    def __init__(self, term: Term, mode: str):
        fv = free_vars(term)
        if fv:
            raise ValueError(f"cannot translate open term; free: {sorted(fv)}")
        self.mode = mode
        t = rename_apart(garbage_collect(term))
        self.an = _Analysis(t)
        self.term = t
        self.labels: list[str] = []
        self.args: list[list[int]] = []
        self.prefix: list[tuple[int, ...]] = []
        self.root: Optional[int] = None

    # -- builder ------------------------------------------------------------

    def _new(self, label: str, prefix: tuple[int, ...], nargs: int) -> int:
        v = len(self.labels)
        self.labels.append(label)
        self.args.append([-1] * nargs)
        self.prefix.append(prefix)
        return v

    def _attach(self, slot: Optional[tuple[int, int]], v: int) -> None:
        if slot is None:
            self.root = v
        else:
            self.args[slot[0]][slot[1]] = v

    # -- placement ----------------------------------------------------------

    @staticmethod
    def _stop_index(names: frozenset[str], entry_index: dict[str, int], m: int) -> int:
        """Deepest entry a required-variable set reaches; names bound below
        the current chain push the stop past the end."""
        stop = 0
        for x in names:
            i = entry_index.get(x)
            if i is None:
                return m + 1
            if i > stop:
                stop = i
        return stop

    def _levels(self, bs, entries) -> list[int]:
        m = len(entries) - 1
        entry_index = {e.lam_name: i for i, e in enumerate(entries) if i > 0}
        levels = []
        for f, _ in bs:
            low = self._stop_index(self.an.req[f], entry_index, m)
            assert low <= m, "binding requires a variable outside its chain"
            if self.mode == _MAX:
                level = m
                for reqs in self.an.ref_reqs[f]:
                    level = min(level, self._stop_index(reqs, entry_index, m))
                assert level >= low
            else:
                level = low
            levels.append(level)
        return levels

    # -- main loop ----------------------------------------------------------

    def run(self) -> tuple[TermGraph, AbsPrefix]:
        stack: list[tuple[tuple[_Entry, ...], Term, Optional[tuple[int, int]]]] = [
            ((_Entry(None, None, {}),), self.term, None)
        ]
        while stack:
            entries, node, slot = stack.pop()
            fvl = self.an.fv_lam[id(node)]
            fvr = self.an.fv_rec[id(node)]
            # eager scope closure: drop unneeded trailing entries first
            while len(entries) > 1:
                e = entries[-1]
                if e.lam_name in fvl or any(f in fvr for f in e.bindings):
                    break
                if self.mode != _HO:
                    s = self._new(S, tuple(x.lam_vid for x in entries[1:]), 2)
                    self.args[s][1] = e.lam_vid
                    self._attach(slot, s)
                    slot = (s, 0)
                entries = entries[:-1]
            word = tuple(e.lam_vid for e in entries[1:])
            match node:
                case Var(n):
                    e = entries[-1]
                    if n == e.lam_name:
                        v = self._new(VAR0, word, 1)
                        self.args[v][0] = e.lam_vid
                        self._attach(slot, v)
                    else:
                        assert n in e.bindings, f"unresolved variable {n}"
                        self._attach(slot, e.bindings[n])
                case BlackHole():
                    assert word == ()
                    self._attach(slot, self._new(BH, (), 0))
                case Abs(x, b):
                    v = self._new(LAM, word, 1)
                    self._attach(slot, v)
                    stack.append((entries + (_Entry(x, v, {}),), b, (v, 0)))
                case TApp(f, a):
                    v = self._new(APP, word, 2)
                    self._attach(slot, v)
                    stack.append((entries, a, (v, 1)))
                    stack.append((entries, f, (v, 0)))
                case Let(bs, body):
                    levels = self._levels(bs, entries)
                    indirs = []
                    for (f, _), level in zip(bs, levels):
                        w = self._new(INDIR, tuple(e.lam_vid for e in entries[1 : level + 1]), 1)
                        indirs.append(w)
                    new_entries = []
                    for i, e in enumerate(entries):
                        extra = {
                            f: w
                            for ((f, _), level, w) in zip(bs, levels, indirs)
                            if level == i
                        }
                        new_entries.append(
                            _Entry(e.lam_name, e.lam_vid, {**e.bindings, **extra})
                            if extra
                            else e
                        )
                    new_entries = tuple(new_entries)
                    for ((f, rhs), level, w) in reversed(list(zip(bs, levels, indirs))):
                        stack.append((new_entries[: level + 1], rhs, (w, 0)))
                    stack.append((new_entries, body, slot))
                case _:
                    raise TypeError(f"not a term: {node!r}")
        assert self.root is not None
        return self._erase_indirections()

    # -- indirection erasure --------------------------------------------------

    def _erase_indirections(self) -> tuple[TermGraph, AbsPrefix]:
        """Remove indirection vertices, redirecting their incoming edges; a
        cycle of indirections stands for a meaningless binding and becomes a
        black hole behind one delimiter per open scope."""
        n = len(self.labels)
        resolved: dict[int, tuple[str, int]] = {}
        cycles: dict[int, list[int]] = {}  # min member -> members

        for v in range(n):
            if self.labels[v] != INDIR or v in resolved:
                continue
            trail: list[int] = []
            pos: dict[int, int] = {}
            cur = v
            while True:
                if self.labels[cur] != INDIR:
                    final = ("vertex", cur)
                    break
                if cur in resolved:
                    final = resolved[cur]
                    break
                if cur in pos:
                    members = trail[pos[cur] :]
                    key = min(members)
                    cycles[key] = members
                    for w in members:
                        resolved[w] = ("cycle", key)
                    final = ("cycle", key)
                    trail = trail[: pos[cur]]
                    break
                pos[cur] = len(trail)
                trail.append(cur)
                cur = self.args[cur][0]
            for w in trail:
                resolved[w] = final

        keep = [v for v in range(n) if self.labels[v] != INDIR]
        new_id = {v: i for i, v in enumerate(keep)}
        nlabels = [self.labels[v] for v in keep]
        nargs: list[list[int]] = [[] for _ in keep]
        npre = {i: tuple(new_id[x] for x in self.prefix[v]) for i, v in enumerate(keep)}

        chain_head: dict[int, int] = {}
        for key in sorted(cycles):
            word = self.prefix[key]
            assert all(
                len(self.prefix[w]) == len(word) for w in cycles[key]
            ), "indirection cycle with unequal scopes"
            prev = None
            if self.mode != _HO:
                for k in range(len(word), 0, -1):
                    sid = len(nlabels)
                    nlabels.append(S)
                    nargs.append([-1, new_id[word[k - 1]]])
                    npre[sid] = tuple(new_id[x] for x in word[:k])
                    if prev is None:
                        chain_head[key] = sid
                    else:
                        nargs[prev][0] = sid
                    prev = sid
            hole = len(nlabels)
            nlabels.append(BH)
            nargs.append([])
            npre[hole] = ()
            if prev is not None:
                nargs[prev][0] = hole
            else:
                chain_head[key] = hole

        def remap(v: int) -> int:
            if self.labels[v] == INDIR:
                kind, t = resolved[v]
                return chain_head[t] if kind == "cycle" else new_id[t]
            return new_id[v]

        for i, v in enumerate(keep):
            nargs[i] = [remap(c) for c in self.args[v]]
        root = remap(self.root)
        g = TermGraph(tuple(nlabels), tuple(tuple(a) for a in nargs), root)
        return g, npre


# ---------------------------------------------------------------------------
# Public entry points
# ---------------------------------------------------------------------------

def translate_ho(t: Term) -> HoTermGraph:
    """Eager-scope higher-order graph of `t` (minimal abstraction prefixes)."""
    g, pre = _Engine(t, _HO).run()
    return check_ho(g, pre)


def translate_fo_min(t: Term) -> TermGraph:
    """First-order graph with minimal prefixes; no delimiter vertex is shared.

    Coincides with inserting delimiters into the higher-order graph.
    """
    g, _ = _Engine(t, _MIN).run()
    return g


def translate_fo_max(t: Term) -> TermGraph:
    """First-order eager-scope graph with maximal prefixes: bindings sink only
    as far as eager scope closure forces, so delimiters arising from one
    binding group are shared among that group's references."""
    g, _ = _Engine(t, _MAX).run()
    return g
