"""Bisimilarity, bisimulation collapse (DFA-style state minimisation), and the
unsharing post-passes on first-order term graphs."""

from __future__ import annotations

from collections import deque

from .graphs import S, VAR0, TermGraph, is_backlink


# ---------------------------------------------------------------------------
# Bisimilarity by union-find pairing
# ---------------------------------------------------------------------------

class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, a: int, b: int) -> None:
        self.parent[self.find(b)] = self.find(a)


def bisimilar(a: TermGraph, b: TermGraph) -> bool:
    """Whether a bisimulation relating the roots exists.

    Union-find pairing over the disjoint union of the vertex sets: merge the
    roots, then propagate merges along argument words, failing on any label
    clash.  Sound and complete because argument edges are ordered, so the
    graphs are deterministic.
    """
    na = len(a)
    uf = _UnionFind(na + len(b))
    labels = a.labels + b.labels
    args = a.args + tuple(tuple(c + na for c in w) for w in b.args)

    uf.union(a.root, b.root + na)
    stack = [(a.root, b.root + na)]
    while stack:
        u, v = stack.pop()
        if labels[u] != labels[v]:
            return False
        for cu, cv in zip(args[u], args[v]):
            ru, rv = uf.find(cu), uf.find(cv)
            if ru != rv:
                uf.union(ru, rv)
                stack.append((cu, cv))
    return True


# ---------------------------------------------------------------------------
# Bisimulation collapse via Hopcroft partition refinement
# ---------------------------------------------------------------------------

def _refine(labels, args) -> list[int]:
    """Coarsest argument-respecting refinement of the label partition.

    Hopcroft's algorithm with the smaller-half worklist rule; vertices are
    DFA states, argument indices the alphabet.  Runs in O(n log n) edge
    touches.
    """
    n = len(labels)
    max_arity = max((len(a) for a in args), default=0)

    # inverse transitions per argument index, in CSR form
    preds = []
    for i in range(max_arity):
        cnt = [0] * (n + 1)
        for u in range(n):
            if len(args[u]) > i:
                cnt[args[u][i] + 1] += 1
        for v in range(n):
            cnt[v + 1] += cnt[v]
        flat = [0] * cnt[n]
        fill = cnt[:]
        for u in range(n):
            if len(args[u]) > i:
                v = args[u][i]
                flat[fill[v]] = u
                fill[v] += 1
        preds.append((cnt, flat))

    # refinable partition: elems grouped by block, with location index
    by_label: dict[str, list[int]] = {}
    for v in range(n):
        by_label.setdefault(labels[v], []).append(v)
    elems: list[int] = []
    loc = [0] * n
    blk = [0] * n
    first: list[int] = []
    past: list[int] = []
    for b, (_, members) in enumerate(sorted(by_label.items())):
        first.append(len(elems))
        for v in members:
            loc[v] = len(elems)
            blk[v] = b
            elems.append(v)
        past.append(len(elems))

    marked = [0] * len(first)
    work: deque[tuple[int, int]] = deque(
        (b, i) for b in range(len(first)) for i in range(max_arity)
    )

    while work:
        a_blk, i = work.popleft()
        cnt, flat = preds[i]
        touched = []
        # snapshot: marking may permute this very block mid-scan
        for v in elems[first[a_blk] : past[a_blk]]:
            for k in range(cnt[v], cnt[v + 1]):
                u = flat[k]
                b = blk[u]
                if loc[u] >= first[b] + marked[b]:
                    if marked[b] == 0:
                        touched.append(b)
                    # swap u into the marked zone at the front of its block
                    m = first[b] + marked[b]
                    other = elems[m]
                    elems[m], elems[loc[u]] = u, other
                    loc[other] = loc[u]
                    loc[u] = m
                    marked[b] += 1
        for b in touched:
            m = marked[b]
            marked[b] = 0
            size = past[b] - first[b]
            if m == size:
                continue
            # new block takes the smaller side; the old id keeps the larger
            new = len(first)
            if m <= size - m:
                first.append(first[b])
                past.append(first[b] + m)
                first[b] += m
            else:
                first.append(first[b] + m)
                past.append(past[b])
                past[b] = first[b] + m
            marked.append(0)
            for pos in range(first[new], past[new]):
                blk[elems[pos]] = new
            for j in range(max_arity):
                work.append((new, j))
    return blk


def collapse(g: TermGraph) -> TermGraph:
    """Canonical bisimulation collapse: the root-connected part of the factor
    graph by the largest self-bisimulation.

    Class ids are ordered by their minimum member, so collapsing the same
    graph twice yields an identical (not just isomorphic) result.
    """
    blk = _refine(g.labels, g.args)
    rep: dict[int, int] = {}
    for v in range(len(g)):
        b = blk[v]
        if b not in rep or v < rep[b]:
            rep[b] = v

    # restrict to classes reachable from the root class
    reachable = {blk[g.root]}
    stack = [blk[g.root]]
    while stack:
        b = stack.pop()
        for c in g.args[rep[b]]:
            if blk[c] not in reachable:
                reachable.add(blk[c])
                stack.append(blk[c])

    order = sorted(reachable, key=lambda b: rep[b])
    new_id = {b: i for i, b in enumerate(order)}
    labels = tuple(g.labels[rep[b]] for b in order)
    args = tuple(tuple(new_id[blk[c]] for c in g.args[rep[b]]) for b in order)
    return TermGraph(labels, args, new_id[blk[g.root]])


# ---------------------------------------------------------------------------
# Unsharing passes
# ---------------------------------------------------------------------------

def _unshare(g: TermGraph, split_label: str) -> TermGraph:
    """Rebuild `g` duplicating every `split_label` vertex per incoming
    non-backlink edge.  Copies recurse along chains of split vertices; the
    first non-split vertex below stays shared."""
    labels: list[str] = []
    args: list[list[int]] = []
    memo: dict[int, int] = {}

    def alloc(v: int) -> int:
        nid = len(labels)
        labels.append(g.labels[v])
        args.append([-1] * len(g.args[v]))
        return nid

    # explicit stack: (old vertex, new id, next argument index)
    root_new = alloc(g.root)
    if g.labels[g.root] != split_label:
        memo[g.root] = root_new
    stack = [(g.root, root_new, 0)]
    while stack:
        v, nid, i = stack.pop()
        if i == len(g.args[v]):
            continue
        stack.append((v, nid, i + 1))
        c = g.args[v][i]
        if is_backlink(g.labels[v], i) or (g.labels[c] != split_label and c in memo):
            # backlinks always resolve through the memo (targets are LAM,
            # visited on every access path before their backlinks)
            args[nid][i] = memo[c]
            continue
        cid = alloc(c)
        if g.labels[c] != split_label:
            memo[c] = cid
        args[nid][i] = cid
        stack.append((c, cid, 0))
    return TermGraph(tuple(labels), tuple(tuple(a) for a in args), root_new)


def unshare_S(g: TermGraph) -> TermGraph:
    """Duplicate shared scope-delimiter vertices, one copy per incoming edge."""
    return _unshare(g, S)


def unshare_variables(g: TermGraph) -> TermGraph:
    """Duplicate shared variable vertices, one copy per incoming edge; keeps
    the readback from binding plain variable occurrences in a let."""
    return _unshare(g, VAR0)
