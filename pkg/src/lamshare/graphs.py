"""First-order term graphs over {@, lambda, 0, S, black hole} with abstraction
prefixes, plus the transient INDIR/TOP labels used by translation and readback."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

APP = "APP"
LAM = "LAM"
VAR0 = "VAR0"
S = "S"
BH = "BH"
INDIR = "INDIR"
TOP = "TOP"

ARITY = {APP: 2, LAM: 1, VAR0: 1, S: 2, BH: 0, INDIR: 1, TOP: 1}

# (label, argument index) pairs that are backlinks to an abstraction vertex
_BACKLINK = {(VAR0, 0), (S, 1)}

AbsPrefix = dict[int, tuple[int, ...]]


def is_backlink(label: str, index: int) -> bool:
    return (label, index) in _BACKLINK


class NotALambdaTermGraph(ValueError):
    def __init__(self, vertex: int, clause: str):
        super().__init__(f"vertex {vertex}: clause {clause} violated")
        self.vertex = vertex
        self.clause = clause


@dataclass(frozen=True)
class TermGraph:
    """Rooted term graph with dense vertex ids and ordered argument edges."""

    labels: tuple[str, ...]
    args: tuple[tuple[int, ...], ...]
    root: int

    def __post_init__(self):
        n = len(self.labels)
        if len(self.args) != n:
            raise ValueError("labels/args length mismatch")
        if not 0 <= self.root < n:
            raise ValueError("root out of range")
        for v, (lab, a) in enumerate(zip(self.labels, self.args)):
            if lab not in ARITY:
                raise ValueError(f"vertex {v}: unknown label {lab!r}")
            if len(a) != ARITY[lab]:
                raise ValueError(f"vertex {v}: arity mismatch for {lab}")
            for c in a:
                if not 0 <= c < n:
                    raise ValueError(f"vertex {v}: argument {c} out of range")
        seen = [False] * n
        stack = [self.root]
        seen[self.root] = True
        while stack:
            v = stack.pop()
            for c in self.args[v]:
                if not seen[c]:
                    seen[c] = True
                    stack.append(c)
        if not all(seen):
            raise ValueError("graph is not root-connected")

    def __len__(self) -> int:
        return len(self.labels)


def graph_size(g: TermGraph) -> int:
    return len(g.labels)


class GraphBuilder:
    """Single-owner mutable builder; freeze() yields the immutable graph."""

    def __init__(self):
        self.labels: list[str] = []
        self.args: list[list[int]] = []
        self.root: Optional[int] = None

    def add(self, label: str, *args: int) -> int:
        v = len(self.labels)
        self.labels.append(label)
        self.args.append(list(args) if args else [-1] * ARITY[label])
        return v

    def connect(self, v: int, index: int, target: int) -> None:
        self.args[v][index] = target

    def freeze(self) -> TermGraph:
        assert self.root is not None, "root not set"
        return TermGraph(
            tuple(self.labels),
            tuple(tuple(a) for a in self.args),
            self.root,
        )


# ---------------------------------------------------------------------------
# Abstraction-prefix inference
# ---------------------------------------------------------------------------

def infer_abspre(g: TermGraph) -> AbsPrefix:
    """Compute the unique correct abstraction-prefix function of `g`.

    Forward worklist propagation from the root; every local clause of the
    correctness definition is checked on the way, and vertices reached on
    several paths must agree.  Raises NotALambdaTermGraph otherwise.
    """
    for v, lab in enumerate(g.labels):
        if lab in (INDIR, TOP):
            raise ValueError(f"vertex {v}: transient label {lab} not allowed here")

    pre: dict[int, tuple[int, ...]] = {}

    def assign(v: int, p: tuple[int, ...], clause: str) -> bool:
        if v in pre:
            if pre[v] != p:
                raise NotALambdaTermGraph(v, clause)
            return False
        pre[v] = p
        return True

    assign(g.root, (), "root")
    work = [g.root]
    while work:
        v = work.pop()
        p = pre[v]
        lab = g.labels[v]
        if lab == LAM:
            if assign(g.args[v][0], p + (v,), "lambda"):
                work.append(g.args[v][0])
        elif lab == APP:
            for c in g.args[v]:
                if assign(c, p, "@"):
                    work.append(c)
        elif lab == VAR0:
            b = g.args[v][0]
            if g.labels[b] != LAM or not p or p[-1] != b:
                raise NotALambdaTermGraph(v, "0")
            if assign(b, p[:-1], "0"):
                work.append(b)
        elif lab == S:
            if not p:
                raise NotALambdaTermGraph(v, "S1")
            b = g.args[v][1]
            if g.labels[b] != LAM or p[-1] != b:
                raise NotALambdaTermGraph(v, "S2")
            if assign(g.args[v][0], p[:-1], "S1"):
                work.append(g.args[v][0])
            if assign(b, p[:-1], "S2"):
                work.append(b)
        elif lab == BH:
            if p != ():
                raise NotALambdaTermGraph(v, "black hole")
    # root-connectedness guarantees every vertex was reached
    assert len(pre) == len(g.labels)
    return pre


def is_lambda_term_graph(g: TermGraph) -> bool:
    try:
        infer_abspre(g)
        return True
    except NotALambdaTermGraph:
        return False


# ---------------------------------------------------------------------------
# Eager scope
# ---------------------------------------------------------------------------

def is_eager_scope(g: TermGraph, pre: AbsPrefix) -> bool:
    """Every open scope is closed as early as possible.

    For each non-delimiter vertex w whose prefix ends in v there must be a
    path from w to a variable vertex with backlink v, staying at prefixes
    that extend P(w).  Delimiter vertices close their own scope on the spot
    and are exempt (their successor already left the scope).
    """
    for w, p in pre.items():
        if not p or g.labels[w] == S:
            continue
        v = p[-1]
        if not _reaches_use(g, pre, w, v, p):
            return False
    return True


def _reaches_use(g: TermGraph, pre: AbsPrefix, w: int, v: int, p: tuple[int, ...]) -> bool:
    seen = {w}
    stack = [w]
    while stack:
        u = stack.pop()
        if g.labels[u] == VAR0 and g.args[u][0] == v:
            return True
        for c in g.args[u]:
            if c not in seen and pre[c][: len(p)] == p:
                seen.add(c)
                stack.append(c)
    return False


# ---------------------------------------------------------------------------
# Isomorphism
# ---------------------------------------------------------------------------

def isomorphic(a: TermGraph, b: TermGraph) -> bool:
    """Bijective root/label/argument-preserving correspondence.

    Since argument edges are ordered, a simultaneous traversal from both
    roots decides this deterministically.
    """
    if len(a) != len(b):
        return False
    fwd: dict[int, int] = {}
    bwd: dict[int, int] = {}
    stack = [(a.root, b.root)]
    while stack:
        u, v = stack.pop()
        if u in fwd:
            if fwd[u] != v:
                return False
            continue
        if v in bwd:
            return False
        if a.labels[u] != b.labels[v]:
            return False
        fwd[u] = v
        bwd[v] = u
        stack.extend(zip(a.args[u], b.args[v]))
    return True


# ---------------------------------------------------------------------------
# Output formats
# ---------------------------------------------------------------------------

_DOT_SYMBOL = {APP: "@", LAM: "λ", VAR0: "0", S: "S", BH: "•",
               INDIR: "|", TOP: "⊤"}


def to_dot(g: TermGraph, pre: Optional[AbsPrefix] = None) -> str:
    """Graphviz rendering; backlink edges are dashed, prefixes become xlabels."""
    lines = ["digraph termgraph {", "  node [shape=circle];"]
    for v, lab in enumerate(g.labels):
        attrs = [f'label="{_DOT_SYMBOL[lab]}"']
        if pre is not None and v in pre:
            word = " ".join(f"v{x}" for x in pre[v])
            attrs.append(f'xlabel="({word})"')
        if v == g.root:
            attrs.append("penwidth=2")
        lines.append(f"  n{v} [{', '.join(attrs)}];")
    for v, lab in enumerate(g.labels):
        for i, c in enumerate(g.args[v]):
            style = ', style=dashed' if is_backlink(lab, i) else ""
            lines.append(f'  n{v} -> n{c} [label="{i}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def dumps(g: TermGraph) -> str:
    """Plain-text dump, one `id: LABEL -> args` line per vertex, root first."""
    order = [g.root] + [v for v in range(len(g)) if v != g.root]
    lines = []
    for v in order:
        tail = ",".join(str(c) for c in g.args[v])
        lines.append(f"{v}: {g.labels[v]} -> {tail}" if tail else f"{v}: {g.labels[v]} ->")
    return "\n".join(lines) + "\n"


def loads(text: str) -> TermGraph:
    """Parse the dump format produced by `dumps`; the first line is the root."""
    entries: dict[int, tuple[str, tuple[int, ...]]] = {}
    root = None
    for line in text.strip().splitlines():
        line = line.strip()
        if not line:
            continue
        head, _, tail = line.partition("->")
        vid_s, _, lab = head.partition(":")
        v = int(vid_s.strip())
        lab = lab.strip()
        args = tuple(int(x) for x in tail.strip().split(",") if x.strip())
        entries[v] = (lab, args)
        if root is None:
            root = v
    if root is None:
        raise ValueError("empty graph dump")
    n = max(entries) + 1
    if sorted(entries) != list(range(n)):
        raise ValueError("vertex ids must be dense")
    labels = tuple(entries[v][0] for v in range(n))
    args = tuple(entries[v][1] for v in range(n))
    return TermGraph(labels, args, root)
