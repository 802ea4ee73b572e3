"""Maximal sharing for the lambda calculus with letrec.

Terms are interpreted as first-order term graphs whose bisimulation collapse
is the maximally shared form; a readback turns graphs into terms again, and
unfolding equivalence of terms is decided through graph bisimilarity.
"""

from .terms import (
    Abs,
    App,
    BH,
    BlackHole,
    Let,
    ParseError,
    Position,
    Term,
    Var,
    alpha_eq,
    free_vars,
    garbage_collect,
    parse,
    pretty,
    rename_apart,
    required_vars,
    subterm_at,
    term_size,
)
from .unfold import (
    FiniteTree,
    bounded_unfold,
    oracle_equiv,
    pretty_tree,
    tree_alpha_eq,
    unfold_step,
)
from .graphs import (
    AbsPrefix,
    NotALambdaTermGraph,
    TermGraph,
    dumps,
    graph_size,
    infer_abspre,
    is_eager_scope,
    isomorphic,
    loads,
    to_dot,
)
from .hograph import HoTermGraph, NotAHoTermGraph, check_ho, ho_bisimilar, ht, th
from .translate import translate_fo_max, translate_fo_min, translate_ho
from .bisim import bisimilar, collapse, unshare_S, unshare_variables
from .readback import maximal_shared_form, readback, unfolding_equivalent

__all__ = [
    "Abs", "App", "BH", "BlackHole", "Let", "ParseError", "Position", "Term",
    "Var", "alpha_eq", "free_vars", "garbage_collect", "parse", "pretty",
    "rename_apart", "required_vars", "subterm_at", "term_size",
    "FiniteTree", "bounded_unfold", "oracle_equiv", "pretty_tree",
    "tree_alpha_eq", "unfold_step",
    "AbsPrefix", "NotALambdaTermGraph", "TermGraph", "dumps", "graph_size",
    "infer_abspre", "is_eager_scope", "isomorphic", "loads", "to_dot",
    "HoTermGraph", "NotAHoTermGraph", "check_ho", "ho_bisimilar", "ht", "th",
    "translate_fo_max", "translate_fo_min", "translate_ho",
    "bisimilar", "collapse", "unshare_S", "unshare_variables",
    "maximal_shared_form", "readback", "unfolding_equivalent",
]
