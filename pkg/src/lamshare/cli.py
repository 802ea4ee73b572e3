"""Command-line interface: parse, unfold, translate, collapse, compactify and
compare letrec terms."""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from . import bisim, graphs, readback, terms, translate, unfold

EXIT_OK = 0
EXIT_NOT_EQUIVALENT = 1
EXIT_INPUT_ERROR = 2
EXIT_INTERNAL_ERROR = 3


def _read_source(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _parse_file(path: str) -> terms.Term:
    return terms.parse(_read_source(path))


def _translation(args) -> graphs.TermGraph:
    t = _parse_file(args.file)
    if args.semantics == "min":
        return translate.translate_fo_min(t)
    return translate.translate_fo_max(t)


def _emit(args, text: str) -> None:
    if args.output is None:
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)


def _cmd_show(args) -> int:
    _emit(args, terms.pretty(_parse_file(args.file)) + "\n")
    return EXIT_OK


def _cmd_gc(args) -> int:
    _emit(args, terms.pretty(terms.garbage_collect(_parse_file(args.file))) + "\n")
    return EXIT_OK


def _cmd_unfold(args) -> int:
    tree = unfold.bounded_unfold(_parse_file(args.file), args.depth)
    _emit(args, unfold.pretty_tree(tree) + "\n")
    return EXIT_OK


def _cmd_translate(args) -> int:
    _emit(args, graphs.dumps(_translation(args)))
    return EXIT_OK


def _cmd_dot(args) -> int:
    g = _translation(args)
    _emit(args, graphs.to_dot(g, graphs.infer_abspre(g)))
    return EXIT_OK


def _cmd_collapse(args) -> int:
    _emit(args, graphs.dumps(bisim.collapse(_translation(args))))
    return EXIT_OK


def _cmd_maxshare(args) -> int:
    t = _parse_file(args.file)
    out = readback.maximal_shared_form(
        t, unshare_vars=args.unshare_vars, unshare_s=args.unshare_s
    )
    _emit(args, terms.pretty(out) + "\n")
    return EXIT_OK


def _cmd_equiv(args) -> int:
    a = _parse_file(args.file)
    b = _parse_file(args.file2)
    if readback.unfolding_equivalent(a, b):
        _emit(args, "equivalent\n")
        return EXIT_OK
    _emit(args, "not equivalent\n")
    return EXIT_NOT_EQUIVALENT


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lamshare",
        description="Maximal sharing for the lambda calculus with letrec.",
    )
    p.add_argument("-o", "--output", default=None, help="write output to a file")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("show", _cmd_show, "parse and print a term")
    sp.add_argument("file")

    sp = add("gc", _cmd_gc, "remove unused bindings")
    sp.add_argument("file")

    sp = add("unfold", _cmd_unfold, "print the depth-bounded unfolding")
    sp.add_argument("--depth", type=int, default=10)
    sp.add_argument("file")

    for name, fn, help_ in [
        ("translate", _cmd_translate, "print the term graph"),
        ("dot", _cmd_dot, "print the term graph in DOT format"),
        ("collapse", _cmd_collapse, "print the collapsed term graph"),
    ]:
        sp = add(name, fn, help_)
        sp.add_argument("--semantics", choices=["min", "max"], default="max")
        sp.add_argument("file")

    sp = add("maxshare", _cmd_maxshare, "print the maximally shared form")
    sp.add_argument("--unshare-vars", action=argparse.BooleanOptionalAction, default=True)
    sp.add_argument("--unshare-s", action=argparse.BooleanOptionalAction, default=False)
    sp.add_argument("file")

    sp = add("equiv", _cmd_equiv, "decide unfolding equivalence of two terms")
    sp.add_argument("file")
    sp.add_argument("file2")

    return p


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (terms.ParseError, FileNotFoundError, ValueError) as exc:
        if isinstance(exc, graphs.NotALambdaTermGraph):
            print(f"internal error: {exc}", file=sys.stderr)
            return EXIT_INTERNAL_ERROR
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except AssertionError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
