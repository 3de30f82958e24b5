"""Command-line front end: ``xtl instantiate``, ``xtl validate`` and ``xtl nfa``.

Exit codes: 0 success/valid, 1 invalid instance, 2 usage or input error,
3 recursion guard tripped.
"""

from __future__ import annotations

import argparse
import json
import sys

from .derivatives import build_nfa, nfa_accepts, parse_regex, to_dot, transition_table
from .errors import RecursionLimitExceeded, XtlError
from .instantiate import DEFAULT_MAX_DEPTH, instantiate_start
from .models import doc_to_xtl, format_reg, format_xtl, xtl_to_doc
from .query import QueryContext, XPathPlugin
from .validate import prepare_instance, prepare_schema, validate_document
from .xmlcore import canonicalize, parse_document, serialize_document

EXIT_OK, EXIT_INVALID, EXIT_ERROR, EXIT_LIMIT = 0, 1, 2, 3


class _Fail(Exception):
    pass


def _load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise _Fail(f"{path}: {exc.strerror}") from exc
    try:
        return parse_document(text)
    except XtlError as exc:
        raise _Fail(f"{path}:{exc}") from exc


def cmd_instantiate(args):
    template = _load(args.template)
    data = _load(args.data)
    try:
        term = doc_to_xtl(template)
        if args.dump_xtl:
            print(format_xtl(term), file=sys.stderr)
        result = instantiate_start(term, QueryContext.root_of(data), XPathPlugin(), args.max_depth)
    except RecursionLimitExceeded:
        raise
    except XtlError as exc:
        raise _Fail(f"{args.template}: {type(exc).__name__}: {exc}") from exc
    out = serialize_document(canonicalize(xtl_to_doc(result))) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return EXIT_OK


def cmd_validate(args):
    schema = _load(args.schema)
    instance = _load(args.instance)
    try:
        if args.dump_reg:
            reg, env = prepare_schema(schema)
            print(f"instance: {format_reg(prepare_instance(instance))}")
            print(f"schema: {format_reg(reg)}")
            for name, body in env.items():
                print(f"macro {name}: {format_reg(body)}")
        result = validate_document(instance, schema, memo=args.memo, max_depth=args.max_depth)
    except RecursionLimitExceeded:
        raise
    except XtlError as exc:
        raise _Fail(f"{type(exc).__name__}: {exc}") from exc
    if args.json:
        print(json.dumps({"valid": result.valid, "last_valid_path": list(result.last_valid_path)}))
    elif result.valid:
        print("valid")
    else:
        print("invalid " + "/" + "/".join(map(str, result.last_valid_path)))
    return EXIT_OK if result.valid else EXIT_INVALID


def cmd_nfa(args):
    try:
        regex = parse_regex(args.regex)
    except XtlError as exc:
        raise _Fail(str(exc)) from exc
    nfa = build_nfa(regex)
    sys.stdout.write(transition_table(nfa))
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(to_dot(nfa))
    if args.accepts is not None:
        try:
            print("true" if nfa_accepts(nfa, args.accepts) else "false")
        except XtlError as exc:
            raise _Fail(str(exc)) from exc
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="xtl", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("instantiate", help="fill a template with instantiation data")
    p.add_argument("-t", "--template", required=True)
    p.add_argument("-d", "--data", required=True)
    p.add_argument("-o", "--output")
    p.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH,
                   help="maximum nesting of macro calls")
    p.add_argument("--dump-xtl", action="store_true", help="print the template term to stderr")
    p.set_defaults(func=cmd_instantiate)

    p = sub.add_parser("validate", help="check an instance against a template used as schema")
    p.add_argument("-s", "--schema", required=True)
    p.add_argument("-i", "--instance", required=True)
    p.add_argument("--memo", action="store_true", help="memoize (instance, schema) pairs")
    p.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH,
                   help="maximum nesting of macro unfoldings")
    p.add_argument("--dump-reg", action="store_true", help="print both expressions")
    p.add_argument("--json", action="store_true", help="print the result as JSON")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("nfa", help="build the partial-derivatives automaton of a regex")
    p.add_argument("regex")
    p.add_argument("--accepts", metavar="WORD")
    p.add_argument("--dot", metavar="FILE")
    p.set_defaults(func=cmd_nfa)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        return args.func(args)
    except _Fail as exc:
        print(f"xtl: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except RecursionLimitExceeded as exc:
        print(f"xtl: RecursionLimitExceeded: {exc}", file=sys.stderr)
        return EXIT_LIMIT


if __name__ == "__main__":
    sys.exit(main())
