"""A small path-query language used as the reference placeholder plugin.

Grammar (whitespace around tokens is ignored)::

    select    := INT | 'true' | 'false' | postest | path
    postest   := 'position()' ('==' | '=') INT
               | 'position()' 'mod' INT '=' INT
    path      := '/' | ('/' | '//')? step (('/' | '//') step)*
    step      := '.' | NAME pred? | '*' pred? | '@' NAME      (attribute steps come last)
    pred      := '[' postest ']'

``//`` searches descendants-or-self in document order, a leading ``/`` starts at the
document node (whose only child is the root element) and a bare step is relative
to the context node. Predicates filter the whole match list of their step by
1-based position.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

from .errors import QuerySyntaxError
from .xmlcore import Element, QName, string_value

DOCUMENT = QName("", "#document")


@dataclass(frozen=True)
class QueryContext:
    root: Element            # the document node
    node: Union[Element, str]
    position: int = 1
    size: int = 1

    @classmethod
    def root_of(cls, data: Element) -> "QueryContext":
        doc = Element(DOCUMENT, (), (data,))
        return cls(doc, doc)


@dataclass(frozen=True)
class PosTest:
    modulus: Optional[int]   # None: plain equality with ``value``
    value: int

    def holds(self, position: int) -> bool:
        if self.modulus is None:
            return position == self.value
        return position % self.modulus == self.value


@dataclass(frozen=True)
class Step:
    kind: str                # "child", "descendant", "self", "attribute"
    name: str = "*"
    pred: Optional[PosTest] = None


@dataclass(frozen=True)
class Literal:
    text: str
    truth: bool


@dataclass(frozen=True)
class PathExpr:
    absolute: bool
    steps: tuple[Step, ...]


Query = Union[Literal, PosTest, PathExpr]

_TOKEN = re.compile(r"\s*(position\(\)|//|==|[/\[\]=@*.]|\d+|[A-Za-z_][\w.\-]*(?::[A-Za-z_][\w.\-]*)?)")


def _tokens(expr):
    pos, out = 0, []
    stripped = expr.rstrip()
    while pos < len(stripped):
        m = _TOKEN.match(stripped, pos)
        if not m:
            raise QuerySyntaxError(expr, f"unexpected character {stripped[pos:].lstrip()[:1]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


@lru_cache(maxsize=1024)
def parse_query(expr: str) -> Query:
    toks = _tokens(expr)
    if not toks:
        raise QuerySyntaxError(expr, "empty expression")
    if len(toks) == 1 and toks[0].isdigit():
        return Literal(str(int(toks[0])), int(toks[0]) != 0)
    if toks in (["true"], ["false"]):
        return Literal(toks[0], toks[0] == "true")
    if toks[0] == "position()":
        test, rest = _postest(expr, toks)
        if rest:
            raise QuerySyntaxError(expr, f"unexpected {rest[0]!r} after position test")
        return test
    return _path(expr, toks)


def _postest(expr, toks):
    def num(i):
        if i >= len(toks) or not toks[i].isdigit():
            raise QuerySyntaxError(expr, "expected an integer")
        return int(toks[i])

    if len(toks) > 1 and toks[1] in ("==", "="):
        k = num(2)
        if k < 1:
            raise QuerySyntaxError(expr, "positions start at 1")
        return PosTest(None, k), toks[3:]
    if len(toks) > 1 and toks[1] == "mod":
        m = num(2)
        if m < 1 or len(toks) < 4 or toks[3] != "=":
            raise QuerySyntaxError(expr, "expected 'position() mod N=R'")
        r = num(4)
        if r >= m:
            raise QuerySyntaxError(expr, f"remainder {r} out of range for mod {m}")
        return PosTest(m, r), toks[5:]
    raise QuerySyntaxError(expr, "expected '==' or 'mod' after position()")


def _path(expr, toks):
    if toks == ["/"]:
        return PathExpr(True, ())
    i = 0
    absolute = False
    axis = "child"
    if toks[0] == "//":
        absolute, axis, i = True, "descendant", 1
    elif toks[0] == "/":
        absolute, i = True, 1
    steps = []
    while True:
        if i >= len(toks):
            raise QuerySyntaxError(expr, "path ends with a separator")
        tok = toks[i]
        if tok == ".":
            if axis != "child":
                raise QuerySyntaxError(expr, "'.' cannot follow '//'")
            steps.append(Step("self"))
            i += 1
        elif tok == "@":
            if i + 1 >= len(toks) or not re.match(r"[A-Za-z_]", toks[i + 1]):
                raise QuerySyntaxError(expr, "expected an attribute name after '@'")
            if axis != "child":
                raise QuerySyntaxError(expr, "'@' cannot follow '//'")
            steps.append(Step("attribute", toks[i + 1]))
            i += 2
            if i != len(toks):
                raise QuerySyntaxError(expr, "an attribute step must come last")
            break
        elif tok == "*" or re.match(r"[A-Za-z_]", tok) and tok != "position()":
            i += 1
            pred = None
            if i < len(toks) and toks[i] == "[":
                try:
                    close = toks.index("]", i)
                except ValueError:
                    raise QuerySyntaxError(expr, "unclosed '['") from None
                inner = toks[i + 1:close]
                if not inner or inner[0] != "position()":
                    raise QuerySyntaxError(expr, "only position() predicates are supported")
                pred, rest = _postest(expr, inner)
                if rest:
                    raise QuerySyntaxError(expr, f"unexpected {rest[0]!r} in predicate")
                i = close + 1
            steps.append(Step(axis, tok, pred))
        else:
            raise QuerySyntaxError(expr, f"unexpected {tok!r}")
        if i == len(toks):
            break
        if toks[i] == "/":
            axis = "child"
        elif toks[i] == "//":
            axis = "descendant"
        else:
            raise QuerySyntaxError(expr, f"expected '/' before {toks[i]!r}")
        i += 1
    return PathExpr(absolute, tuple(steps))


def _named(node, name):
    return name == "*" or str(node.name) == name


def _descendants(node):
    # descendant-or-self::node()/child::* in document order
    for child in node.children:
        if isinstance(child, Element):
            yield child
            yield from _descendants(child)


def eval_path(expr: Union[str, PathExpr], ctx: QueryContext) -> list[QueryContext]:
    """Match list for a path expression; each result carries its 1-based position."""
    if isinstance(expr, str):
        parsed = parse_query(expr)
        if not isinstance(parsed, PathExpr):
            raise QuerySyntaxError(expr, "not a path expression")
        expr = parsed
    nodes = [ctx.root if expr.absolute else ctx.node]
    for step in expr.steps:
        found = []
        seen = set()
        for node in nodes:
            if not isinstance(node, Element):
                continue
            if step.kind == "self":
                candidates = [node]
            elif step.kind == "attribute":
                value = node.get(step.name)
                candidates = [] if value is None else [value]
            elif step.kind == "child":
                candidates = [c for c in node.children
                              if isinstance(c, Element) and _named(c, step.name)]
            else:
                candidates = [c for c in _descendants(node) if _named(c, step.name)]
            for c in candidates:
                if isinstance(c, str) or id(c) not in seen:
                    if not isinstance(c, str):
                        seen.add(id(c))
                    found.append(c)
        if step.pred is not None:
            found = [n for k, n in enumerate(found, 1) if step.pred.holds(k)]
        nodes = found
    size = len(nodes)
    return [QueryContext(ctx.root, n, k, size) for k, n in enumerate(nodes, 1)]


def text_value(ctx: QueryContext) -> str:
    node = ctx.node
    return node if isinstance(node, str) else string_value(node)


class XPathPlugin:
    """Reference plugin over :class:`QueryContext` values. Stateless."""

    def eval_text(self, select, ctx):
        q = parse_query(select)
        if isinstance(q, Literal):
            return q.text
        if isinstance(q, PosTest):
            return "true" if q.holds(ctx.position) else "false"
        return "".join(text_value(c) for c in eval_path(q, ctx))

    def eval_nodes(self, select, ctx):
        q = parse_query(select)
        if not isinstance(q, PathExpr):
            raise QuerySyntaxError(select, "a node list needs a path expression")
        return eval_path(q, ctx)

    def eval_bool(self, select, ctx):
        q = parse_query(select)
        if isinstance(q, Literal):
            return q.truth
        if isinstance(q, PosTest):
            return q.holds(ctx.position)
        return bool(eval_path(q, ctx))

    def eval_include(self, select, ctx):
        q = parse_query(select)
        if not isinstance(q, PathExpr):
            raise QuerySyntaxError(select, "include needs a path expression")
        for c in eval_path(q, ctx):
            node = c.node
            if isinstance(node, Element):
                if node.name == DOCUMENT:
                    return node.children[0]
                return node
        return None
