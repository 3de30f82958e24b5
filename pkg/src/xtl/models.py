"""Term models for XTL documents and regular hedge expressions.

``doc_to_xtl``/``xtl_to_doc`` translate between parsed XML and XTL terms;
``xtl_to_reg`` turns an XTL term into a regular hedge expression (``Reg``)
where a hedge ``[a0, ..., an]`` becomes ``Then a0 (Then ... (Then an Epsilon))``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .errors import DuplicateMacro, MappingError, NormalizeError, UnmappableNode
from .xmlcore import DocNode, Element, QName, Text

XTL_PREFIX = "xtl"
COMMANDS = ("attribute", "text", "include", "macro", "call-macro", "if", "for-each")

Attrs = tuple[tuple[str, str], ...]


# --- XTL ---------------------------------------------------------------------

@dataclass(frozen=True)
class XAtt:
    name: str
    select: str


@dataclass(frozen=True)
class XTxt:
    select: str


@dataclass(frozen=True)
class XInclude:
    select: str


@dataclass(frozen=True)
class XMacro:
    name: str
    body: tuple["XtlNode", ...] = ()


@dataclass(frozen=True)
class XCallMacro:
    name: str


@dataclass(frozen=True)
class XIf:
    select: str
    body: tuple["XtlNode", ...] = ()


@dataclass(frozen=True)
class XForEach:
    select: str
    body: tuple["XtlNode", ...] = ()


@dataclass(frozen=True)
class ElX:
    name: str
    attrs: Attrs = ()
    children: tuple["XtlNode", ...] = ()


@dataclass(frozen=True)
class TxtX:
    text: str


XtlNode = Union[XAtt, XTxt, XInclude, XMacro, XCallMacro, XIf, XForEach, ElX, TxtX]
COMMAND_TYPES = (XAtt, XTxt, XInclude, XMacro, XCallMacro, XIf, XForEach)

# macro name -> body; bodies are XTL hedges for instantiation, Reg for validation
MacroEnv = dict


# --- Reg ---------------------------------------------------------------------

@dataclass(frozen=True)
class MacroR:
    name: str


@dataclass(frozen=True)
class AttrR:
    name: str
    select: str


@dataclass(frozen=True)
class TextR:
    select: str


@dataclass(frozen=True)
class IncludeR:
    select: str


@dataclass(frozen=True)
class ElR:
    name: str
    attrs: Attrs
    content: "Reg"


@dataclass(frozen=True)
class TxtR:
    text: str


@dataclass(frozen=True)
class _Epsilon:
    def __repr__(self):
        return "Epsilon"


Epsilon = _Epsilon()


@dataclass(frozen=True)
class Or:
    left: "Reg"
    right: "Reg"


@dataclass(frozen=True)
class Then:
    left: "Reg"
    right: "Reg"


@dataclass(frozen=True)
class Star:
    body: "Reg"


Reg = Union[MacroR, AttrR, TextR, IncludeR, ElR, TxtR, _Epsilon, Or, Then, Star]


# --- HXT-style tree <-> XTL ----------------------------------------------------

_REQUIRED = {
    "attribute": ("name", "select"),
    "text": ("select",),
    "include": ("select",),
    "macro": ("name",),
    "call-macro": ("name",),
    "if": ("select",),
    "for-each": ("select",),
}
_CHILDLESS = {"attribute", "text", "include", "call-macro"}


def is_command(node: DocNode) -> bool:
    return (isinstance(node, Element) and node.name.prefix == XTL_PREFIX
            and node.name.local in COMMANDS)


def doc_to_xtl(node: DocNode, *, commands: bool = True, _path: str = "") -> XtlNode:
    """Map a parsed node onto its XTL term.

    With ``commands=False`` every element is taken literally, which is how
    included instantiation data is brought into the instance.
    """
    if isinstance(node, Text):
        return TxtX(node.text)
    path = f"{_path}/{node.name}"
    if commands and is_command(node):
        return _command(node, path)
    return ElX(str(node.name), node.attributes,
               tuple(doc_to_xtl(c, commands=commands, _path=path) for c in node.children))


def _command(node: Element, path: str) -> XtlNode:
    kind = node.name.local
    values = []
    for attr in _REQUIRED[kind]:
        value = node.get(attr)
        if value is None and kind == "call-macro":
            # some XTL sources spell the macro reference as select=
            value = node.get("select")
        if value is None:
            raise MappingError(path, f"missing required attribute {attr!r}")
        values.append(value)
    if kind in _CHILDLESS and node.children:
        raise MappingError(path, f"xtl:{kind} must not have children")
    body = tuple(doc_to_xtl(c, _path=path) for c in node.children)
    match kind:
        case "attribute":
            return XAtt(values[0], values[1])
        case "text":
            return XTxt(values[0])
        case "include":
            return XInclude(values[0])
        case "call-macro":
            return XCallMacro(values[0])
        case "macro":
            return XMacro(values[0], body)
        case "if":
            return XIf(values[0], body)
        case _:
            return XForEach(values[0], body)


def _xtl_element(local, attrs, children=()):
    return Element(QName(XTL_PREFIX, local), tuple(attrs), tuple(children))


def xtl_to_doc(node: XtlNode) -> DocNode:
    match node:
        case TxtX(text):
            return Text(text)
        case ElX(name, attrs, children):
            return Element(QName.parse(name), tuple(attrs), tuple(xtl_to_doc(c) for c in children))
        case XAtt(name, select):
            return _xtl_element("attribute", [("name", name), ("select", select)])
        case XTxt(select):
            return _xtl_element("text", [("select", select)])
        case XInclude(select):
            return _xtl_element("include", [("select", select)])
        case XCallMacro(name):
            return _xtl_element("call-macro", [("name", name)])
        case XMacro(name, body):
            return _xtl_element("macro", [("name", name)], map(xtl_to_doc, body))
        case XIf(select, body):
            return _xtl_element("if", [("select", select)], map(xtl_to_doc, body))
        case XForEach(select, body):
            return _xtl_element("for-each", [("select", select)], map(xtl_to_doc, body))
    raise TypeError(f"not an XTL node: {node!r}")


def extract_macros(hedge) -> tuple[dict, list]:
    """Split a hedge into ``(name -> body, remaining nodes)`` preserving order."""
    env: dict = {}
    rest = []
    for node in hedge:
        if isinstance(node, XMacro):
            if node.name in env:
                raise DuplicateMacro(node.name)
            if _contains_macro(node.body):
                raise MappingError(f"xtl:macro[{node.name}]", "macro bodies cannot define macros")
            env[node.name] = node.body
        else:
            rest.append(node)
    return env, rest


def _contains_macro(hedge) -> bool:
    for node in hedge:
        if isinstance(node, XMacro):
            return True
        if isinstance(node, (ElX, XIf, XForEach)):
            if _contains_macro(node.children if isinstance(node, ElX) else node.body):
                return True
    return False


# --- XTL -> Reg ----------------------------------------------------------------

def xtl_to_reg(node: XtlNode) -> Reg:
    match node:
        case XIf(_, body):
            return Or(Epsilon, _body_to_reg(body))
        case XForEach(_, body):
            return Star(_body_to_reg(body))
        case XAtt(name, select):
            return AttrR(name, select)
        case XTxt(select):
            return TextR(select)
        case XInclude(select):
            return IncludeR(select)
        case TxtX(text):
            return TxtR(text)
        case ElX(name, attrs, children):
            return ElR(name, tuple(attrs), hedge_to_reg(children))
        case XCallMacro(name):
            return MacroR(name)
        case XMacro(name, _):
            raise UnmappableNode(f"macro definition {name!r} has no regular expression; "
                                 "extract it into the macro environment first")
    raise TypeError(f"not an XTL node: {node!r}")


def hedge_to_reg(hedge) -> Reg:
    """Right-nested ``Then`` chain over the mapped hedge, ended by ``Epsilon``.

    Attribute items are moved in front of the other items and empty text
    literals are left out, so the chain comes out in normal form.
    """
    items = []
    for node in hedge:
        if isinstance(node, TxtX) and node.text == "":
            continue
        items.append(xtl_to_reg(node))
    return chain(_hoist_attributes(items))


def _body_to_reg(hedge) -> Reg:
    # a command body holding one item maps to that item, unlike element content
    r = hedge_to_reg(hedge)
    if isinstance(r, Then) and r.right is Epsilon:
        return r.left
    return r


def chain(items, tail: Reg = Epsilon) -> Reg:
    result = tail
    for item in reversed(items):
        result = Then(item, result)
    return result


def chain_items(r: Reg) -> list:
    """Top-level items of a ``Then`` chain (``Epsilon`` contributes none)."""
    items = []
    while isinstance(r, Then):
        items.append(r.left)
        r = r.right
    if r is not Epsilon:
        items.append(r)
    return items


def _hoist_attributes(items):
    attrs = [i for i in items if isinstance(i, AttrR)]
    if not attrs:
        return items
    return attrs + [i for i in items if not isinstance(i, AttrR)]


# --- normal form ---------------------------------------------------------------

def normalize_reg(r: Reg) -> Reg:
    """Bring ``r`` into normal form.

    ``Then``/``Or`` become right-nested, ``Epsilon`` items vanish from
    concatenations, empty text literals are dropped from concatenations and
    attribute items are moved to the front of each concatenation.
    """
    match r:
        case Then():
            items = []
            _then_items(r, items)
            items = [i for i in items if not (isinstance(i, TxtR) and i.text == "")]
            for a, b in zip(items, items[1:]):
                if isinstance(a, TxtR) and isinstance(b, TxtR):
                    raise NormalizeError(f"adjacent text literals {a.text!r} and {b.text!r} "
                                         "cannot be told apart")
            items = _hoist_attributes(items)
            if _ends_in_epsilon(r) or not items:
                return chain(items)
            return chain(items[:-1], items[-1])
        case Or():
            alts = []
            _or_items(r, alts)
            result = alts[-1]
            for alt in reversed(alts[:-1]):
                result = Or(alt, result)
            return result
        case ElR(name, attrs, content):
            return ElR(name, attrs, normalize_reg(content))
        case Star(body):
            return Star(normalize_reg(body))
    return r


def _then_items(r, out):
    if isinstance(r, Then):
        _then_items(r.left, out)
        _then_items(r.right, out)
    elif r is not Epsilon:
        out.append(normalize_reg(r))


def _ends_in_epsilon(r):
    while isinstance(r, Then):
        r = r.right
    return r is Epsilon


def _or_items(r, out):
    if isinstance(r, Or):
        _or_items(r.left, out)
        _or_items(r.right, out)
    else:
        out.append(normalize_reg(r))


def is_normal(r: Reg) -> bool:
    match r:
        case Then(left, right):
            if isinstance(left, Then) or left is Epsilon:
                return False
            items = chain_items(r)
            for a, b in zip(items, items[1:]):
                if isinstance(a, TxtR) and isinstance(b, TxtR):
                    return False
            seen_other = False
            for item in items:
                if isinstance(item, AttrR):
                    if seen_other:
                        return False
                else:
                    seen_other = True
            tail = r
            while isinstance(tail, Then):
                tail = tail.right
            return all(is_normal(i) for i in items) and is_normal(tail)
        case Or(left, right):
            return not isinstance(left, Or) and is_normal(left) and is_normal(right)
        case ElR(_, _, content):
            return is_normal(content)
        case Star(body):
            return is_normal(body)
    return True


# --- debug notation --------------------------------------------------------------

def _q(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _attrs(attrs) -> str:
    return "[" + ",".join(f"({_q(k)},{_q(v)})" for k, v in attrs) + "]"


def _simple(r) -> bool:
    return r is Epsilon


def format_reg(r: Reg) -> str:
    """Render ``r`` in constructor notation, e.g. ``Then (ElR "b" [] Epsilon) Epsilon``."""
    def arg(x):
        s = format_reg(x)
        return s if _simple(x) else f"({s})"

    match r:
        case _Epsilon():
            return "Epsilon"
        case MacroR(name):
            return f"MacroR {_q(name)}"
        case AttrR(name, select):
            return f"AttrR {_q(name)} {_q(select)}"
        case TextR(select):
            return f"TextR {_q(select)}"
        case IncludeR(select):
            return f"IncludeR {_q(select)}"
        case TxtR(text):
            return f"TxtR {_q(text)}"
        case ElR(name, attrs, content):
            return f"ElR {_q(name)} {_attrs(attrs)} {arg(content)}"
        case Or(left, right):
            return f"Or {arg(left)} {arg(right)}"
        case Then(left, right):
            return f"Then {arg(left)} {arg(right)}"
        case Star(body):
            return f"Star {arg(body)}"
    raise TypeError(f"not a Reg term: {r!r}")


def format_xtl(node) -> str:
    """Render an XTL term (or a hedge of them) in constructor notation."""
    if isinstance(node, (list, tuple)):
        return "[" + ", ".join(format_xtl(n) for n in node) + "]"
    match node:
        case XAtt(name, select):
            return f"XAtt {_q(name)} {_q(select)}"
        case XTxt(select):
            return f"XTxt {_q(select)}"
        case XInclude(select):
            return f"XInclude {_q(select)}"
        case XCallMacro(name):
            return f"XCallMacro {_q(name)}"
        case XMacro(name, body):
            return f"XMacro {_q(name)} {format_xtl(body)}"
        case XIf(select, body):
            return f"XIf {_q(select)} {format_xtl(body)}"
        case XForEach(select, body):
            return f"XForEach {_q(select)} {format_xtl(body)}"
        case ElX(name, attrs, children):
            return f"ElX {_q(name)} {_attrs(attrs)} {format_xtl(children)}"
        case TxtX(text):
            return f"TxtX {_q(text)}"
    raise TypeError(f"not an XTL node: {node!r}")


_TOKEN = re.compile(r'\s*(?:(?P<str>"(?:[^"\\]|\\.)*")|(?P<word>[A-Za-z]+)|(?P<punct>[()\[\],]))')


def parse_reg(text: str) -> Reg:
    """Inverse of :func:`format_reg`; parentheses around any term are optional."""
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"unexpected input at offset {pos}: {text[pos:pos + 20]!r}")
        pos = m.end()
        if m.group("str") is not None:
            raw = m.group("str")[1:-1]
            tokens.append(("str", re.sub(r"\\(.)", lambda g: "\n" if g.group(1) == "n" else g.group(1), raw)))
        elif m.group("word"):
            tokens.append(("word", m.group("word")))
        else:
            tokens.append(("p", m.group("punct")))
    parser = _RegParser(tokens)
    r = parser.term()
    if parser.i != len(tokens):
        raise ValueError("trailing input after term")
    return r


class _RegParser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    def next(self, kind=None, value=None):
        if self.i >= len(self.toks):
            raise ValueError("unexpected end of input")
        tok = self.toks[self.i]
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            raise ValueError(f"unexpected token {tok[1]!r}")
        self.i += 1
        return tok[1]

    def string(self):
        return self.next("str")

    def attrs(self):
        self.next("p", "[")
        pairs = []
        while self.toks[self.i] != ("p", "]"):
            if pairs:
                self.next("p", ",")
            self.next("p", "(")
            k = self.string()
            self.next("p", ",")
            v = self.string()
            self.next("p", ")")
            pairs.append((k, v))
        self.next("p", "]")
        return tuple(pairs)

    def term(self):
        if self.toks[self.i] == ("p", "("):
            self.next()
            r = self.term()
            self.next("p", ")")
            return r
        word = self.next("word")
        match word:
            case "Epsilon":
                return Epsilon
            case "MacroR":
                return MacroR(self.string())
            case "AttrR":
                return AttrR(self.string(), self.string())
            case "TextR":
                return TextR(self.string())
            case "IncludeR":
                return IncludeR(self.string())
            case "TxtR":
                return TxtR(self.string())
            case "ElR":
                return ElR(self.string(), self.attrs(), self.term())
            case "Or":
                return Or(self.term(), self.term())
            case "Then":
                return Then(self.term(), self.term())
            case "Star":
                return Star(self.term())
        raise ValueError(f"unknown constructor {word!r}")
