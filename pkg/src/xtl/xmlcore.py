"""A small XML tree model with a parser, serializer and attribute canonicalizer.

Only elements, attributes, text and the five predefined entities are
understood. Comments, processing instructions, CDATA sections and DOCTYPE
declarations are rejected. A leading ``<?xml ...?>`` declaration is skipped.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .errors import ParseError

ENTITIES = {"lt": "<", "gt": ">", "amp": "&", "quot": '"', "apos": "'"}
_ESCAPES = {"&": "&amp;", "<": "&lt;", ">": "&gt;", '"': "&quot;", "'": "&apos;"}
_NAME_STOP = set(" \t\r\n<>\"'/=&")


@dataclass(frozen=True)
class QName:
    prefix: str
    local: str
    uri: str = ""

    @classmethod
    def parse(cls, text: str) -> "QName":
        prefix, sep, local = text.partition(":")
        if not sep:
            return cls("", text)
        return cls(prefix, local)

    def __str__(self):
        return f"{self.prefix}:{self.local}" if self.prefix else self.local


@dataclass(frozen=True)
class Text:
    text: str


@dataclass(frozen=True)
class Element:
    name: QName
    attributes: tuple[tuple[str, str], ...] = ()
    children: tuple["DocNode", ...] = field(default=())

    def get(self, attr, default=None):
        for key, value in self.attributes:
            if key == attr:
                return value
        return default


DocNode = Union[Element, Text]


def element(name: str, attributes=(), children=()) -> Element:
    """Convenience constructor taking the qualified name as a string."""
    return Element(QName.parse(name), tuple(attributes), tuple(children))


class _Scanner:
    def __init__(self, source: str):
        self.src = source
        self.pos = 0

    def location(self, pos=None):
        pos = self.pos if pos is None else pos
        line = self.src.count("\n", 0, pos) + 1
        column = pos - (self.src.rfind("\n", 0, pos) + 1) + 1
        return line, column

    def error(self, message, pos=None):
        line, column = self.location(pos)
        return ParseError(line, column, message)

    def eof(self):
        return self.pos >= len(self.src)

    def peek(self, text):
        return self.src.startswith(text, self.pos)

    def expect(self, text):
        if not self.peek(text):
            found = self.src[self.pos:self.pos + 1] or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        self.pos += len(text)

    def skip_space(self):
        while not self.eof() and self.src[self.pos] in " \t\r\n":
            self.pos += 1

    def name(self):
        start = self.pos
        while not self.eof() and self.src[self.pos] not in _NAME_STOP:
            self.pos += 1
        if start == self.pos:
            raise self.error("expected a name")
        text = self.src[start:self.pos]
        if text.startswith(":") or text.endswith(":"):
            raise self.error(f"malformed qualified name {text!r}", start)
        return text

    def chars(self, stop):
        """Read character data up to any char in ``stop``, resolving entities."""
        out = []
        while not self.eof() and self.src[self.pos] not in stop:
            ch = self.src[self.pos]
            if ch == "&":
                end = self.src.find(";", self.pos)
                ref = self.src[self.pos + 1:end] if end != -1 else ""
                if ref not in ENTITIES:
                    raise self.error(f"unknown entity reference &{ref};")
                out.append(ENTITIES[ref])
                self.pos = end + 1
            else:
                out.append(ch)
                self.pos += 1
        return "".join(out)


def parse_document(source: str) -> Element:
    """Parse ``source`` and return its root element.

    Whitespace-only text between tags is dropped; any other text is kept
    exactly. Raises :class:`ParseError` with a 1-based line and column.
    """
    sc = _Scanner(source)
    if source.startswith("\ufeff"):
        sc.pos = 1
    sc.skip_space()
    if sc.peek("<?xml"):
        end = source.find("?>", sc.pos)
        if end == -1:
            raise sc.error("unterminated XML declaration")
        sc.pos = end + 2
        sc.skip_space()
    if sc.eof():
        raise sc.error("document has no root element")
    if not sc.peek("<"):
        raise sc.error("text outside the root element")
    root = _parse_element(sc)
    sc.skip_space()
    if not sc.eof():
        if sc.peek("<"):
            raise sc.error("document has more than one root element")
        raise sc.error("text outside the root element")
    return root


def _parse_element(sc: _Scanner) -> Element:
    start = sc.pos
    sc.expect("<")
    if sc.peek("!") or sc.peek("?"):
        raise sc.error("comments, CDATA, DOCTYPE and processing instructions are not supported")
    tag = sc.name()
    attrs: list[tuple[str, str]] = []
    seen = set()
    while True:
        had_space = sc.pos
        sc.skip_space()
        if sc.peek("/>"):
            sc.pos += 2
            return Element(QName.parse(tag), tuple(attrs), ())
        if sc.peek(">"):
            sc.pos += 1
            break
        if sc.eof():
            raise sc.error(f"unterminated start tag <{tag}>", start)
        if had_space == sc.pos:
            raise sc.error("expected whitespace before attribute")
        attr_pos = sc.pos
        key = sc.name()
        sc.skip_space()
        sc.expect("=")
        sc.skip_space()
        quote = sc.src[sc.pos:sc.pos + 1]
        if quote not in ('"', "'"):
            raise sc.error("attribute value must be quoted")
        sc.pos += 1
        value = sc.chars(quote + "<")
        sc.expect(quote)
        if key in seen:
            raise sc.error(f"duplicate attribute {key!r}", attr_pos)
        seen.add(key)
        attrs.append((key, value))

    children: list = []
    run: list[str] = []

    def flush():
        if run:
            text = "".join(run)
            run.clear()
            if text.strip(" \t\r\n"):
                children.append(Text(text))

    while True:
        if sc.eof():
            raise sc.error(f"element <{tag}> is not closed", start)
        if sc.peek("</"):
            flush()
            sc.pos += 2
            close_pos = sc.pos
            closing = sc.name()
            if closing != tag:
                raise sc.error(f"mismatched end tag </{closing}>, expected </{tag}>", close_pos)
            sc.skip_space()
            sc.expect(">")
            return Element(QName.parse(tag), tuple(attrs), tuple(children))
        if sc.peek("<"):
            flush()
            children.append(_parse_element(sc))
        else:
            run.append(sc.chars("<"))


def escape(text: str) -> str:
    return "".join(_ESCAPES.get(ch, ch) for ch in text)


def serialize_document(doc: DocNode) -> str:
    out: list[str] = []
    _serialize(doc, out)
    return "".join(out)


def _serialize(node: DocNode, out: list):
    if isinstance(node, Text):
        out.append(escape(node.text))
        return
    out.append("<" + str(node.name))
    for key, value in node.attributes:
        out.append(f' {key}="{escape(value)}"')
    if not node.children:
        out.append("/>")
        return
    out.append(">")
    for child in node.children:
        _serialize(child, out)
    out.append(f"</{node.name}>")


def canonicalize(doc: DocNode) -> DocNode:
    """Sort attributes by name (code point order, i.e. UTF-8 byte order) at every level."""
    if isinstance(doc, Text):
        return doc
    return Element(
        doc.name,
        tuple(sorted(doc.attributes, key=lambda pair: pair[0])),
        tuple(canonicalize(child) for child in doc.children),
    )


def merge_text(doc: DocNode) -> DocNode:
    """Join adjacent text nodes and drop empty ones, recursively.

    Brings a programmatically built tree into the shape the parser would
    produce for its serialization (modulo whitespace-only runs).
    """
    if isinstance(doc, Text):
        return doc
    children: list = []
    for child in doc.children:
        if isinstance(child, Text):
            if not child.text:
                continue
            if children and isinstance(children[-1], Text):
                children[-1] = Text(children[-1].text + child.text)
                continue
            children.append(child)
        else:
            children.append(merge_text(child))
    return Element(doc.name, doc.attributes, tuple(children))


def iter_elements(doc: DocNode):
    """Yield every element of ``doc`` in document (pre-)order, root first."""
    if isinstance(doc, Element):
        yield doc
        for child in doc.children:
            yield from iter_elements(child)


def string_value(node: DocNode) -> str:
    """Concatenated text content under ``node`` in document order."""
    if isinstance(node, Text):
        return node.text
    return "".join(string_value(child) for child in node.children)
