"""Template instantiation: XTL term + instantiation data -> command-free XTL term."""

from __future__ import annotations

import sys
from contextlib import contextmanager
from typing import Any, Optional, Protocol, Sequence

from .errors import (MappingError, PluginError, RecursionLimitExceeded, RootNotElement,
                     UnboundMacro)
from .models import (ElX, TxtX, XAtt, XCallMacro, XForEach, XIf, XInclude, XMacro, XTxt,
                     doc_to_xtl, extract_macros)
from .xmlcore import DocNode, Element

DEFAULT_MAX_DEPTH = 512


class Plugin(Protocol):
    """The four placeholder functions; ``ctx`` is opaque to the engine."""

    def eval_text(self, select: str, ctx: Any) -> str: ...

    def eval_nodes(self, select: str, ctx: Any) -> Sequence[Any]: ...

    def eval_bool(self, select: str, ctx: Any) -> bool: ...

    def eval_include(self, select: str, ctx: Any) -> Optional[DocNode]: ...


def get_macro(name: str, env: dict):
    try:
        return env[name]
    except KeyError:
        raise UnboundMacro(name) from None


@contextmanager
def recursion_headroom(frames: int):
    """Temporarily raise the interpreter recursion limit to at least ``frames``."""
    old = sys.getrecursionlimit()
    if frames > old:
        sys.setrecursionlimit(frames)
    try:
        yield
    finally:
        sys.setrecursionlimit(old)


def fold_attributes(attrs, nodes):
    """Apply the ``XAtt`` items of ``nodes`` to ``attrs``; return (attrs, other nodes).

    Attributes are re-sorted by name only when some ``XAtt`` was applied, so
    command-free elements keep their attribute order.
    """
    merged = dict(attrs)
    rest = []
    for node in nodes:
        if isinstance(node, XAtt):
            merged[node.name] = node.select
        else:
            rest.append(node)
    if len(rest) == len(nodes):
        return tuple(attrs), rest
    return tuple(sorted(merged.items())), rest


class Instantiator:
    def __init__(self, plugin: Plugin, max_depth: int = DEFAULT_MAX_DEPTH):
        self.plugin = plugin
        self.max_depth = max_depth
        self.depth = 0

    def _call(self, fn, select, ctx, path):
        try:
            return fn(select, ctx)
        except RecursionLimitExceeded:
            raise
        except Exception as exc:
            raise PluginError(path, f"{type(exc).__name__}: {exc}") from exc

    def start(self, template, ctx):
        """Rules (S) and (E): evaluate the root's own attribute commands, then (I3)."""
        if not isinstance(template, ElX):
            raise RootNotElement(f"template root must be an element, got {type(template).__name__}")
        path = "/" + template.name
        evaluated = []
        for child in template.children:
            if isinstance(child, XAtt):
                value = self._call(self.plugin.eval_text, child.select, ctx, path)
                evaluated.append(XAtt(child.name, value))
        attrs, _ = fold_attributes(template.attrs, evaluated)
        nodes = tuple(c for c in template.children if not isinstance(c, XAtt))
        return self.node(ElX(template.name, attrs, nodes), ctx, path)

    def node(self, node, ctx, path=""):
        """Rules (I1)-(I3)."""
        if isinstance(node, (XTxt, XAtt)):
            return node
        if not isinstance(node, ElX):
            raise RootNotElement(f"cannot instantiate a {type(node).__name__} on its own")
        path = path or "/" + node.name
        env, rest = extract_macros(node.children)
        out = []
        for child in rest:
            out.extend(self.alpha(child, ctx, env, path))
        attrs, children = fold_attributes(node.attrs, out)
        return ElX(node.name, attrs, tuple(children))

    def alpha(self, node, ctx, env, path):
        """Rules (A1)-(A7); may return evaluated ``XAtt`` items for the parent to fold in."""
        match node:
            case XIf(select, body):
                if not self._call(self.plugin.eval_bool, select, ctx, path + "/xtl:if"):
                    return []
                return self._hedge(body, ctx, env, path + "/xtl:if")
            case XForEach(select, body):
                here = path + "/xtl:for-each"
                out = []
                for item in self._call(self.plugin.eval_nodes, select, ctx, here):
                    out.extend(self._hedge(body, item, env, here))
                return out
            case XCallMacro(name):
                body = get_macro(name, env)
                if self.depth >= self.max_depth:
                    raise RecursionLimitExceeded(self.max_depth)
                self.depth += 1
                try:
                    return self._hedge(body, ctx, env, f"{path}/xtl:call-macro[{name}]")
                finally:
                    self.depth -= 1
            case XTxt(select):
                return [TxtX(self._call(self.plugin.eval_text, select, ctx, path + "/xtl:text"))]
            case XAtt(name, select):
                return [XAtt(name, self._call(self.plugin.eval_text, select, ctx,
                                              path + "/xtl:attribute"))]
            case XInclude(select):
                here = path + "/xtl:include"
                found = self._call(self.plugin.eval_include, select, ctx, here)
                if found is None:
                    return []
                if not isinstance(found, Element):
                    raise PluginError(here, "include must yield one element node or none")
                return [doc_to_xtl(found, commands=False)]
            case ElX(name, attrs, children):
                here = f"{path}/{name}"
                attrs, rest = fold_attributes(attrs, self._hedge(children, ctx, env, here))
                return [ElX(name, attrs, tuple(rest))]
            case TxtX():
                return [node]
            case XMacro(name, _):
                raise MappingError(f"{path}/xtl:macro[{name}]",
                                   "macro definitions belong directly under the root element")
        raise TypeError(f"not an XTL node: {node!r}")

    def _hedge(self, hedge, ctx, env, path):
        out = []
        for child in hedge:
            out.extend(self.alpha(child, ctx, env, path))
        return out


def instantiate_start(template, ctx, plugin: Plugin, max_depth: int = DEFAULT_MAX_DEPTH):
    with recursion_headroom(10_000 + 40 * max_depth):
        return Instantiator(plugin, max_depth).start(template, ctx)


def instantiate_node(node, ctx, plugin: Plugin, max_depth: int = DEFAULT_MAX_DEPTH):
    with recursion_headroom(10_000 + 40 * max_depth):
        return Instantiator(plugin, max_depth).node(node, ctx)


def instantiate_alpha(node, ctx, env, plugin: Plugin, max_depth: int = DEFAULT_MAX_DEPTH):
    with recursion_headroom(10_000 + 40 * max_depth):
        return Instantiator(plugin, max_depth).alpha(node, ctx, env, "")


def instantiate_document(template: Element, data: Element, plugin=None,
                         max_depth: int = DEFAULT_MAX_DEPTH) -> Element:
    """Parse-level convenience: template and data trees in, instance tree out."""
    from .models import xtl_to_doc
    from .query import QueryContext, XPathPlugin

    plugin = plugin or XPathPlugin()
    result = instantiate_start(doc_to_xtl(template), QueryContext.root_of(data), plugin, max_depth)
    return xtl_to_doc(result)


__all__ = ["Plugin", "Instantiator", "instantiate_start", "instantiate_node",
           "instantiate_alpha", "instantiate_document", "get_macro", "fold_attributes",
           "DEFAULT_MAX_DEPTH"]
