"""Validation of instances against XTL documents read as schemas.

An instance is a ``Reg`` built only from ``Epsilon``, ``Then``, ``ElR`` and
``TxtR``; the schema may use every constructor. ``Matcher.match`` tries the
rules per instance kind in a fixed order, with macro unfolding and
alternatives handled first for every kind.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InstanceContainsCommands, InvalidShape, RecursionLimitExceeded, RootNotElement
from .instantiate import DEFAULT_MAX_DEPTH, get_macro, recursion_headroom
from .models import (AttrR, ElR, ElX, Epsilon, IncludeR, MacroR, Or, Star, TextR, Then, TxtR,
                     chain, chain_items, doc_to_xtl, extract_macros, hedge_to_reg, is_command,
                     normalize_reg, xtl_to_reg)
from .xmlcore import Element, iter_elements, merge_text


# --- helpers ---------------------------------------------------------------------

def split_text(s: str):
    return [(s[:k], s[k:]) for k in range(len(s) + 1)]


def front_split_text(s: str):
    return split_text(s)[1:]


def splits(r):
    """All prefix/suffix partitions of a hedge chain, shortest prefix first."""
    items = chain_items(r)
    for k in range(len(items) + 1):
        yield chain(items[:k]), chain(items[k:])


def front_splits(r):
    """``splits`` without the partition that has an empty prefix."""
    it = splits(r)
    next(it)
    yield from it


def hedge_splits(r, front=False):
    """Like ``splits`` but also cutting inside text items.

    ``Then (TxtR "ab") Epsilon`` additionally yields
    ``(Then (TxtR "a") Epsilon, Then (TxtR "b") Epsilon)``, so a schema can
    take part of a text for itself and leave the rest to what follows.
    """
    items = chain_items(r)
    if not front:
        yield Epsilon, chain(items)
    for k, item in enumerate(items):
        if isinstance(item, TxtR):
            t = item.text
            for cut in range(1, len(t)):
                yield (chain(items[:k] + [TxtR(t[:cut])]),
                       chain([TxtR(t[cut:])] + items[k + 1:]))
        yield chain(items[:k + 1]), chain(items[k + 1:])


def _split_attributes(r: ElR):
    """Return (fixed attrs, names set by attribute commands, remaining content)."""
    fixed = dict(r.attrs)
    wild = {}
    content = r.content
    while True:
        if isinstance(content, Then) and isinstance(content.left, AttrR):
            item, content = content.left, content.right
        elif isinstance(content, AttrR):
            item, content = content, Epsilon
        else:
            break
        fixed.pop(item.name, None)
        wild[item.name] = item.select
    return fixed, wild, content


def extract_attributes(r):
    """Move the leading ``AttrR`` items of an element's content into its attribute list."""
    if not isinstance(r, ElR):
        raise InvalidShape(f"extract_attributes needs an ElR, got {type(r).__name__}")
    fixed, wild, content = _split_attributes(r)
    fixed.update(wild)
    return ElR(r.name, tuple(sorted(fixed.items())), normalize_reg(content))


def get_macro_reg(name, env):
    return get_macro(name, env)


# --- matcher -----------------------------------------------------------------------

class Matcher:
    def __init__(self, env, memo=False, max_depth=DEFAULT_MAX_DEPTH, paths=None):
        self.env = env
        self.memo = {} if memo else None
        self.max_depth = max_depth
        self.depth = 0
        self.paths = paths or {}
        self.best_path = None

    def match(self, inst, schema) -> bool:
        if self.memo is not None:
            key = (inst, schema)
            hit = self.memo.get(key)
            if hit is None:
                hit = self.memo[key] = self._match(inst, schema)
            return hit
        return self._match(inst, schema)

    def nullable(self, schema) -> bool:
        return self.match(Epsilon, schema)

    def _match(self, inst, schema) -> bool:
        # (Phi) macro unfolding, (Omega) alternatives
        if isinstance(schema, MacroR):
            body = get_macro_reg(schema.name, self.env)
            if self.depth >= self.max_depth:
                raise RecursionLimitExceeded(self.max_depth)
            self.depth += 1
            try:
                return self.match(inst, body)
            finally:
                self.depth -= 1
        if isinstance(schema, Or):
            return self.match(inst, schema.left) or self.match(inst, schema.right)
        if inst is Epsilon:
            return self._empty(schema)
        if isinstance(inst, Then):
            return self._hedge(inst, schema)
        if isinstance(inst, TxtR):
            return self._text(inst.text, schema)
        if isinstance(inst, ElR):
            return self._element(inst, schema)
        raise InvalidShape(f"instance terms cannot contain {type(inst).__name__}")

    def _empty(self, schema):
        match schema:
            case TxtR(text):                       # E1, E2
                return text == ""
            case Then(r1, r2):                     # E7
                return self.nullable(r1) and self.nullable(r2)
            case ElR():                            # E4
                return False
        # E3, E5, E6; attribute and include commands may contribute nothing
        return True

    def _hedge(self, inst, schema):
        match schema:
            case Then(s1, s2):
                if inst.right is Epsilon:                                   # Then6
                    return self.match(inst.left, schema)
                return any(self.match(t1, s1) and self.match(t2, s2)        # Then7
                           for t1, t2 in hedge_splits(inst))
            case TxtR():                                                    # Then2
                return self.match(inst.left, schema) and self.nullable(inst.right)
            case ElR():                                                     # Then3, Then4
                return (isinstance(inst.left, ElR) and self.match(inst.left, schema)
                        and self.nullable(inst.right))
            case Star(body):                                                # Then5
                return any(self.match(s1, body) and self.match(s2, schema)
                           for s1, s2 in hedge_splits(inst, front=True))
            case TextR():                                                   # Then8, Then9
                return isinstance(inst.left, TxtR) and inst.right is Epsilon
            case IncludeR():
                return isinstance(inst.left, ElR) and inst.right is Epsilon
        return False                                                        # Then1, AttrR

    def _text(self, text, schema):
        match schema:
            case Then(r1, r2):                                              # #1
                return any(self.match(TxtR(a), r1) and self.match(TxtR(b), r2)
                           for a, b in split_text(text))
            case Star(body):                                                # #4, #5
                if text == "":
                    return True
                return any(self.match(TxtR(a), body) and self.match(TxtR(b), schema)
                           for a, b in front_split_text(text))
            case TextR():                                                   # #6
                return True
            case TxtR(other):                                               # #7
                return text == other
            case ElR():                                                     # #8
                return False
        return text == ""                                                   # #2, #3, AttrR, IncludeR

    def _element(self, inst, schema):
        match schema:
            case ElR():                                                     # ElR1
                return self._same_element(inst, schema)
            case Then(left, s):
                if isinstance(left, ElR):                                   # ElR2
                    return self.match(inst, left) and self.nullable(s)
                if isinstance(left, Star):                                  # ElR4
                    return ((self.match(inst, left.body) and self.nullable(s))
                            or self.match(inst, s))
                # ElR3 (Or), ElR5 (MacroR) and the nullable-head cases
                return ((self.match(inst, left) and self.nullable(s))
                        or (self.nullable(left) and self.match(inst, s)))
            case Star(body):                                                # ElR7
                return self.match(inst, body)
            case IncludeR():
                return True
        return False                                                        # ElR8-10, AttrR

    def _same_element(self, inst, schema):
        if inst.name != schema.name:
            return False
        fixed, wild, content = _split_attributes(schema)
        attrs = dict(inst.attrs)
        if set(attrs) != set(fixed) | set(wild):
            return False
        if any(attrs[k] != v for k, v in fixed.items()):
            return False
        if not self.match(inst.content, content):
            return False
        path = self.paths.get(id(inst))
        if path is not None and (self.best_path is None or len(path) > len(self.best_path)):
            self.best_path = path
        return True


def matches(inst, schema, env=None, *, memo=False, max_depth=DEFAULT_MAX_DEPTH) -> bool:
    with recursion_headroom(20_000 + 60 * max_depth):
        return Matcher(env or {}, memo, max_depth).match(inst, schema)


# --- documents ---------------------------------------------------------------------

@dataclass(frozen=True)
class ValidationResult:
    valid: bool
    last_valid_path: tuple[int, ...] = field(default=())


def _index_paths(r, path, out):
    if isinstance(r, ElR):
        out[id(r)] = path
        for k, item in enumerate(chain_items(r.content)):
            _index_paths(item, path + (k,), out)


def prepare_instance(instance: Element):
    for el in iter_elements(instance):
        if is_command(el):
            raise InstanceContainsCommands(f"instance contains the command <{el.name}>")
    return normalize_reg(xtl_to_reg(doc_to_xtl(merge_text(instance))))


def prepare_schema(schema: Element):
    """Schema root as a normalized ``ElR`` plus the ``Reg``-valued macro environment."""
    root = doc_to_xtl(schema)
    if not isinstance(root, ElX):
        raise RootNotElement("schema root must be an ordinary element")
    env, rest = extract_macros(root.children)
    env = {name: normalize_reg(hedge_to_reg(body)) for name, body in env.items()}
    reg = normalize_reg(xtl_to_reg(ElX(root.name, root.attrs, tuple(rest))))
    return reg, env


def validate_document(instance: Element, schema: Element, *, memo=False,
                      max_depth=DEFAULT_MAX_DEPTH) -> ValidationResult:
    inst = prepare_instance(instance)
    reg, env = prepare_schema(schema)
    paths = {}
    _index_paths(inst, (), paths)
    matcher = Matcher(env, memo, max_depth, paths)
    with recursion_headroom(20_000 + 60 * max_depth):
        ok = matcher.match(inst, reg)
    if ok:
        return ValidationResult(True)
    return ValidationResult(False, matcher.best_path or ())
