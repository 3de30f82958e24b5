"""Brute-force reference implementations and random generators used by the tests.

Nothing here calls into the matcher or the automaton builder; the only
imports from the package are the term constructors.
"""

from __future__ import annotations

import itertools
import random
import zlib

from xtl.derivatives import Alt, Concat, Empty, Lambda, StarS, Sym
from xtl.errors import NormalizeError
from xtl.models import (AttrR, ElR, ElX, Epsilon, IncludeR, MacroR, Or, Star, TextR, Then, TxtR,
                        TxtX, XAtt, XCallMacro, XForEach, XIf, XInclude, XMacro, XTxt,
                        normalize_reg)
from xtl.xmlcore import Element, QName, Text

ALPHABET = "ab"
ATTR_VALUES = ("1", "2")
NAMES = ("a", "b", "c")


# --- hedge language enumeration ------------------------------------------------------
# A hedge is a tuple of items: ("t", text) or ("e", name, attrs, hedge), with
# attrs a sorted tuple of pairs. Texts are merged and never empty.

def weight(h):
    return sum(len(i[1]) if i[0] == "t" else 1 + weight(i[3]) for i in h)


def concat(h1, h2):
    if h1 and h2 and h1[-1][0] == "t" and h2[0][0] == "t":
        return h1[:-1] + (("t", h1[-1][1] + h2[0][1]),) + h2[1:]
    return h1 + h2


def _words(max_len, alphabet=ALPHABET):
    for n in range(1, max_len + 1):
        for w in itertools.product(alphabet, repeat=n):
            yield "".join(w)


def _then_leaves(r, out):
    if isinstance(r, Then):
        _then_leaves(r.left, out)
        _then_leaves(r.right, out)
    else:
        out.append(r)


def enumerate_language(schema, env, budget, alphabet=ALPHABET, max_text=None, within=None):
    """Every normalized hedge of weight <= ``budget`` described by ``schema``.

    Text wildcards range over words on ``alphabet`` of length <= ``max_text``
    (default: the budget). With ``within`` given, intermediate sets are cut down
    to members of it (see ``factors``), which keeps membership questions cheap.
    """
    cache = {}

    def lang(r, w):
        key = (r, w)
        if key in cache:
            return cache[key]
        if r is Epsilon or isinstance(r, AttrR):
            out = {()}
        elif isinstance(r, TxtR):
            out = {()} if r.text == "" else ({(("t", r.text),)} if len(r.text) <= w else set())
        elif isinstance(r, TextR):
            n = w if max_text is None else min(w, max_text)
            out = {()} | {(("t", s),) for s in _words(n, alphabet)}
        elif isinstance(r, IncludeR):
            raise ValueError("include wildcards are not enumerated")
        elif isinstance(r, MacroR):
            out = lang(env[r.name], w)
        elif isinstance(r, Or):
            out = lang(r.left, w) | lang(r.right, w)
        elif isinstance(r, Then):
            out = product(lang(r.left, w), lang(r.right, w), w)
        elif isinstance(r, Star):
            body = lang(r.body, w)
            out = {()}
            while True:
                grown = out | product(out, body, w)
                if grown == out:
                    break
                out = grown
        elif isinstance(r, ElR):
            out = set()
            if w >= 1:
                leaves = []
                _then_leaves(r.content, leaves)
                attrs = dict(r.attrs)
                wild = []
                for leaf in leaves:
                    if isinstance(leaf, AttrR):
                        attrs.pop(leaf.name, None)
                        if leaf.name not in wild:
                            wild.append(leaf.name)
                for values in itertools.product(ATTR_VALUES, repeat=len(wild)):
                    full = dict(attrs)
                    full.update(zip(wild, values))
                    key_attrs = tuple(sorted(full.items()))
                    for content in lang(r.content, w - 1):
                        out.add((("e", r.name, key_attrs, content),))
        else:
            raise TypeError(r)
        if within is not None:
            out = {h for h in out if h in within}
        cache[key] = out
        return out

    def product(a, b, w):
        return {concat(x, y) for x in a for y in b if weight(x) + weight(y) <= w}

    return lang(schema, budget)


def hedge_to_inst(h):
    """Instance term for a hedge: right-nested chain ended by ``Epsilon``."""
    r = Epsilon
    for item in reversed(h):
        if item[0] == "t":
            node = TxtR(item[1])
        else:
            node = ElR(item[1], item[2], hedge_to_inst(item[3]))
        r = Then(node, r)
    return r


def inst_to_hedge(r):
    """Inverse of ``hedge_to_inst`` (a lone element or text counts as a one-item hedge)."""
    if r is Epsilon:
        return ()
    if isinstance(r, TxtR):
        return (("t", r.text),) if r.text else ()
    if isinstance(r, ElR):
        return (("e", r.name, tuple(sorted(r.attrs)), inst_to_hedge(r.content)),)
    return concat(inst_to_hedge(r.left), inst_to_hedge(r.right))


def factors(h):
    """All contiguous pieces of ``h`` and of every nested content hedge."""
    out = set()
    stack = [h]
    while stack:
        cur = stack.pop()
        for i in range(len(cur) + 1):
            for j in range(i, len(cur) + 1):
                out.add(cur[i:j])
        stack.extend(item[3] for item in cur if item[0] == "e")
    return out


def abstract_texts(inst, schema, env):
    """Replace each distinct literal text by its own one-letter word on both sides.

    Sound for membership as long as no two literal texts are adjacent, which
    holds for normalized terms. Returns (inst, schema, env, letters used by inst).
    """
    letters = iter("cdefghijklmnopqrstuvwxyz")
    table = {}

    def sub(r):
        if isinstance(r, TxtR):
            if r.text and r.text not in table:
                table[r.text] = next(letters)
            return TxtR(table.get(r.text, ""))
        if isinstance(r, ElR):
            return ElR(r.name, r.attrs, sub(r.content))
        if isinstance(r, (Then, Or)):
            return type(r)(sub(r.left), sub(r.right))
        if isinstance(r, Star):
            return Star(sub(r.body))
        return r

    inst = sub(inst)
    used = "".join(sorted(table.values()))
    return inst, sub(schema), {k: sub(v) for k, v in env.items()}, used


# --- random schemas in the bounded family ---------------------------------------------

def random_schema(rng: random.Random, macros=(), depth=0):
    """A ``Reg`` with hedge width <= 3 and element depth <= 3 over a small vocabulary."""
    leaf_kinds = ["txt", "text", "eps", "el"]
    if macros:
        leaf_kinds.append("macro")
    kinds = leaf_kinds + (["or", "star", "then", "then"] if depth < 3 else [])
    kind = rng.choice(kinds)
    if kind == "txt":
        return TxtR(rng.choice(["", "a", "b", "ab"]))
    if kind == "text":
        return TextR(".")
    if kind == "eps":
        return Epsilon
    if kind == "macro":
        return MacroR(rng.choice(macros))
    if kind == "el":
        if depth >= 3:
            return ElR(rng.choice(NAMES), (), Epsilon)
        return random_element(rng, macros, depth + 1)
    if kind == "or":
        return Or(random_schema(rng, macros, depth + 1), random_schema(rng, macros, depth + 1))
    if kind == "star":
        return Star(random_schema(rng, macros, depth + 1))
    items = [random_schema(rng, macros, depth + 1) for _ in range(rng.randint(1, 3))]
    r = Epsilon
    for item in reversed(items):
        r = Then(item, r)
    return r


def bounded_schema(seed):
    """Normalized (schema, macro env, rng) from one seed, or None when normalization refuses."""
    rng = random.Random(seed)
    names = []
    env = {}
    for k in range(rng.randint(0, 2)):
        try:
            env[f"m{k}"] = normalize_reg(random_schema(rng, tuple(names), depth=1))
        except NormalizeError:
            continue
        names.append(f"m{k}")
    try:
        return normalize_reg(random_schema(rng, tuple(names))), env, rng
    except NormalizeError:
        return None


def random_element(rng, macros=(), depth=1):
    attrs = tuple((k, rng.choice(ATTR_VALUES)) for k in sorted(rng.sample(["k", "m"], rng.randint(0, 1))))
    items = []
    if rng.random() < 0.25:
        items.append(AttrR(rng.choice(["k", "n"]), "@x"))
    for _ in range(rng.randint(0, 2)):
        items.append(random_schema(rng, macros, depth))
    r = Epsilon
    for item in reversed(items):
        r = Then(item, r)
    return ElR(rng.choice(NAMES), attrs, r)


def random_hedge(rng, budget=3):
    """Random instance hedge with weight <= ``budget`` and texts of at most 2 chars."""
    items = []
    left = budget
    while left > 0 and rng.random() < 0.7:
        if rng.random() < 0.4:
            t = "".join(rng.choice(ALPHABET) for _ in range(rng.randint(1, min(2, left))))
            items.append(("t", t))
            left -= len(t)
        else:
            content = random_hedge(rng, left - 1)
            left -= 1 + weight(content)
            attrs = tuple(sorted({k: rng.choice(ATTR_VALUES)
                                  for k in rng.sample(["k", "m", "n"], rng.randint(0, 1))}.items()))
            items.append(("e", rng.choice(NAMES), attrs, content))
    h = ()
    for item in items:
        h = concat(h, (item,))
    return h


def mutate_hedge(rng, h):
    """A nearby hedge: drop, duplicate or alter one top-level item."""
    if not h:
        return random_hedge(rng)
    k = rng.randrange(len(h))
    item = h[k]
    choice = rng.randrange(4)
    if choice == 0:
        new = h[:k] + h[k + 1:]
    elif choice == 1:
        new = h[:k] + (item, item) + h[k + 1:]
    elif item[0] == "t":
        new = h[:k] + (("t", item[1][:-1] + ("a" if item[1][-1] == "b" else "b")),) + h[k + 1:]
    elif choice == 2:
        new = h[:k] + (("e", rng.choice(NAMES), item[2], item[3]),) + h[k + 1:]
    else:
        new = h[:k] + (("e", item[1], item[2], mutate_hedge(rng, item[3])),) + h[k + 1:]
    out = ()
    for i in new:
        out = concat(out, (i,))
    return out


# --- string regex oracle ------------------------------------------------------------------

def regex_ends(r, word, i):
    """Positions j such that r matches word[i:j]."""
    if r is Empty:
        return set()
    if r is Lambda:
        return {i}
    if isinstance(r, Sym):
        return {i + 1} if i < len(word) and word[i] == r.symbol else set()
    if isinstance(r, Concat):
        return {k for j in regex_ends(r.left, word, i) for k in regex_ends(r.right, word, j)}
    if isinstance(r, Alt):
        return regex_ends(r.left, word, i) | regex_ends(r.right, word, i)
    if isinstance(r, StarS):
        reached = {i}
        todo = [i]
        while todo:
            j = todo.pop()
            for k in regex_ends(r.body, word, j):
                if k not in reached:
                    reached.add(k)
                    todo.append(k)
        return reached
    raise TypeError(r)


def regex_member(r, word) -> bool:
    return len(word) in regex_ends(r, word, 0)


def regexes_of_size(n, symbols="xy"):
    """Every regex with exactly ``n`` constructor nodes."""
    if n == 1:
        yield Empty
        yield Lambda
        for s in symbols:
            yield Sym(s)
        return
    for body in regexes_of_size(n - 1, symbols):
        yield StarS(body)
    for k in range(1, n - 1):
        lefts = list(regexes_of_size(k, symbols))
        rights = list(regexes_of_size(n - 1 - k, symbols))
        for left in lefts:
            for right in rights:
                yield Concat(left, right)
                yield Alt(left, right)


def random_regex(rng, size, symbols="xy"):
    if size <= 1:
        return rng.choice([Empty, Lambda] + [Sym(s) for s in symbols])
    if size == 2:
        return StarS(random_regex(rng, 1, symbols))
    kind = rng.choice(["star", "cat", "alt"])
    if kind == "star":
        return StarS(random_regex(rng, size - 1, symbols))
    k = rng.randint(1, size - 2)
    ctor = Concat if kind == "cat" else Alt
    return ctor(random_regex(rng, k, symbols), random_regex(rng, size - 1 - k, symbols))


def words_upto(n, symbols="xy"):
    for k in range(n + 1):
        for w in itertools.product(symbols, repeat=k):
            yield "".join(w)


# --- templates and a deterministic mock plugin ----------------------------------------------

def _h(*parts):
    return zlib.crc32("\x1f".join(map(str, parts)).encode())


class MockPlugin:
    """Deterministic placeholder plugin; contexts are strings, results derive from a checksum."""

    def eval_text(self, select, ctx):
        v = _h("text", select, ctx)
        return "".join(ALPHABET[(v >> k) & 1] for k in range(v % 3))

    def eval_nodes(self, select, ctx):
        return [f"{ctx}/{select}[{k}]" for k in range(_h("nodes", select, ctx) % 3)]

    def eval_bool(self, select, ctx):
        return _h("bool", select, ctx) % 2 == 0

    def eval_include(self, select, ctx):
        v = _h("include", select, ctx)
        if v % 3 == 0:
            return None
        child = (Text("ab"),) if v % 2 else ()
        return Element(QName("", NAMES[v % 3]), (("src", str(v % 7)),), child)


def random_template(rng: random.Random, max_depth=4):
    """Random template rooted at an element, with non-recursive macros at the root.

    Attribute commands only appear as leading children of elements, and
    literal text never sits next to literal text.
    """
    n_macros = rng.randint(0, 2)
    defs = []
    names = []
    for k in range(n_macros):
        body = _template_hedge(rng, 2, tuple(names))
        name = f"m{k}"
        defs.append(XMacro(name, tuple(body)))
        names.append(name)
    root = _template_element(rng, max_depth - 1, tuple(names))
    return ElX(root.name, root.attrs, tuple(defs) + root.children)


def _template_element(rng, depth, macros):
    attrs = tuple((k, rng.choice(ATTR_VALUES)) for k in rng.sample(["k", "m"], rng.randint(0, 1)))
    children = []
    for _ in range(rng.randint(0, 1)):
        children.append(XAtt(rng.choice(["k", "n"]), "@x"))
    children += _template_hedge(rng, depth, macros)
    return ElX(rng.choice(NAMES), attrs, tuple(children))


def _template_hedge(rng, depth, macros):
    out = []
    for _ in range(rng.randint(0, 3)):
        kinds = ["txt", "xtxt", "el", "include"]
        if macros:
            kinds.append("call")
        if depth > 0:
            kinds += ["if", "for", "el"]
        kind = rng.choice(kinds)
        if kind == "txt":
            if out and isinstance(out[-1], TxtX):
                continue
            out.append(TxtX(rng.choice(["a", "b", "ab"])))
        elif kind == "xtxt":
            out.append(XTxt(rng.choice(["@t", "."])))
        elif kind == "include":
            out.append(XInclude("//x"))
        elif kind == "call":
            out.append(XCallMacro(rng.choice(macros)))
        elif kind == "el":
            out.append(_template_element(rng, max(depth - 1, 0), macros) if depth > 0
                       else ElX(rng.choice(NAMES), (), ()))
        elif kind == "if":
            out.append(XIf(rng.choice(["c", "d"]), tuple(_template_hedge(rng, depth - 1, macros))))
        else:
            out.append(XForEach(rng.choice(["p", "q"]), tuple(_template_hedge(rng, depth - 1, macros))))
    return out


def random_document(rng: random.Random, depth=3):
    """Random plain document (no commands) for round-trip checks."""
    def node(d):
        name = rng.choice(["a", "b", "x:c", "d-e", "xtl:other"])
        attrs = {}
        for _ in range(rng.randint(0, 2)):
            attrs[rng.choice(["id", "k", "z", "p:q"])] = "".join(
                rng.choice("ab<>&\"' 1") for _ in range(rng.randint(0, 4)))
        children = []
        for _ in range(rng.randint(0, 3) if d > 0 else 0):
            if rng.random() < 0.4:
                t = "".join(rng.choice("ab <>&'\"\n") for _ in range(rng.randint(1, 5)))
                if not t.strip(" \t\r\n"):
                    t = "x" + t
                if children and isinstance(children[-1], Text):
                    children[-1] = Text(children[-1].text + t)
                else:
                    children.append(Text(t))
            else:
                children.append(node(d - 1))
        return Element(QName.parse(name), tuple(attrs.items()), tuple(children))
    return node(depth)
