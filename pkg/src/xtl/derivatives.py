"""Partial derivatives (linear forms) and the NFA they induce, for string regexes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import RegexSyntaxError, UnknownSymbol


@dataclass(frozen=True)
class _Empty:
    def __repr__(self):
        return "Empty"


@dataclass(frozen=True)
class _Lambda:
    def __repr__(self):
        return "Lambda"


Empty = _Empty()
Lambda = _Lambda()


@dataclass(frozen=True)
class Sym:
    symbol: str


@dataclass(frozen=True)
class Concat:
    left: "SRegex"
    right: "SRegex"


@dataclass(frozen=True)
class Alt:
    left: "SRegex"
    right: "SRegex"


@dataclass(frozen=True)
class StarS:
    body: "SRegex"


SRegex = Union[_Empty, _Lambda, Sym, Concat, Alt, StarS]


def _flatten(r, kind, out):
    if isinstance(r, kind):
        _flatten(r.left, kind, out)
        _flatten(r.right, kind, out)
    else:
        out.append(r)


def _rebuild(items, kind):
    result = items[-1]
    for item in reversed(items[:-1]):
        result = kind(item, result)
    return result


def canon(r: SRegex) -> SRegex:
    """Right-associate ``Concat``/``Alt`` and drop ``Lambda`` factors of concatenations."""
    match r:
        case Concat():
            factors = []
            _flatten(r, Concat, factors)
            factors = [f for f in map(canon, factors) if f is not Lambda]
            flat = []
            for f in factors:
                _flatten(f, Concat, flat)
            return _rebuild(flat, Concat) if flat else Lambda
        case Alt():
            alts = []
            _flatten(r, Alt, alts)
            flat = []
            for a in map(canon, alts):
                _flatten(a, Alt, flat)
            return _rebuild(flat, Alt)
        case StarS(body):
            return StarS(canon(body))
    return r


def nullable(r: SRegex) -> bool:
    match r:
        case _Lambda() | StarS():
            return True
        case Concat(left, right):
            return nullable(left) and nullable(right)
        case Alt(left, right):
            return nullable(left) or nullable(right)
    return False


def _after(lf, q):
    return {(a, canon(Concat(p, q))) for a, p in lf}


def linear_form(r: SRegex) -> frozenset:
    """Set of ``(symbol, partial derivative)`` pairs, derivatives in canonical form."""
    match r:
        case Sym(a):
            return frozenset({(a, Lambda)})
        case StarS(body):
            return frozenset(_after(linear_form(body), r))
        case Concat(left, right):
            out = _after(linear_form(left), right)
            if nullable(left):
                out |= linear_form(right)
            return frozenset(out)
        case Alt(left, right):
            return linear_form(left) | linear_form(right)
    return frozenset()


def symbols(r: SRegex) -> frozenset:
    match r:
        case Sym(a):
            return frozenset(a)
        case Concat(left, right) | Alt(left, right):
            return symbols(left) | symbols(right)
        case StarS(body):
            return symbols(body)
    return frozenset()


@dataclass(frozen=True)
class Nfa:
    states: frozenset
    initial: SRegex
    finals: frozenset
    transitions: frozenset
    alphabet: frozenset


def build_nfa(r: SRegex, alphabet=None) -> Nfa:
    """Worklist construction: states are the canonical partial derivatives reachable from ``r``."""
    start = canon(r)
    seen = set()
    delta = {start}
    trans = set()
    while delta:
        seen |= delta
        fresh = set()
        for p in delta:
            for a, q in linear_form(p):
                trans.add((p, a, q))
                if q not in seen:
                    fresh.add(q)
        delta = fresh
    finals = frozenset(s for s in seen if nullable(s))
    alphabet = frozenset(alphabet) if alphabet is not None else symbols(start)
    return Nfa(frozenset(seen), start, finals, frozenset(trans), alphabet)


def nfa_accepts(n: Nfa, word) -> bool:
    current = {n.initial}
    step = {}
    for p, a, q in n.transitions:
        step.setdefault((p, a), set()).add(q)
    for a in word:
        if a not in n.alphabet:
            raise UnknownSymbol(a)
        current = set().union(*(step.get((p, a), ()) for p in current))
    return any(s in n.finals for s in current)


# --- text syntax ---------------------------------------------------------------------

def parse_regex(text: str) -> SRegex:
    """Letters, juxtaposition for concatenation, ``+`` for choice, postfix ``*``, parentheses.

    ``ε`` and ``∅`` are accepted so printed states parse back.
    """
    src = "".join(text.split())
    pos = 0

    def peek():
        return src[pos] if pos < len(src) else ""

    def fail(msg):
        raise RegexSyntaxError(f"{msg} at offset {pos} in {text!r}")

    def alt():
        nonlocal pos
        r = concat()
        while peek() == "+":
            pos += 1
            r = Alt(r, concat())
        return r

    def concat():
        factors = []
        while peek() and (peek().isalpha() and peek().isascii() or peek() in "(ε∅"):
            factors.append(postfix())
        if not factors:
            fail("expected a symbol or '('")
        return _rebuild(factors, Concat)

    def postfix():
        nonlocal pos
        r = atom()
        while peek() == "*":
            pos += 1
            r = StarS(r)
        return r

    def atom():
        nonlocal pos
        ch = peek()
        pos += 1
        if ch == "(":
            r = alt()
            if peek() != ")":
                fail("expected ')'")
            pos += 1
            return r
        if ch == "ε":
            return Lambda
        if ch == "∅":
            return Empty
        return Sym(ch)

    if not src:
        raise RegexSyntaxError("empty regular expression")
    r = alt()
    if pos != len(src):
        fail(f"unexpected {peek()!r}")
    return r


def format_regex(r: SRegex, prec: int = 0) -> str:
    """Print with minimal parentheses; 0 = choice, 1 = concatenation, 2 = starred atom."""
    match r:
        case _Empty():
            return "∅"
        case _Lambda():
            return "ε"
        case Sym(a):
            return a
        case Alt(left, right):
            s = f"{format_regex(left, 0)}+{format_regex(right, 0)}"
            return f"({s})" if prec > 0 else s
        case Concat(left, right):
            s = format_regex(left, 1) + format_regex(right, 1)
            return f"({s})" if prec > 1 else s
        case StarS(body):
            return format_regex(body, 2) + "*"
    raise TypeError(f"not a regex: {r!r}")


def transition_table(n: Nfa) -> str:
    lines = [f"initial: {format_regex(n.initial)}"]
    lines += [f"final: {f}" for f in sorted(map(format_regex, n.finals))]
    rows = sorted((format_regex(p), a, format_regex(q)) for p, a, q in n.transitions)
    lines += [f"{p} --{a}--> {q}" for p, a, q in rows]
    return "\n".join(lines) + "\n"


def to_dot(n: Nfa) -> str:
    names = {s: f"q{k}" for k, s in enumerate(sorted(n.states, key=format_regex))}
    out = ["digraph nfa {", "  rankdir=LR;", '  start [shape=point];']
    for s, name in names.items():
        shape = "doublecircle" if s in n.finals else "circle"
        label = format_regex(s).replace('"', '\\"')
        out.append(f'  {name} [shape={shape}, label="{label}"];')
    out.append(f"  start -> {names[n.initial]};")
    rows = sorted((names[p], a, names[q]) for p, a, q in n.transitions)
    out += [f'  {p} -> {q} [label="{a}"];' for p, a, q in rows]
    out.append("}")
    return "\n".join(out) + "\n"
