"""Parser for the bracketed feature-structure description language.

A description is a (possibly tagged) type name, an attribute-value
bracket, a list, or any sensible combination::

    #1 noun [CASE: nominative, MOD: null, SUBCAT: <>]
    [SYNSEM|LOCAL|CAT|HEAD: #1, SYNSEM|LOCAL|CONT|INDEX: #3]
    <#s, [LOCAL|CAT|HEAD|CASE: accusative] | #rest>

Tokens:

``#n``         reentrancy tag (any word characters after ``#``)
``"x1"``       string atom, an implicit leaf of the lattice's atom type
``$c``         fresh atom, replaced by an unused atom name when built
``FEAT|FEAT``  feature path; feature names are upper case
``name``       type name; lower case, digits and hyphens, or ``+``/``-``
``<a, b>``     list sugar over FIRST/REST; ``<a | t>`` gives the tail,
               ``<a, ...>`` leaves the tail open

The colon after a path is optional.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

FEATURE_RE = re.compile(r"^[A-Z][A-Z0-9\-]*$")

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<ellipsis>\.\.\.)
  | (?P<punct>[\[\]<>,:|])
  | (?P<tag>\#\w+)
  | (?P<atom>"[^"]*")
  | (?P<fresh>\$[A-Za-z]\w*)
  | (?P<name>[A-Za-z][\w\-]*|[+\-])
    """,
    re.VERBOSE,
)

OPEN = "..."


class DescriptionError(ValueError):
    """Malformed description text."""


@dataclass
class Desc:
    tag: str | None = None
    type: str | None = None
    pairs: list[tuple[tuple[str, ...], "Desc"]] = field(default_factory=list)
    items: list["Desc"] | None = None
    # None closes the list, OPEN leaves it unspecified
    tail: "Desc | str | None" = None

    def is_empty(self) -> bool:
        return self.tag is None and self.type is None and not self.pairs and self.items is None

    def types(self):
        """Yield every type token mentioned in the description."""
        if self.type is not None:
            yield self.type
        for _, sub in self.pairs:
            yield from sub.types()
        for sub in self.items or ():
            yield from sub.types()
        if isinstance(self.tail, Desc):
            yield from self.tail.types()

    def features(self):
        for path, sub in self.pairs:
            yield from path
            yield from sub.features()
        for sub in self.items or ():
            yield from sub.features()
        if isinstance(self.tail, Desc):
            yield from self.tail.features()

    def tags(self):
        if self.tag is not None:
            yield self.tag
        for _, sub in self.pairs:
            yield from sub.tags()
        for sub in self.items or ():
            yield from sub.tags()
        if isinstance(self.tail, Desc):
            yield from self.tail.tags()


def tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DescriptionError(f"unexpected character {text[pos]!r} at {pos} in {text!r}")
        pos = m.end()
        kind = m.lastgroup
        if kind == "ws":
            continue
        tokens.append((kind, m.group()))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def next(self):
        tok = self.peek()
        if tok[0] is None:
            raise DescriptionError(f"unexpected end of description: {self.text!r}")
        self.i += 1
        return tok

    def expect(self, value):
        kind, val = self.next()
        if val != value:
            raise DescriptionError(f"expected {value!r}, got {val!r} in {self.text!r}")

    def term(self) -> Desc:
        d = Desc()
        kind, val = self.peek()
        if kind == "tag":
            self.next()
            d.tag = val
            kind, val = self.peek()
        if kind == "name" and not FEATURE_RE.match(val):
            self.next()
            d.type = val
            kind, val = self.peek()
        elif kind in ("atom", "fresh"):
            self.next()
            d.type = val
            kind, val = self.peek()
        bracket = val == "["
        if bracket:
            self.avm(d)
        elif val == "<":
            if d.type is not None:
                raise DescriptionError(f"a list cannot carry a type name: {self.text!r}")
            self.lst(d)
        if d.is_empty() and not bracket:
            raise DescriptionError(f"empty description near token {val!r} in {self.text!r}")
        return d

    def path(self) -> tuple[str, ...]:
        feats = []
        while True:
            kind, val = self.next()
            if kind != "name" or not FEATURE_RE.match(val):
                raise DescriptionError(f"expected feature name, got {val!r} in {self.text!r}")
            feats.append(val)
            if self.peek()[1] == "|":
                self.next()
                continue
            break
        return tuple(feats)

    def avm(self, d: Desc):
        self.expect("[")
        if self.peek()[1] == "]":
            self.next()
            return
        while True:
            p = self.path()
            if self.peek()[1] == ":":
                self.next()
            d.pairs.append((p, self.term()))
            kind, val = self.next()
            if val == "]":
                return
            if val != ",":
                raise DescriptionError(f"expected ',' or ']', got {val!r} in {self.text!r}")

    def lst(self, d: Desc):
        self.expect("<")
        d.items = []
        if self.peek()[1] == ">":
            self.next()
            return
        while True:
            d.items.append(self.term())
            kind, val = self.next()
            if val == ">":
                return
            if val == "|":
                d.tail = self.term()
                self.expect(">")
                return
            if val != ",":
                raise DescriptionError(f"expected ',', '|' or '>', got {val!r} in {self.text!r}")
            if self.peek()[0] == "ellipsis":
                self.next()
                d.tail = OPEN
                self.expect(">")
                return


def parse(text: str) -> Desc:
    """Parse a single description; trailing tokens are an error."""
    p = _Parser(text)
    d = p.term()
    if p.i != len(p.tokens):
        raise DescriptionError(f"trailing tokens after description: {text!r}")
    return d


def split_top_level(text: str, sep: str = ",") -> list[str]:
    """Split on ``sep`` outside brackets, lists, parentheses and quotes."""
    parts, depth, buf, quoted = [], 0, [], False
    for ch in text:
        if ch == '"':
            quoted = not quoted
        elif not quoted:
            if ch in "[<(":
                depth += 1
            elif ch in "]>)":
                depth -= 1
            elif ch == sep and depth == 0:
                parts.append("".join(buf).strip())
                buf = []
                continue
        buf.append(ch)
    tail = "".join(buf).strip()
    if tail:
        parts.append(tail)
    return parts
