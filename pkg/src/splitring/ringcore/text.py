"""Canonical encoding and the expression parser.

The parser accepts both the canonical grammar (``{1/2*t1^2 + -1*t1^1 + 3}``)
and a relaxed pretty form such as ``1/2 t1^2 - t1 + 3``: implicit
multiplication, optional ``^1``, optional braces, parentheses, binary minus.
A slash is only accepted inside a rational literal.  ``laurent=True`` parses Laurent expressions where S-generators
may carry negative exponents.
"""

from __future__ import annotations

import re
from fractions import Fraction

from ..errors import ParseError, UnknownIndeterminate
from .element import ONE, Element, Indet, Kind
from .laurent import LaurentElement, to_laurent


def canonical_encode(e):
    return e.key


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<open>s'\[|s\[|u\[|up\[)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op>[-+*/^;()\[\]{}])
    """,
    re.VERBOSE,
)

_TVAR = re.compile(r"t(\d+)$")


def tokenize(src):
    pos = 0
    toks = []
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m:
            raise ParseError(f"unexpected character {src[pos]!r}", pos, src)
        kind = m.lastgroup
        text = m.group()
        if kind != "ws":
            if kind == "name" and _TVAR.match(text):
                kind = "tvar"
            toks.append((kind, text, pos))
        pos = m.end()
    toks.append(("end", "", len(src)))
    return toks


class _Parser:
    def __init__(self, src, tower, names, laurent):
        self.src = src
        self.toks = tokenize(src)
        self.i = 0
        self.tower = tower
        self.names = names
        self.laurent = laurent

    # -- token helpers -------------------------------------------------
    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        tok = self.next()
        if tok[1] != text:
            raise ParseError(f"expected {text!r}, found {tok[1] or 'end of input'!r}", tok[2], self.src)
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ParseError(msg, tok[2], self.src)

    # -- values ---------------------------------------------------------
    def lift(self, value):
        if self.laurent and isinstance(value, Element):
            return to_laurent(value)
        return value

    def const(self, c):
        return LaurentElement.constant(c) if self.laurent else Element.constant(c)

    # -- grammar ----------------------------------------------------------
    def parse_all(self):
        value = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise self.error(f"unexpected {tok[1]!r}")
        return value

    def expr(self):
        tok = self.peek()
        sign = 1
        if tok[1] in "+-" and tok[0] == "op":
            self.next()
            sign = -1 if tok[1] == "-" else 1
        value = self.term()
        if sign < 0:
            value = -value
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] in ("+", "-"):
                self.next()
                rhs = self.term()
                value = value + rhs if tok[1] == "+" else value - rhs
            else:
                return value

    def _starts_atom(self, tok):
        return tok[0] in ("int", "tvar", "name", "open") or (tok[0] == "op" and tok[1] in "({")

    def term(self):
        value = self.unary()
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] == "*":
                self.next()
                value = value * self.unary()
            elif self._starts_atom(tok):
                value = value * self.unary()
            else:
                return value

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.next()
            return -self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.next()
            neg = False
            if self.peek()[1] == "-":
                self.next()
                neg = True
            etok = self.next()
            if etok[0] != "int":
                raise self.error("exponent must be an integer", etok)
            n = int(etok[1])
            if neg:
                if not self.laurent:
                    raise self.error("negative exponents are only allowed in Laurent expressions", etok)
                try:
                    return base ** (-n)
                except ValueError as exc:
                    raise self.error(str(exc), etok) from None
            return base ** n
        return base

    def atom(self):
        tok = self.next()
        kind, text, pos = tok
        if kind == "int":
            num = int(text)
            if self.peek()[1] == "/" and self.toks[self.i + 1][0] == "int":
                self.next()
                den = int(self.next()[1])
                if den == 0:
                    raise ParseError("zero denominator", pos, self.src)
                return self.const(Fraction(num, den))
            return self.const(num)
        if kind == "tvar":
            stage = int(text[1:])
            if stage < 1:
                raise ParseError("t-indeterminates start at stage 1", pos, self.src)
            return self.lift(Element.variable(Indet(Kind.T, stage)))
        if kind == "open":
            return self.lift(Element.variable(self.indet_body(text, pos)))
        if kind == "name":
            if self.names is None:
                raise ParseError(f"unknown name {text!r}", pos, self.src)
            try:
                value = self.names(text)
            except KeyError:
                raise ParseError(f"unknown name {text!r}", pos, self.src) from None
            return self.lift(value)
        if kind == "op" and text in "({":
            inner = self.expr()
            self.expect(")" if text == "(" else "}")
            return inner
        raise ParseError(f"unexpected {text or 'end of input'!r}", pos, self.src)

    def payload(self):
        saved = self.laurent
        self.laurent = False
        try:
            return self.expr()
        finally:
            self.laurent = saved

    def indet_body(self, opener, pos):
        if opener == "up[":
            raise ParseError("unit-prime handles are only valid in certificates", pos, self.src)
        stok = self.next()
        if stok[0] != "int":
            raise self.error("expected stage number", stok)
        stage = int(stok[1])
        self.expect(";")
        first = self.payload()
        if opener == "u[":
            self.expect(";")
            second = self.payload()
            self.expect("]")
            return self.resolve_u(stage, first, second, pos)
        self.expect("]")
        return self.resolve_split(opener == "s'[", stage, first, pos)

    def resolve_split(self, conj, stage, p, pos):
        if self.tower is None:
            raise UnknownIndeterminate(f"no tower to resolve split of {p.pretty()}")
        s = self.tower.lookup_split(p)
        if s is None or s.stage != stage:
            raise UnknownIndeterminate(f"no split of {p.pretty()} registered at stage {stage} (column {pos + 1})")
        return s.conj if conj else s

    def resolve_u(self, stage, a, b, pos):
        if self.tower is None:
            raise UnknownIndeterminate("no tower to resolve u-indeterminate")
        u = self.tower.lookup_u(stage, a, b)
        if u is None:
            raise UnknownIndeterminate(
                f"u[{stage};{a.pretty()};{b.pretty()}] is not registered (column {pos + 1})"
            )
        return u


def parse_element(src, tower, names=None):
    """Parse an element written in canonical or pretty form.

    ``names`` is an optional callable resolving identifiers (session bindings);
    it should raise KeyError for unknown names.
    """
    return _Parser(src, tower, names, laurent=False).parse_all()


def parse_laurent(src, tower, names=None):
    return _Parser(src, tower, names, laurent=True).parse_all()


def parse_indet(src, tower):
    """Parse a single indeterminate such as ``s'[2;t1]`` or ``t3``."""
    e = parse_element(src, tower)
    if len(e.terms) != 1 or e.terms[0][1] != 1 or len(e.terms[0][0]) != 1 or e.terms[0][0][0][1] != 1:
        raise ParseError(f"{src!r} is not a single indeterminate", 0, src)
    return e.terms[0][0][0][0]


class Cursor:
    """Parse one brace-delimited canonical element off the front of a string."""

    @staticmethod
    def take_braced(src, pos=0):
        while pos < len(src) and src[pos] == " ":
            pos += 1
        if pos >= len(src) or src[pos] != "{":
            raise ParseError("expected '{'", pos, src)
        depth = 0
        for i in range(pos, len(src)):
            if src[i] == "{":
                depth += 1
            elif src[i] == "}":
                depth -= 1
                if depth == 0:
                    return src[pos:i + 1], i + 1
        raise ParseError("unbalanced braces", pos, src)


__all__ = [
    "ONE",
    "canonical_encode",
    "parse_element",
    "parse_laurent",
    "parse_indet",
    "tokenize",
    "Cursor",
]
