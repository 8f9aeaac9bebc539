"""Precedence-climbing parser for the expression grammar.

Grammar (lowest to highest binding)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right-associative, integer exponent
    atom   := INTEGER | IDENT | FUNC '(' expr ')' | '(' expr ')'

``IDENT`` matches ``[a-zA-Z][a-zA-Z0-9]*``; ``FUNC`` is one of exp, log,
sin, cos.  Rational literals are written ``p/q`` and fold to constants.
"""

from __future__ import annotations

import re
from typing import Iterable

from .expr import FUNCTIONS, Const, Expr, ExprError, Var, add, div, func, mul, neg, power

DEFAULT_VARIABLES = ("x1", "x2")

_TOKEN = re.compile(r"\s*(?:(\d+)|([a-zA-Z][a-zA-Z0-9]*)|(.))")


class ParseError(ExprError):
    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}")
        self.position = position
        self.text = text


class UnknownIdentifierError(ParseError):
    def __init__(self, name: str, position: int, text: str = ""):
        super().__init__(f"unknown identifier {name!r}", position, text)
        self.name = name


def _tokenize(text: str):
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else m.end()
        if m.group(1) is not None:
            toks.append(("int", m.group(1), start))
        elif m.group(2) is not None:
            toks.append(("ident", m.group(2), start))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch.isspace():
                pos = m.end()
                continue
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", start, text)
            toks.append(("op", ch, start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, variables: frozenset):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.variables = variables

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, v, pos = self.take()
        if v != value or kind != "op":
            raise ParseError(f"expected {value!r}", pos, self.text)

    def parse(self) -> Expr:
        e = self.expr()
        kind, v, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {v!r}", pos, self.text)
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            right = self.term()
            left = add(left, right) if op == "+" else add(left, neg(right))
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            right = self.unary()
            left = mul(left, right) if op == "*" else div(left, right)
        return left

    def unary(self) -> Expr:
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            pos = self.take()[2]
            exponent = self.unary()
            if not (isinstance(exponent, Const) and exponent.value.denominator == 1):
                raise ParseError("exponent must be an integer constant", pos, self.text)
            return power(base, int(exponent.value))
        return base

    def atom(self) -> Expr:
        kind, v, pos = self.take()
        if kind == "int":
            return Const(int(v))
        if kind == "ident":
            if self.peek()[:2] == ("op", "("):
                if v not in FUNCTIONS:
                    raise UnknownIdentifierError(v, pos, self.text)
                self.take()
                arg = self.expr()
                self.expect(")")
                return func(v, arg)
            if v in FUNCTIONS:
                raise ParseError(f"function {v!r} needs an argument", pos, self.text)
            if v not in self.variables:
                raise UnknownIdentifierError(v, pos, self.text)
            return Var(v)
        if (kind, v) == ("op", "("):
            e = self.expr()
            self.expect(")")
            return e
        if kind == "end":
            raise ParseError("unexpected end of input", pos, self.text)
        raise ParseError(f"unexpected token {v!r}", pos, self.text)


def parse(text: str, variables: Iterable[str] = DEFAULT_VARIABLES) -> Expr:
    """Parse ``text`` into an expression over the given variable names."""
    return _Parser(text, frozenset(variables)).parse()
