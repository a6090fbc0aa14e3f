"""Recursive-descent parser for map definitions.

Grammar::

    mapfile   := "map" ident "(" ident ")" "=" expr
    expr      := piecewise | sum
    piecewise := "piecewise" "{" (guard "=>" sum ";")+ "else" "=>" sum [";"] "}"
    guard     := ident ("<" | "<=" | ">" | ">=") ["-"] number
    sum       := prod (("+" | "-") prod)*
    prod      := unary (("*" | "/") unary)*
    unary     := "-" unary | power
    power     := atom ["^" integer]
    atom      := number | ident | "abs" "(" expr ")" | "(" expr ")"
"""

from __future__ import annotations

from lipdyn.dsl.lexer import Token, tokenize
from lipdyn.dsl.nodes import (
    COMPARISONS, Abs, Add, Const, Div, Guard, Mul, Neg, Piecewise, Pow, Sub, Var,
)
from lipdyn.errors import ParseError


class Parser:
    def __init__(self, tokens: list[Token], variable: str | None = None):
        self.tokens = tokens
        self.pos = 0
        self.variable = variable

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def _describe(self, tok: Token) -> str:
        return "end of input" if tok.kind == "eof" else repr(tok.lexeme)

    def error(self, message: str, expected=()) -> ParseError:
        tok = self.current
        return ParseError(f"{message}, got {self._describe(tok)}", tok.line, tok.column, expected)

    def check(self, lexeme: str) -> bool:
        tok = self.current
        return tok.lexeme == lexeme and tok.kind in ("operator", "punctuation", "keyword")

    def expect(self, lexeme: str) -> Token:
        if not self.check(lexeme):
            raise self.error(f"expected {lexeme!r}", [lexeme])
        tok = self.current
        self.pos += 1
        return tok

    def expect_kind(self, kind: str) -> Token:
        tok = self.current
        if tok.kind != kind:
            raise self.error(f"expected {kind}", [kind])
        self.pos += 1
        return tok

    def mapfile(self):
        self.expect("map")
        name = self.expect_kind("identifier").lexeme
        self.expect("(")
        self.variable = self.expect_kind("identifier").lexeme
        self.expect(")")
        self.expect("=")
        body = self.expr()
        self.expect_kind("eof")
        return name, self.variable, body

    def expr(self):
        if self.check("piecewise"):
            return self.piecewise()
        return self.sum()

    def piecewise(self):
        self.expect("piecewise")
        self.expect("{")
        branches = []
        while not self.check("else"):
            if self.current.kind != "identifier":
                raise self.error("expected a guard or 'else'", ["identifier", "else"])
            guard = self.guard()
            self.expect("=>")
            body = self.sum()
            self.expect(";")
            branches.append((guard, body))
        if not branches:
            raise self.error("piecewise needs at least one guarded branch", ["identifier"])
        self.expect("else")
        self.expect("=>")
        otherwise = self.sum()
        if self.check(";"):
            self.pos += 1
        self.expect("}")
        return Piecewise(tuple(branches), otherwise)

    def guard(self):
        var = self.identifier()
        tok = self.current
        if tok.kind != "operator" or tok.lexeme not in COMPARISONS:
            raise self.error("expected a comparison", COMPARISONS)
        self.pos += 1
        sign = 1.0
        if self.check("-"):
            self.pos += 1
            sign = -1.0
        value = float(self.expect_kind("number").lexeme)
        return Guard(var, tok.lexeme, sign * value)

    def sum(self):
        left = self.prod()
        while self.check("+") or self.check("-"):
            op = self.current.lexeme
            self.pos += 1
            right = self.prod()
            left = Add(left, right) if op == "+" else Sub(left, right)
        return left

    def prod(self):
        left = self.unary()
        while self.check("*") or self.check("/"):
            op = self.current.lexeme
            self.pos += 1
            right = self.unary()
            left = Mul(left, right) if op == "*" else Div(left, right)
        return left

    def unary(self):
        if self.check("-"):
            self.pos += 1
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.check("^"):
            self.pos += 1
            tok = self.current
            if tok.kind != "number" or not tok.lexeme.isdigit():
                raise self.error("expected a non-negative integer exponent", ["integer"])
            self.pos += 1
            return Pow(base, int(tok.lexeme))
        return base

    def identifier(self) -> Var:
        tok = self.expect_kind("identifier")
        if self.variable is not None and tok.lexeme != self.variable:
            self.pos -= 1
            raise self.error(f"unknown variable (the map variable is {self.variable!r})",
                             [self.variable])
        return Var(tok.lexeme)

    def atom(self):
        tok = self.current
        if tok.kind == "number":
            self.pos += 1
            return Const(float(tok.lexeme))
        if tok.kind == "identifier":
            return self.identifier()
        if self.check("abs"):
            self.pos += 1
            self.expect("(")
            inner = self.expr()
            self.expect(")")
            return Abs(inner)
        if self.check("("):
            self.pos += 1
            inner = self.expr()
            self.expect(")")
            return inner
        raise self.error("expected an operand", ["number", "identifier", "abs", "("])


def parse_expr(source: str, variable: str | None = None):
    """Parse a bare expression (no ``map f(x) =`` header)."""
    p = Parser(tokenize(source), variable)
    body = p.expr()
    p.expect_kind("eof")
    return body


def parse_map(source: str):
    """Parse a full ``map name(var) = body`` definition into a MapDefinition."""
    from lipdyn.dsl.mapdef import MapDefinition

    name, variable, body = Parser(tokenize(source)).mapfile()
    return MapDefinition.build(name, variable, body)
