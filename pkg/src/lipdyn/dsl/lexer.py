"""Tokenizer for the map-definition language."""

from __future__ import annotations

import re
from dataclasses import dataclass

from lipdyn.errors import LexError

KEYWORDS = frozenset({"map", "piecewise", "else", "abs"})

# longest operators first so "<=" wins over "<" and "=>" over "="
_OPERATORS = ("<=", ">=", "=>", "+", "-", "*", "/", "^", "<", ">", "=")
_PUNCTUATION = ("(", ")", "{", "}", ";")

_NUMBER = re.compile(r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


@dataclass(frozen=True)
class Token:
    kind: str  # number | identifier | operator | punctuation | keyword | eof
    lexeme: str
    line: int
    column: int
    offset: int

    def __repr__(self):
        return f"Token({self.kind} {self.lexeme!r} @{self.line}:{self.column})"


def tokenize(source: str) -> list[Token]:
    """Split *source* into tokens, ending with a single ``eof`` token.

    Whitespace and ``#`` comments are skipped. Raises :class:`LexError`
    with a 1-based line/column on any character outside the grammar.
    """
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    n = len(source)
    while pos < n:
        ch = source[pos]
        if ch == "\n":
            pos += 1
            line += 1
            line_start = pos
            continue
        if ch.isspace():
            pos += 1
            continue
        if ch == "#":
            while pos < n and source[pos] != "\n":
                pos += 1
            continue

        column = pos - line_start + 1
        m = _NUMBER.match(source, pos)
        if m:
            kind, lexeme = "number", m.group()
        else:
            m = _IDENT.match(source, pos)
            if m:
                lexeme = m.group()
                kind = "keyword" if lexeme in KEYWORDS else "identifier"
            else:
                lexeme = next((op for op in _OPERATORS if source.startswith(op, pos)), None)
                kind = "operator"
                if lexeme is None:
                    if ch in _PUNCTUATION:
                        kind, lexeme = "punctuation", ch
                    else:
                        raise LexError(f"illegal character {ch!r}", line, column)
        tokens.append(Token(kind, lexeme, line, column, pos))
        pos += len(lexeme)

    tokens.append(Token("eof", "", line, pos - line_start + 1, pos))
    return tokens
