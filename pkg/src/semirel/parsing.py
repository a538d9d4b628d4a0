"""A small shared token scanner for the two query grammars."""

from __future__ import annotations

import re


class ParseError(Exception):
    """Syntax error carrying the offending position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<punct>!=|[()\[\],.#=])
    """,
    re.VERBOSE,
)


class Scanner:
    """Tokenizes input into (kind, text, pos) triples with one-token lookahead."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None:
                raise ParseError(f"unexpected character {text[pos]!r}", pos)
            kind = m.lastgroup
            if kind != "ws":
                self.tokens.append((kind, m.group(), pos))
            pos = m.end()
        self.index = 0

    def peek(self):
        if self.index < len(self.tokens):
            return self.tokens[self.index]
        return ("eof", "", len(self.text))

    def next(self):
        tok = self.peek()
        if tok[0] != "eof":
            self.index += 1
        return tok

    def expect(self, text: str):
        kind, got, pos = self.next()
        if got != text:
            raise ParseError(f"expected {text!r}, found {got or 'end of input'!r}", pos)

    def at(self, text: str) -> bool:
        return self.peek()[1] == text

    def take(self, text: str) -> bool:
        if self.at(text):
            self.next()
            return True
        return False

    def expect_end(self):
        kind, got, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected trailing input {got!r}", pos)
