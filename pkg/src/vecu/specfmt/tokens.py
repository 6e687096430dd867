"""Tokenizer shared by all five text formats.

Whitespace (including newlines) is insignificant; `#` starts a comment that
runs to end of line.  Identifiers are [A-Za-z_][A-Za-z0-9_]*; numeric
literals are decimal integers or decimal floats (no hex, no exponent).
Every token carries its 1-based line and column for error reporting.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import VecuSyntaxError

PUNCT2 = (":=", "->", "<=", ">=", "==", "!=")
PUNCT1 = ":;,=(){}[]|<>+-*/%."


def _is_ident_start(c: str) -> bool:
    return c == "_" or "a" <= c <= "z" or "A" <= c <= "Z"


def _is_ident_char(c: str) -> bool:
    return _is_ident_start(c) or "0" <= c <= "9"


@dataclass
class Token:
    kind: str           # 'ident' | 'num' | 'punct' | 'eof'
    text: str
    value: object = None  # int or float for 'num'
    line: int = 0
    col: int = 0


def tokenize(text: str, path: str | None = None) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = col
        if _is_ident_start(c):
            j = i
            while j < n and _is_ident_char(text[j]):
                j += 1
            toks.append(Token("ident", text[i:j], None, line, start_col))
            col += j - i
            i = j
            continue
        if "0" <= c <= "9":
            j = i
            while j < n and "0" <= text[j] <= "9":
                j += 1
            is_float = False
            if j + 1 < n and text[j] == "." and "0" <= text[j + 1] <= "9":
                is_float = True
                j += 1
                while j < n and "0" <= text[j] <= "9":
                    j += 1
            word = text[i:j]
            value: object = float(word) if is_float else int(word)
            toks.append(Token("num", word, value, line, start_col))
            col += j - i
            i = j
            continue
        if text[i:i + 2] in PUNCT2:
            toks.append(Token("punct", text[i:i + 2], None, line, start_col))
            i += 2
            col += 2
            continue
        if c in PUNCT1:
            toks.append(Token("punct", c, None, line, start_col))
            i += 1
            col += 1
            continue
        raise VecuSyntaxError(f"unexpected character {c!r}", line, start_col, path)
    toks.append(Token("eof", "", None, line, col))
    return toks


class TokenStream:
    def __init__(self, text: str, path: str | None = None):
        self.tokens = tokenize(text, path)
        self.path = path
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        i = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[i]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at_eof(self) -> bool:
        return self.peek().kind == "eof"

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (text is None or tok.text == text)

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        if self.at(kind, text):
            return self.next()
        return None

    def expect(self, kind: str, text: str | None = None,
               what: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind == kind and (text is None or tok.text == text):
            return self.next()
        wanted = what or (repr(text) if text else kind)
        found = repr(tok.text) if tok.text else "end of input"
        raise VecuSyntaxError(f"expected {wanted}, found {found}",
                              tok.line, tok.col, self.path)

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise VecuSyntaxError(message, tok.line, tok.col, self.path)
