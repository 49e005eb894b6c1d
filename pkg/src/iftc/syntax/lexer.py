"""Tokenizer with offside-rule INDENT/DEDENT tokens.

Comments run from ``//`` to end of line and are dropped, except that a
comment beginning with ``expect-error`` becomes an ``EXPECT_ERROR`` token so
the benchmark harness can read expectations from the same stream the parser
uses.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from ..diagnostics import LexError, Span


class Tok(enum.Enum):
    IDENT = "IDENT"
    TYPEIDENT = "TYPEIDENT"
    NUMBER = "NUMBER"
    STRING = "STRING"
    # keywords
    DEFINE = "define"
    STRUCT = "struct"
    TYPE = "type"
    LET = "let"
    VAR = "var"
    IF = "if"
    ELSE = "else"
    FOR = "for"
    IN = "in"
    RETURN = "return"
    ASSERT = "assert"
    IS = "is"
    IMPLIES = "implies"
    NOT = "not"
    AND = "and"
    OR = "or"
    MOD = "mod"
    TRUE = "true"
    FALSE = "false"
    # punctuation
    LPAREN = "("
    RPAREN = ")"
    LBRACKET = "["
    RBRACKET = "]"
    COMMA = ","
    COLON = ":"
    DOT = "."
    ARROW = "->"
    ASSIGN = "="
    EQ = "=="
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="
    PLUS = "+"
    MINUS = "-"
    STAR = "*"
    SLASH = "/"
    BAR = "|"
    # layout and metadata
    NEWLINE = "NEWLINE"
    INDENT = "INDENT"
    DEDENT = "DEDENT"
    EXPECT_ERROR = "EXPECT_ERROR"
    EOF = "EOF"


KEYWORDS = {
    t.value: t
    for t in (
        Tok.DEFINE, Tok.STRUCT, Tok.TYPE, Tok.LET, Tok.VAR, Tok.IF, Tok.ELSE,
        Tok.FOR, Tok.IN, Tok.RETURN, Tok.ASSERT, Tok.IS, Tok.IMPLIES, Tok.NOT,
        Tok.AND, Tok.OR, Tok.MOD, Tok.TRUE, Tok.FALSE,
    )
}

# two-character operators first so that "->" wins over "-"
PUNCT = [
    Tok.ARROW, Tok.EQ, Tok.LE, Tok.GE,
    Tok.LPAREN, Tok.RPAREN, Tok.LBRACKET, Tok.RBRACKET, Tok.COMMA, Tok.COLON,
    Tok.DOT, Tok.ASSIGN, Tok.LT, Tok.GT, Tok.PLUS, Tok.MINUS, Tok.STAR,
    Tok.SLASH, Tok.BAR,
]

OPENERS = {Tok.LPAREN, Tok.LBRACKET}
CLOSERS = {Tok.RPAREN, Tok.RBRACKET}

ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t"}


@dataclass(frozen=True)
class Token:
    kind: Tok
    text: str
    line: int
    col: int
    value: object = None

    def span(self, file: str) -> Span:
        return Span(file, self.line, self.col, max(1, len(self.text)))

    def __repr__(self) -> str:
        if self.kind in (Tok.IDENT, Tok.TYPEIDENT, Tok.NUMBER, Tok.STRING):
            return f"{self.kind.name}({self.text})"
        return self.kind.name


def tokenize(source: str, file: str = "<input>") -> list[Token]:
    """Split ``source`` into tokens; raises LexError (E001)."""
    source = source.replace("\r\n", "\n").replace("\r", "\n")
    tokens: list[Token] = []
    indents = [0]
    indent_style: str | None = None
    depth = 0
    lines = source.split("\n")

    for lineno, line in enumerate(lines, start=1):
        pos = 0
        n = len(line)
        stripped = line.lstrip(" \t")
        if depth == 0:
            if not stripped or stripped.startswith("//"):
                if stripped.startswith("//"):
                    _comment(tokens, stripped, lineno, n - len(stripped) + 1)
                continue
            lead = line[: n - len(stripped)]
            if lead:
                if " " in lead and "\t" in lead:
                    raise LexError("indentation mixes tabs and spaces", Span(file, lineno, 1, len(lead)))
                style = lead[0]
                if indent_style is None:
                    indent_style = style
                elif style != indent_style:
                    raise LexError("indentation mixes tabs and spaces", Span(file, lineno, 1, len(lead)))
            width = len(lead)
            if width > indents[-1]:
                indents.append(width)
                tokens.append(Token(Tok.INDENT, "", lineno, 1))
            else:
                while width < indents[-1]:
                    indents.pop()
                    tokens.append(Token(Tok.DEDENT, "", lineno, 1))
                if width != indents[-1]:
                    raise LexError("dedent does not match any outer indentation level", Span(file, lineno, 1, max(1, width)))
            pos = len(lead)

        while pos < n:
            ch = line[pos]
            col = pos + 1
            if ch in " \t":
                pos += 1
                continue
            if line.startswith("//", pos):
                _comment(tokens, line[pos:], lineno, col)
                break
            if ch.isdigit():
                end = pos
                while end < n and line[end].isdigit():
                    end += 1
                if end + 1 < n and line[end] == "." and line[end + 1].isdigit():
                    end += 1
                    while end < n and line[end].isdigit():
                        end += 1
                    text = line[pos:end]
                    value: object = float(text)
                else:
                    text = line[pos:end]
                    value = int(text)
                tokens.append(Token(Tok.NUMBER, text, lineno, col, value))
                pos = end
                continue
            if ch.isalpha() or ch == "_":
                end = pos
                while end < n and (line[end].isalnum() or line[end] == "_"):
                    end += 1
                word = line[pos:end]
                if word in KEYWORDS:
                    tokens.append(Token(KEYWORDS[word], word, lineno, col))
                elif word[0].isupper():
                    tokens.append(Token(Tok.TYPEIDENT, word, lineno, col, word))
                else:
                    tokens.append(Token(Tok.IDENT, word, lineno, col, word))
                pos = end
                continue
            if ch == '"':
                end = pos + 1
                chars = []
                while True:
                    if end >= n:
                        raise LexError("unterminated string literal", Span(file, lineno, col, n - pos))
                    c = line[end]
                    if c == '"':
                        break
                    if c == "\\":
                        if end + 1 >= n or line[end + 1] not in ESCAPES:
                            raise LexError("bad escape in string literal", Span(file, lineno, end + 1, 2))
                        chars.append(ESCAPES[line[end + 1]])
                        end += 2
                        continue
                    chars.append(c)
                    end += 1
                tokens.append(Token(Tok.STRING, line[pos : end + 1], lineno, col, "".join(chars)))
                pos = end + 1
                continue
            for kind in PUNCT:
                if line.startswith(kind.value, pos):
                    tokens.append(Token(kind, kind.value, lineno, col))
                    pos += len(kind.value)
                    if kind in OPENERS:
                        depth += 1
                    elif kind in CLOSERS:
                        depth = max(0, depth - 1)
                    break
            else:
                raise LexError(f"illegal character {ch!r}", Span(file, lineno, col, 1))

        if depth == 0 and tokens and tokens[-1].kind not in (Tok.NEWLINE, Tok.INDENT, Tok.DEDENT, Tok.EXPECT_ERROR):
            tokens.append(Token(Tok.NEWLINE, "", lineno, n + 1))
        elif depth == 0 and tokens and tokens[-1].kind is Tok.EXPECT_ERROR:
            # keep the NEWLINE ahead of trailing metadata
            meta = tokens.pop()
            if tokens and tokens[-1].kind not in (Tok.NEWLINE, Tok.INDENT, Tok.DEDENT, Tok.EXPECT_ERROR):
                tokens.append(Token(Tok.NEWLINE, "", lineno, n + 1))
            tokens.append(meta)

    last = len(lines)
    while len(indents) > 1:
        indents.pop()
        tokens.append(Token(Tok.DEDENT, "", last, 1))
    return tokens


def _comment(tokens: list[Token], text: str, line: int, col: int) -> None:
    body = text[2:].strip()
    if body.startswith("expect-error"):
        tokens.append(Token(Tok.EXPECT_ERROR, text, line, col, body))


def expect_error_lines(tokens) -> set[int]:
    return {t.line for t in tokens if t.kind is Tok.EXPECT_ERROR}
