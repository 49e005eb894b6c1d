"""Source spans, diagnostics, and the exceptions that carry them."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass(frozen=True, order=True)
class Span:
    file: str
    line: int
    column: int
    length: int = 1

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


NO_SPAN = Span("<none>", 1, 1, 1)


@dataclass(frozen=True)
class Diagnostic:
    code: str
    span: Span
    message: str
    expected: str | None = field(default=None, compare=False)
    actual: str | None = field(default=None, compare=False)

    @property
    def line(self) -> int:
        return self.span.line

    def sort_key(self) -> tuple:
        return (self.span.file, self.span.line, self.span.column, self.code, self.message)

    def format(self) -> str:
        return f"{self.span}: {self.code} {self.message}"

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "file": self.span.file,
            "line": self.span.line,
            "column": self.span.column,
            "length": self.span.length,
            "message": self.message,
            "expected": self.expected,
            "actual": self.actual,
        }


def sort_diagnostics(diags) -> list[Diagnostic]:
    return sorted(diags, key=Diagnostic.sort_key)


def format_json(diags) -> str:
    return json.dumps([d.to_dict() for d in diags], indent=2)


class IftError(Exception):
    """An error that aborts processing of one file."""

    code = "E000"

    def __init__(self, message: str, span: Span, code: str | None = None):
        super().__init__(message)
        self.message = message
        self.span = span
        if code is not None:
            self.code = code

    @property
    def diagnostic(self) -> Diagnostic:
        return Diagnostic(self.code, self.span, self.message)

    def __str__(self) -> str:
        return f"{self.span}: {self.code} {self.message}"


class LexError(IftError):
    code = "E001"


class ParseError(IftError):
    code = "E002"
