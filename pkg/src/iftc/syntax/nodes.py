"""AST for If-T pseudocode.

Every node carries a ``span`` that is excluded from equality, so two trees
compare equal when they differ only in source positions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from ..diagnostics import NO_SPAN, Span


def _span():
    return field(default=NO_SPAN, compare=False, repr=False, kw_only=True)


# -- type expressions -------------------------------------------------------

@dataclass(frozen=True)
class TName:
    name: str
    span: Span = _span()


@dataclass(frozen=True)
class TNumLit:
    value: int | float
    span: Span = _span()


@dataclass(frozen=True)
class TTuple:
    elems: tuple
    span: Span = _span()


@dataclass(frozen=True)
class TList:
    elem: "TypeExpr"
    span: Span = _span()


@dataclass(frozen=True)
class TObject:
    value: "TypeExpr | None"
    span: Span = _span()


@dataclass(frozen=True)
class TUnion:
    alts: tuple
    span: Span = _span()


@dataclass(frozen=True)
class TFunc:
    params: tuple  # of (name or None, TypeExpr)
    ret: "ReturnAnnot"
    span: Span = _span()


TypeExpr = Union[TName, TNumLit, TTuple, TList, TObject, TUnion, TFunc]


@dataclass(frozen=True)
class Plain:
    type: TypeExpr
    span: Span = _span()


@dataclass(frozen=True)
class SymPred:
    param: str
    type: TypeExpr
    span: Span = _span()


@dataclass(frozen=True)
class AsymPred:
    param: str
    type: TypeExpr
    span: Span = _span()


ReturnAnnot = Union[Plain, SymPred, AsymPred]


# -- expressions ------------------------------------------------------------

@dataclass(frozen=True)
class VarRef:
    name: str
    span: Span = _span()


@dataclass(frozen=True)
class BuiltinRef:
    """A namespaced prelude function such as ``String.length``."""

    name: str
    span: Span = _span()


@dataclass(frozen=True)
class NumLit:
    value: int | float
    span: Span = _span()


@dataclass(frozen=True)
class StrLit:
    value: str
    span: Span = _span()


@dataclass(frozen=True)
class BoolLit:
    value: bool
    span: Span = _span()


@dataclass(frozen=True)
class NoneLit:
    span: Span = _span()


@dataclass(frozen=True)
class ListLit:
    items: tuple
    span: Span = _span()


@dataclass(frozen=True)
class TupleLit:
    items: tuple
    span: Span = _span()


@dataclass(frozen=True)
class IsTest:
    subject: "Expr"
    target: TypeExpr
    span: Span = _span()


@dataclass(frozen=True)
class HasField:
    subject: "Expr"
    key: str
    span: Span = _span()


@dataclass(frozen=True)
class FieldAccess:
    subject: "Expr"
    name: str
    span: Span = _span()


@dataclass(frozen=True)
class Index:
    subject: "Expr"
    index: "Expr"
    span: Span = _span()


@dataclass(frozen=True)
class LengthOf:
    subject: "Expr"
    span: Span = _span()


@dataclass(frozen=True)
class Call:
    callee: "Expr"
    args: tuple
    span: Span = _span()


@dataclass(frozen=True)
class Unary:
    op: str  # "not" | "-"
    operand: "Expr"
    span: Span = _span()


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    span: Span = _span()


@dataclass(frozen=True)
class IfExpr:
    cond: "Expr"
    then: "Expr"
    orelse: "Expr"
    span: Span = _span()


Expr = Union[
    VarRef, BuiltinRef, NumLit, StrLit, BoolLit, NoneLit, ListLit, TupleLit,
    IsTest, HasField, FieldAccess, Index, LengthOf, Call, Unary, Binary, IfExpr,
]

ARITH_OPS = ("+", "-", "*", "/", "mod")
COMPARE_OPS = ("<", "<=", ">", ">=")
LOGIC_OPS = ("and", "or")


# -- statements -------------------------------------------------------------

@dataclass(frozen=True)
class Let:
    name: str
    annot: TypeExpr | None
    value: Expr
    span: Span = _span()


@dataclass(frozen=True)
class Var:
    name: str
    annot: TypeExpr | None
    value: Expr
    span: Span = _span()


@dataclass(frozen=True)
class Assign:
    name: str
    value: Expr
    span: Span = _span()


@dataclass(frozen=True)
class If:
    cond: Expr
    then: tuple
    orelse: tuple | None
    span: Span = _span()


@dataclass(frozen=True)
class For:
    name: str
    iterable: Expr
    body: tuple
    span: Span = _span()


@dataclass(frozen=True)
class Assert:
    expr: Expr
    span: Span = _span()


@dataclass(frozen=True)
class Return:
    value: Expr
    span: Span = _span()


@dataclass(frozen=True)
class ExprStmt:
    expr: Expr
    span: Span = _span()


Stmt = Union[Let, Var, Assign, If, For, Assert, Return, ExprStmt]


# -- declarations -----------------------------------------------------------

@dataclass(frozen=True)
class Param:
    name: str
    type: TypeExpr
    span: Span = _span()


@dataclass(frozen=True)
class FunDef:
    name: str
    tparams: tuple
    params: tuple
    ret: ReturnAnnot | None
    body: tuple
    span: Span = _span()
    end_line: int = field(default=0, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class RecordDef:
    name: str
    fields: tuple  # of Param
    span: Span = _span()


@dataclass(frozen=True)
class TypeAliasDef:
    name: str
    type: TypeExpr
    span: Span = _span()


Decl = Union[FunDef, RecordDef, TypeAliasDef]


@dataclass(frozen=True)
class Program:
    decls: tuple
    file: str = field(default="<input>", compare=False)

    @property
    def functions(self) -> list[FunDef]:
        return [d for d in self.decls if isinstance(d, FunDef)]

    def function(self, name: str) -> FunDef:
        for d in self.decls:
            if isinstance(d, FunDef) and d.name == name:
                return d
        raise KeyError(name)


def walk_stmts(block):
    """Yield every statement in ``block``, including nested ones."""
    for s in block:
        yield s
        if isinstance(s, If):
            yield from walk_stmts(s.then)
            if s.orelse:
                yield from walk_stmts(s.orelse)
        elif isinstance(s, For):
            yield from walk_stmts(s.body)


def assigned_names(block) -> set[str]:
    return {s.name for s in walk_stmts(block) if isinstance(s, Assign)}
