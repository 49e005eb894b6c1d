"""Name resolution and declaration tables.

``resolve`` checks that every identifier and type name is bound, that
assignments target mutable bindings, and that recursive aliases are guarded
by a constructor. It also converts annotation syntax to semantic types.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..diagnostics import Diagnostic, Span
from ..prelude import PRELUDE
from ..typealg import Algebra
from ..types import (
    ASYMMETRIC, BOOLEAN, BOTTOM, NONE, NUMBER, STRING, SYMMETRIC, TOP,
    AliasRef, FuncT, LatentPred, ListT, MapT, NumLitT, RecordT, TupleT, Type,
    TypeVar, union,
)
from . import nodes as N

BUILTIN_TYPES = {"Top": TOP, "Number": NUMBER, "String": STRING, "Boolean": BOOLEAN, "None": NONE}


@dataclass
class FunInfo:
    fundef: N.FunDef
    tparams: tuple
    type: FuncT
    ret_annot: object = None  # the ReturnAnnot node, or None

    @property
    def param_types(self) -> tuple:
        return self.type.params

    @property
    def return_type(self) -> Type:
        return self.type.ret


@dataclass
class ResolvedProgram:
    program: N.Program
    records: dict = field(default_factory=dict)  # name -> ((field, Type), ...)
    aliases: dict = field(default_factory=dict)  # name -> Type
    functions: dict = field(default_factory=dict)  # name -> FunInfo
    diagnostics: list = field(default_factory=list)
    algebra: Algebra = None

    @property
    def file(self) -> str:
        return self.program.file

    def to_type(self, texpr, tparams=()) -> Type:
        """Convert annotation syntax; unknown names become Top (already diagnosed)."""
        return _TypeBuilder(self, tparams, None).build(texpr)

    def record_type(self, name: str) -> FuncT:
        fields = self.records[name]
        return FuncT(tuple(t for _, t in fields), RecordT(name), names=tuple(n for n, _ in fields))


class _TypeBuilder:
    def __init__(self, rp: ResolvedProgram, tparams, diags: list | None):
        self.rp = rp
        self.tparams = set(tparams)
        self.diags = diags

    def error(self, code: str, msg: str, span: Span) -> None:
        if self.diags is not None:
            self.diags.append(Diagnostic(code, span, msg))

    def build(self, t) -> Type:
        match t:
            case N.TName(name):
                if name in self.tparams:
                    return TypeVar(name)
                if name in BUILTIN_TYPES:
                    return BUILTIN_TYPES[name]
                if name in self.rp.records:
                    return RecordT(name)
                if name in self.rp.aliases:
                    return AliasRef(name)
                self.error("E004", f"unbound type name '{name}'", t.span)
                return TOP
            case N.TNumLit(value):
                return NumLitT(value)
            case N.TTuple(elems):
                return TupleT(tuple(self.build(e) for e in elems))
            case N.TList(elem):
                return ListT(self.build(elem))
            case N.TObject(value):
                return MapT(TOP if value is None else self.build(value))
            case N.TUnion(alts):
                return union(*(self.build(a) for a in alts))
            case N.TFunc(params, ret):
                names = tuple(n for n, _ in params)
                ptypes = tuple(self.build(p) for _, p in params)
                rtype, latent = self.annot(ret, names)
                return FuncT(ptypes, rtype, latent, names)
        raise TypeError(f"not a type expression: {t!r}")

    def annot(self, ret, names) -> tuple[Type, LatentPred | None]:
        if ret is None:
            return TOP, None
        if isinstance(ret, N.Plain):
            return self.build(ret.type), None
        kind = SYMMETRIC if isinstance(ret, N.SymPred) else ASYMMETRIC
        target = self.build(ret.type)
        if ret.param not in names:
            self.error("E007", f"predicate subject '{ret.param}' is not a parameter", ret.span)
            return BOOLEAN, None
        return BOOLEAN, LatentPred(kind, names.index(ret.param), target)


def resolve(program: N.Program) -> ResolvedProgram:
    """Bind names and build declaration tables; diagnostics land in ``.diagnostics``."""
    rp = ResolvedProgram(program)
    diags = rp.diagnostics

    type_names: dict[str, Span] = {}
    for d in program.decls:
        if isinstance(d, (N.RecordDef, N.TypeAliasDef)):
            if d.name in type_names or d.name in BUILTIN_TYPES or d.name in ("Tuple", "List", "Object"):
                diags.append(Diagnostic("E006", d.span, f"duplicate type declaration '{d.name}'"))
                continue
            type_names[d.name] = d.span
            if isinstance(d, N.RecordDef):
                rp.records[d.name] = ()
            else:
                rp.aliases[d.name] = TOP

    builder = _TypeBuilder(rp, (), diags)
    for d in program.decls:
        if isinstance(d, N.RecordDef) and rp.records.get(d.name) == ():
            seen = set()
            fields = []
            for f in d.fields:
                if f.name in seen:
                    diags.append(Diagnostic("E006", f.span, f"duplicate field '{f.name}'"))
                    continue
                seen.add(f.name)
                fields.append((f.name, builder.build(f.type)))
            rp.records[d.name] = tuple(fields)
        elif isinstance(d, N.TypeAliasDef) and d.name in rp.aliases:
            rp.aliases[d.name] = builder.build(d.type)

    _check_alias_guarded(program, rp, diags)
    rp.algebra = Algebra(rp.records, rp.aliases)

    for d in program.decls:
        if not isinstance(d, N.FunDef):
            continue
        if d.name in rp.functions or d.name in PRELUDE:
            diags.append(Diagnostic("E006", d.span, f"duplicate function '{d.name}'"))
            continue
        if len(set(d.tparams)) != len(d.tparams):
            diags.append(Diagnostic("E006", d.span, f"duplicate type parameter in '{d.name}'"))
        fb = _TypeBuilder(rp, d.tparams, diags)
        names = []
        for p in d.params:
            if p.name in names:
                diags.append(Diagnostic("E006", p.span, f"duplicate parameter '{p.name}'"))
            names.append(p.name)
        ptypes = tuple(fb.build(p.type) for p in d.params)
        rtype, latent = fb.annot(d.ret, tuple(names))
        rp.functions[d.name] = FunInfo(d, d.tparams, FuncT(ptypes, rtype, latent, tuple(names)), d.ret)

    for info in rp.functions.values():
        _Scopes(rp, info, diags).check_function()
    return rp


def _check_alias_guarded(program: N.Program, rp: ResolvedProgram, diags: list) -> None:
    # edges A -> B when alias B occurs in A outside any type constructor
    edges: dict[str, set[str]] = {}

    def unguarded(t) -> set[str]:
        if isinstance(t, N.TName) and t.name in rp.aliases:
            return {t.name}
        if isinstance(t, N.TUnion):
            return set().union(*(unguarded(a) for a in t.alts))
        return set()

    spans = {}
    for d in program.decls:
        if isinstance(d, N.TypeAliasDef) and d.name in rp.aliases:
            edges[d.name] = unguarded(d.type)
            spans[d.name] = d.span

    bad = set()
    for start in edges:
        stack, seen = list(edges[start]), set()
        while stack:
            cur = stack.pop()
            if cur == start:
                bad.add(start)
                break
            if cur in seen:
                continue
            seen.add(cur)
            stack.extend(edges.get(cur, ()))
    for name in sorted(bad):
        diags.append(Diagnostic("E112", spans[name], f"type alias '{name}' refers to itself without a type constructor"))
        rp.aliases[name] = BOTTOM


class _Scopes:
    """Walks one function body checking bindings, mutability, and annotations."""

    def __init__(self, rp: ResolvedProgram, info: FunInfo, diags: list):
        self.rp = rp
        self.fun = info.fundef
        self.diags = diags
        self.types = _TypeBuilder(rp, info.tparams, diags)
        # name -> mutable?
        self.scopes: list[dict[str, bool]] = [{p.name: True for p in self.fun.params}]

    def lookup(self, name: str) -> bool | None:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return None

    def bind(self, name: str, mutable: bool, span: Span) -> None:
        if self.lookup(name) is not None:
            self.diags.append(Diagnostic("E006", span, f"'{name}' is already bound in this function"))
        self.scopes[-1][name] = mutable

    def check_function(self) -> None:
        self.block(self.fun.body)

    def block(self, stmts) -> None:
        self.scopes.append({})
        for s in stmts:
            self.stmt(s)
        self.scopes.pop()

    def stmt(self, s) -> None:
        match s:
            case N.Let(name, annot, value) | N.Var(name, annot, value):
                if annot is not None:
                    self.types.build(annot)
                self.expr(value)
                self.bind(name, isinstance(s, N.Var), s.span)
            case N.Assign(name, value):
                self.expr(value)
                mutable = self.lookup(name)
                if mutable is None:
                    if name in self.rp.functions or name in self.rp.records:
                        self.diags.append(Diagnostic("E005", s.span, f"cannot assign to declaration '{name}'"))
                    else:
                        self.diags.append(Diagnostic("E003", s.span, f"unbound identifier '{name}'"))
                elif not mutable:
                    self.diags.append(Diagnostic("E005", s.span, f"cannot assign to immutable binding '{name}'"))
            case N.If(cond, then, orelse):
                self.expr(cond)
                self.block(then)
                if orelse is not None:
                    self.block(orelse)
            case N.For(name, iterable, body):
                self.expr(iterable)
                self.scopes.append({})
                self.bind(name, False, s.span)
                self.block(body)
                self.scopes.pop()
            case N.Assert(e) | N.Return(e) | N.ExprStmt(e):
                self.expr(e)

    def expr(self, e) -> None:
        match e:
            case N.VarRef(name):
                if self.lookup(name) is None and name not in self.rp.functions \
                        and name not in self.rp.records and name not in PRELUDE:
                    self.diags.append(Diagnostic("E003", e.span, f"unbound identifier '{name}'"))
            case N.BuiltinRef(name):
                if name not in PRELUDE:
                    self.diags.append(Diagnostic("E003", e.span, f"unknown builtin '{name}'"))
            case N.IsTest(subject, target):
                self.expr(subject)
                self.types.build(target)
            case N.HasField(subject) | N.FieldAccess(subject) | N.LengthOf(subject) | N.Unary(_, subject):
                self.expr(subject)
            case N.Index(subject, index):
                self.expr(subject)
                self.expr(index)
            case N.Call(callee, args):
                self.expr(callee)
                for a in args:
                    self.expr(a)
            case N.Binary(_, left, right):
                self.expr(left)
                self.expr(right)
            case N.IfExpr(c, t, f):
                self.expr(c)
                self.expr(t)
                self.expr(f)
            case N.ListLit(items) | N.TupleLit(items):
                for i in items:
                    self.expr(i)
