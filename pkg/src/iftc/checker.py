"""The typing judgment and whole-program checking.

Every expression synthesizes a :class:`SynthResult`: its type, the
propositions that hold when it evaluates to true (``pos``) or false
(``neg``), and the path it reads, if any. Statements thread an
:class:`~iftc.logic.Env` through the function body.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from . import logic as L
from .diagnostics import Diagnostic, IftError, Span, sort_diagnostics
from .logic import FF, TT, Env, Path, ProjectionError, conj, disj
from .prelude import PRELUDE
from .syntax import nodes as N
from .syntax.parser import parse_source
from .syntax.resolve import ResolvedProgram, resolve
from .types import (
    BOOLEAN, BOTTOM, FALSE, NONE, NUMBER, STRING, SYMMETRIC, TOP, TRUE,
    AliasRef, FuncT, ListT, MapT, NumLitT, TupleT, Type, TypeVar, UnionT,
    render, substitute, union, widen,
)


@dataclass(frozen=True)
class SynthResult:
    type: Type
    pos: L.Prop = TT
    neg: L.Prop = TT
    obj: Path | None = None


def result(alg, t: Type, pos=TT, neg=TT, obj=None) -> SynthResult:
    """Build a SynthResult, forcing FF where the type rules out an outcome."""
    if alg.subtype(t, FALSE):
        pos = FF
    if alg.subtype(t, TRUE):
        neg = FF
    return SynthResult(t, pos, neg, obj)


class _Abort(Exception):
    """Stops checking the current statement after a diagnostic."""


TraceHook = Callable[[N.Stmt, Env], None]


@dataclass
class FunctionChecker:
    rp: ResolvedProgram
    name: str
    trace: TraceHook | None = None
    diagnostics: list = field(default_factory=list)

    def __post_init__(self):
        self.info = self.rp.functions[self.name]
        self.fun = self.info.fundef
        self.alg = self.rp.algebra
        self.tparams = tuple(self.info.tparams)
        self.latent = self.info.type.latent

    # -- helpers --------------------------------------------------------

    def error(self, code: str, span: Span, msg: str, expected=None, actual=None) -> None:
        self.diagnostics.append(Diagnostic(
            code, span, msg,
            None if expected is None else render(expected),
            None if actual is None else render(actual),
        ))

    def expect_sub(self, actual: Type, expected: Type, span: Span, what: str) -> bool:
        if self.alg.subtype(actual, expected):
            return True
        self.error("E100", span, f"{what}: expected {render(expected)}, got {render(actual)}",
                   expected, actual)
        return False

    def to_type(self, texpr) -> Type:
        return self.rp.to_type(texpr, self.tparams)

    # -- functions ------------------------------------------------------

    def check(self) -> list[Diagnostic]:
        env = Env()
        for pname, ptype in zip((p.name for p in self.fun.params), self.info.type.params):
            env = env.bind(pname, ptype, mutable=True)
        if self.latent is not None:
            subject = self.fun.params[self.latent.index].name
            if subject in N.assigned_names(self.fun.body):
                self.error("E202", self.fun.span,
                           f"predicate subject '{subject}' is reassigned in the body")
        env = self.check_block(env, self.fun.body)
        if env.live and self.fun.ret is not None:
            last = self.fun.body[-1].span if self.fun.body else self.fun.span
            self.error("E111", last, f"missing return in '{self.fun.name}'")
        return self.diagnostics

    # -- statements -----------------------------------------------------

    def check_block(self, env: Env, stmts) -> Env:
        before = set(env.bindings)
        for s in stmts:
            if not env.live:
                break
            if self.trace is not None:
                self.trace(s, env)
            try:
                env = self.check_stmt(env, s)
            except _Abort:
                if isinstance(s, N.Return):
                    env = env.kill()
                elif isinstance(s, (N.Let, N.Var)) and s.name not in env.bindings:
                    declared = self.to_type(s.annot) if s.annot is not None else TOP
                    env = env.bind(s.name, declared, isinstance(s, N.Var))
        return env.unbind(set(env.bindings) - before)

    def check_stmt(self, env: Env, s) -> Env:
        alg = self.alg
        match s:
            case N.Let(name, annot, value) | N.Var(name, annot, value):
                r = self.synth(env, value)
                mutable = isinstance(s, N.Var)
                if annot is not None:
                    declared = self.to_type(annot)
                    self.expect_sub(r.type, declared, value.span, f"initializer of '{name}'")
                elif mutable:
                    declared = alg.normalize(widen(r.type))
                else:
                    declared = r.type
                env = env.bind(name, declared, mutable)
                if annot is not None and alg.subtype(r.type, declared) and r.type != declared:
                    env = env.refine(Path(name), r.type)
                return self._alias(env, name, r)
            case N.Assign(name, value):
                r = self.synth(env, value)
                b = env.bindings.get(name)
                if b is None:
                    return env
                self.expect_sub(r.type, b.type, value.span, f"assignment to '{name}'")
                env = env.forget(name)
                if alg.subtype(r.type, b.type) and r.type != b.type:
                    env = env.refine(Path(name), r.type)
                return self._alias(env, name, r)
            case N.If(cond, then, orelse):
                c = self.condition(env, cond)
                then_env = self.check_block(L.update(env, c.pos, alg), then)
                else_env = L.update(env, c.neg, alg)
                if orelse is not None:
                    else_env = self.check_block(else_env, orelse)
                return L.join(then_env, else_env, alg)
            case N.Assert(e):
                c = self.condition(env, e)
                return L.update(env, c.pos, alg)
            case N.For(name, iterable, body):
                r = self.synth(env, iterable)
                elem = self.element_type(r.type, iterable.span)
                for assigned in sorted(N.assigned_names(body)):
                    if assigned in env.bindings:
                        env = env.forget(assigned)
                self.check_block(env.bind(name, elem, False), body)
                return env
            case N.Return(value):
                self.check_return(env, s, value)
                return env.kill()
            case N.ExprStmt(e):
                self.synth(env, e)
                return env
        raise TypeError(f"not a statement: {s!r}")

    def _alias(self, env: Env, name: str, r: SynthResult) -> Env:
        if not self.alg.subtype(r.type, BOOLEAN):
            return env
        if r.pos == TT and r.neg == TT:
            return env
        mentioned = L.prop_paths(r.pos) | L.prop_paths(r.neg)
        if any(p.root == name for p in mentioned):
            return env
        return L.bind_alias(env, name, r.pos, r.neg)

    def element_type(self, t: Type, span: Span) -> Type:
        atoms = self.alg.atoms(t)
        if atoms and all(isinstance(m, ListT) for m in atoms):
            return self.alg.normalize(union(*(m.elem for m in atoms)))
        self.error("E100", span, f"cannot iterate over {render(t)}", ListT(TOP), t)
        raise _Abort

    def check_return(self, env: Env, s: N.Return, value) -> None:
        r = self.synth(env, value)
        if self.latent is None:
            self.expect_sub(r.type, self.info.type.ret, value.span, "return value")
            return
        if not self.alg.subtype(r.type, BOOLEAN):
            self.error("E110", value.span,
                       f"predicate must return Boolean, got {render(r.type)}", BOOLEAN, r.type)
            return
        self.verify_predicate_return(env, s, r)

    def verify_predicate_return(self, env: Env, site: N.Return, r: SynthResult) -> None:
        lat = self.latent
        subject = Path(self.fun.params[lat.index].name)
        alg = self.alg
        if not L.proves(L.update(env, r.pos, alg), L.Is(subject, lat.target), alg):
            self.error("E200", site.span,
                       f"predicate may return true when {subject} is not {render(lat.target)}")
        if lat.kind == SYMMETRIC and not L.proves(
                L.update(env, r.neg, alg), L.IsNot(subject, lat.target), alg):
            self.error("E201", site.span,
                       f"predicate may return false when {subject} is {render(lat.target)}")

    def condition(self, env: Env, e) -> SynthResult:
        r = self.synth(env, e)
        if not self.alg.subtype(r.type, BOOLEAN):
            if isinstance(e, N.NumLit):
                self.error("E103", e.span, "a number is not a valid condition", BOOLEAN, r.type)
            else:
                self.error("E106", e.span, f"condition must be Boolean, got {render(r.type)}",
                           BOOLEAN, r.type)
        return r

    # -- expressions ----------------------------------------------------

    def synth(self, env: Env, e) -> SynthResult:
        alg = self.alg
        match e:
            case N.VarRef(name):
                return self.synth_var(env, name, e.span)
            case N.BuiltinRef(name):
                return SynthResult(PRELUDE[name][1]) if name in PRELUDE else SynthResult(TOP)
            case N.NumLit(value):
                return SynthResult(NumLitT(value))
            case N.StrLit():
                return SynthResult(STRING)
            case N.BoolLit(value):
                return result(alg, TRUE if value else FALSE)
            case N.NoneLit():
                return SynthResult(NONE)
            case N.ListLit(items):
                ts = [self.synth(env, i).type for i in items]
                return SynthResult(ListT(alg.normalize(widen(union(*ts)))))
            case N.TupleLit(items):
                return SynthResult(TupleT(tuple(self.synth(env, i).type for i in items)))
            case N.IsTest(subject, target):
                return self.synth_is(env, subject, target, e.span)
            case N.HasField(subject, key):
                s = self.synth(env, subject)
                if not any(isinstance(m, MapT) for m in alg.atoms(s.type)):
                    self.error("E100", subject.span,
                               f"has_field needs an Object, got {render(s.type)}", MapT(TOP), s.type)
                if s.obj is None:
                    return SynthResult(BOOLEAN)
                return result(alg, BOOLEAN, L.HasFieldP(s.obj, key), TT)
            case N.FieldAccess(subject, name):
                s = self.synth(env, subject)
                return self.project(env, s, L.Field(name), e.span, subject.span)
            case N.Index(subject, index):
                return self.synth_index(env, subject, index, e.span)
            case N.LengthOf(subject):
                s = self.synth(env, subject)
                return self.project(env, s, L.LENGTH, e.span, subject.span)
            case N.Call(callee, args):
                return self.check_call(env, callee, args, e.span)
            case N.Unary("not", operand):
                r = self.synth(env, operand)
                if not alg.subtype(r.type, BOOLEAN):
                    self.error("E106", operand.span, f"'not' needs a Boolean, got {render(r.type)}",
                               BOOLEAN, r.type)
                    return SynthResult(BOOLEAN)
                t = {TRUE: FALSE, FALSE: TRUE}.get(r.type, BOOLEAN)
                return result(alg, t, r.neg, r.pos)
            case N.Unary("-", operand):
                r = self.synth(env, operand)
                self.expect_sub(r.type, NUMBER, operand.span, "operand of '-'")
                return SynthResult(NUMBER)
            case N.Binary("and", left, right):
                return self.synth_if(env, left, right, N.BoolLit(False, span=e.span))
            case N.Binary("or", left, right):
                return self.synth_if(env, left, N.BoolLit(True, span=e.span), right)
            case N.Binary("==", left, right):
                self.synth(env, left)
                self.synth(env, right)
                return SynthResult(BOOLEAN)
            case N.Binary(op, left, right):
                lt = self.synth(env, left).type
                rt = self.synth(env, right).type
                self.expect_sub(lt, NUMBER, left.span, f"left operand of '{op}'")
                self.expect_sub(rt, NUMBER, right.span, f"right operand of '{op}'")
                return SynthResult(BOOLEAN if op in N.COMPARE_OPS else NUMBER)
            case N.IfExpr(cond, then, orelse):
                return self.synth_if(env, cond, then, orelse)
        raise TypeError(f"not an expression: {e!r}")

    def synth_var(self, env: Env, name: str, span: Span) -> SynthResult:
        alg = self.alg
        if name in env.bindings:
            t = L.lookup(env, Path(name), alg)
            if name in env.aliases:
                pos, neg = env.aliases[name]
                return result(alg, t, pos, neg, Path(name))
            return result(alg, t, TT, TT, Path(name))
        if name in self.rp.functions:
            return SynthResult(self.rp.functions[name].type)
        if name in self.rp.records:
            return SynthResult(self.rp.record_type(name))
        if name in PRELUDE:
            return SynthResult(PRELUDE[name][1])
        raise _Abort  # unbound; already reported by resolve

    def synth_is(self, env: Env, subject, target, span: Span) -> SynthResult:
        alg = self.alg
        s = self.synth(env, subject)
        t = alg.normalize(self.to_type(target))
        if not self.testable(t):
            self.error("E104", target.span, f"type {render(t)} cannot be tested at runtime")
            return SynthResult(BOOLEAN)
        if alg.subtype(s.type, t):
            rt = TRUE
        elif alg.is_empty(alg.intersect(s.type, t)):
            rt = FALSE
        else:
            rt = BOOLEAN
        if s.obj is None:
            return result(alg, rt)
        return result(alg, rt, L.Is(s.obj, t), L.IsNot(s.obj, t))

    def testable(self, t: Type, seen=frozenset()) -> bool:
        match t:
            case FuncT() | TypeVar():
                return False
            case AliasRef(name):
                return name in seen or self.testable(self.alg.aliases[name], seen | {name})
            case TupleT(elems):
                return all(self.testable(x, seen) for x in elems)
            case ListT(x) | MapT(x):
                return self.testable(x, seen)
            case UnionT(ms):
                return all(self.testable(m, seen) for m in ms)
        return True

    def synth_if(self, env: Env, cond, then, orelse) -> SynthResult:
        alg = self.alg
        c = self.condition(env, cond)
        env_t = L.update(env, c.pos, alg)
        env_f = L.update(env, c.neg, alg)
        dead = SynthResult(BOTTOM, FF, FF)
        t = self.synth(env_t, then) if env_t.live else dead
        f = self.synth(env_f, orelse) if env_f.live else dead
        pos = disj(conj(c.pos, t.pos), conj(c.neg, f.pos))
        neg = disj(conj(c.pos, t.neg), conj(c.neg, f.neg))
        return result(alg, alg.normalize(union(t.type, f.type)), pos, neg)

    def project(self, env: Env, s: SynthResult, elem, span: Span, subject_span: Span) -> SynthResult:
        alg = self.alg
        try:
            t = L.project(alg, s.type, elem, strict=True, span=subject_span)
        except ProjectionError as err:
            self.error("E101", err.span, err.message, actual=s.type)
            raise _Abort from None
        if isinstance(elem, L.Field) and any(isinstance(m, MapT) for m in alg.atoms(s.type)):
            self.require_field(env, s, elem.name, span)
        if s.obj is None:
            return SynthResult(t)
        path = s.obj.extend(elem)
        return result(alg, L.lookup(env, path, alg), TT, TT, path)

    def require_field(self, env: Env, s: SynthResult, key: str, span: Span) -> None:
        if s.obj is not None and L.proves(env, L.HasFieldP(s.obj, key), self.alg):
            return
        self.error("E105", span, f"field '{key}' may be missing")

    def synth_index(self, env: Env, subject, index, span: Span) -> SynthResult:
        alg = self.alg
        s = self.synth(env, subject)
        atoms = alg.atoms(s.type)
        if any(isinstance(m, MapT) for m in atoms):
            if not isinstance(index, N.StrLit):
                self.synth(env, index)
                self.error("E105", index.span, "Object fields must be indexed by a string literal")
                raise _Abort
            return self.project(env, s, L.Field(index.value), span, subject.span)
        is_literal = isinstance(index, N.NumLit) and isinstance(index.value, int) and index.value >= 0
        if is_literal:
            return self.project(env, s, L.Idx(index.value), span, subject.span)
        it = self.synth(env, index).type
        if any(isinstance(m, TupleT) for m in atoms) or not atoms:
            self.error("E101", index.span, "tuple index must be a non-negative integer literal",
                       actual=s.type)
            raise _Abort
        self.expect_sub(it, NUMBER, index.span, "list index")
        return SynthResult(self.element_type(s.type, subject.span))

    # -- calls ------------------------------------------------------------

    def callee_signature(self, env: Env, callee) -> tuple[tuple, FuncT, bool]:
        """Return (type parameters, function type, is_function)."""
        match callee:
            case N.VarRef(name) if name not in env.bindings:
                if name in self.rp.functions:
                    info = self.rp.functions[name]
                    return tuple(info.tparams), info.type, True
                if name in self.rp.records:
                    return (), self.rp.record_type(name), True
                if name in PRELUDE:
                    tparams, sig = PRELUDE[name]
                    return tparams, sig, True
            case N.BuiltinRef(name) if name in PRELUDE:
                tparams, sig = PRELUDE[name]
                return tparams, sig, True
        t = self.synth(env, callee).type
        atoms = self.alg.atoms(t)
        if len(atoms) == 1 and isinstance(atoms[0], FuncT):
            return (), atoms[0], True
        return (), t, False

    def check_call(self, env: Env, callee, args, span: Span) -> SynthResult:
        alg = self.alg
        tparams, ftype, ok = self.callee_signature(env, callee)
        arg_results = [self.synth(env, a) for a in args]
        if not ok:
            self.error("E109", callee.span, f"cannot call a value of type {render(ftype)}", actual=ftype)
            raise _Abort
        if len(args) != len(ftype.params):
            self.error("E107", span, f"expected {len(ftype.params)} arguments, got {len(args)}")
            return SynthResult(substitute(ftype.ret, {v: TOP for v in tparams}))
        subst = {}
        if tparams:
            cands: dict[str, list] = {v: [] for v in tparams}
            for p, a in zip(ftype.params, arg_results):
                self.collect(p, a.type, cands)
            for v in tparams:
                if not cands[v]:
                    self.error("E108", span, f"cannot infer type parameter '{v}'")
                    subst[v] = TOP
                else:
                    subst[v] = alg.normalize(widen(union(*cands[v])))
        for i, (p, a, node) in enumerate(zip(ftype.params, arg_results, args)):
            self.expect_sub(a.type, substitute(p, subst), node.span, f"argument {i + 1}")
        ret = substitute(ftype.ret, subst)
        lat = ftype.latent
        if lat is None:
            return SynthResult(ret)
        obj = arg_results[lat.index].obj
        if obj is None:
            return result(alg, ret)
        target = alg.normalize(substitute(lat.target, subst))
        neg = L.IsNot(obj, target) if lat.kind == SYMMETRIC else TT
        return result(alg, ret, L.Is(obj, target), neg)

    def collect(self, p: Type, a: Type, cands: dict) -> None:
        """First-order matching of a parameter type against an argument type."""
        alg = self.alg
        match p:
            case TypeVar(name) if name in cands:
                cands[name].append(a)
                return
        atoms = alg.atoms(a)
        match p:
            case ListT(pe):
                elems = [m.elem for m in atoms if isinstance(m, ListT)]
                if elems:
                    self.collect(pe, union(*elems), cands)
            case MapT(pv):
                vals = [m.value for m in atoms if isinstance(m, MapT)]
                if vals:
                    self.collect(pv, union(*vals), cands)
            case TupleT(pes):
                for m in atoms:
                    if isinstance(m, TupleT) and len(m.elems) == len(pes):
                        for pe, ae in zip(pes, m.elems):
                            self.collect(pe, ae, cands)
            case FuncT(pps, pr, plat):
                for m in atoms:
                    if isinstance(m, FuncT) and len(m.params) == len(pps):
                        for pp, ap in zip(pps, m.params):
                            self.collect(pp, ap, cands)
                        self.collect(pr, m.ret, cands)
                        if plat is not None and m.latent is not None:
                            self.collect(plat.target, m.latent.target, cands)
            case UnionT(ms):
                vars_ = [m for m in ms if isinstance(m, TypeVar) and m.name in cands]
                if len(vars_) == 1:
                    rest = union(*(m for m in ms if m not in vars_))
                    left = [m for m in atoms if not alg.subtype(m, rest)]
                    if left:
                        cands[vars_[0].name].append(union(*left))


# -- programs ---------------------------------------------------------------

def check_resolved(rp: ResolvedProgram, trace: TraceHook | None = None) -> list[Diagnostic]:
    diags = list(rp.diagnostics)
    for name in rp.functions:
        diags.extend(FunctionChecker(rp, name, trace).check())
    return sort_diagnostics(set(diags))


def check_program(program: N.Program, trace: TraceHook | None = None) -> list[Diagnostic]:
    """Resolve and check every function; diagnostics sorted by position."""
    return check_resolved(resolve(program), trace)


def check_source(source: str, file: str = "<input>", trace: TraceHook | None = None) -> list[Diagnostic]:
    try:
        program = parse_source(source, file)
    except IftError as err:
        return [err.diagnostic]
    return check_program(program, trace)


def check_file(path, trace: TraceHook | None = None) -> list[Diagnostic]:
    from pathlib import Path as FsPath

    p = FsPath(path)
    return check_source(p.read_text(encoding="utf-8"), str(path), trace)


__all__ = [
    "SynthResult", "FunctionChecker", "check_program", "check_resolved", "check_source",
    "check_file",
]
