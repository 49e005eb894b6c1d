"""Big-step evaluator used as a differential oracle for the checker.

Values are plain Python data: numbers (int/float, never bool), str, bool,
None, tuple, list, dict (string-keyed objects), plus :class:`RecordV` and
:class:`FuncV`.
"""

from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass

from .diagnostics import NO_SPAN, Span
from .prelude import PRELUDE
from .syntax import nodes as N
from .syntax.resolve import ResolvedProgram, resolve
from .typealg import Algebra
from .types import (
    BOOLEAN, BOTTOM, FALSE, NONE, NUMBER, STRING, SYMMETRIC, TOP, TRUE,
    AliasRef, FuncT, ListT, MapT, NumLitT, RecordT, TupleT, Type, TypeVar, UnionT,
    members, substitute, union,
)

TYPE_CONFUSION = "type-confusion"
MISSING_FIELD = "missing-field"
ASSERTION_FAILURE = "assertion-failure"
ARITY = "arity"
INDEX_OUT_OF_RANGE = "index-out-of-range"
ARITHMETIC = "arithmetic"
DEPTH = "depth"

MEMBERSHIP_BUDGET = 16
MAX_CALL_DEPTH = 200


@dataclass(frozen=True)
class RecordV:
    name: str
    fields: tuple  # ((field, value), ...)

    def get(self, name: str):
        for k, v in self.fields:
            if k == name:
                return v
        raise KeyError(name)


@dataclass(frozen=True)
class FuncV:
    name: str


class EvalError(Exception):
    def __init__(self, kind: str, span: Span = NO_SPAN, message: str = ""):
        super().__init__(f"{span}: {kind}: {message}" if message else f"{span}: {kind}")
        self.kind = kind
        self.span = span
        self.message = message


class _Return(Exception):
    def __init__(self, value):
        self.value = value


def is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


# -- membership -------------------------------------------------------------

def membership(v, t: Type, alg: Algebra | None = None, budget: int = MEMBERSHIP_BUDGET) -> bool:
    """Runtime ``v is t``. Unions try each member; aliases unfold within a budget."""
    alg = alg or Algebra()
    if t == TOP:
        return True
    if t == BOTTOM:
        return False
    if t == NUMBER:
        return is_number(v)
    if t == STRING:
        return isinstance(v, str)
    if t == BOOLEAN:
        return isinstance(v, bool)
    if t == TRUE:
        return v is True
    if t == FALSE:
        return v is False
    if t == NONE:
        return v is None
    match t:
        case NumLitT(n):
            return is_number(v) and v == n
        case TupleT(elems):
            return isinstance(v, tuple) and len(v) == len(elems) and all(
                membership(x, et, alg, budget) for x, et in zip(v, elems))
        case ListT(elem):
            return isinstance(v, list) and all(membership(x, elem, alg, budget) for x in v)
        case MapT(value):
            return isinstance(v, dict) and all(membership(x, value, alg, budget) for x in v.values())
        case RecordT(name):
            return isinstance(v, RecordV) and v.name == name
        case UnionT():
            return any(membership(v, m, alg, budget) for m in members(t))
        case AliasRef(name):
            if budget <= 0:
                return False
            return membership(v, alg.aliases[name], alg, budget - 1)
        case FuncT() | TypeVar():
            # not testable; only used when validating sampled arguments
            return isinstance(v, FuncV) if isinstance(t, FuncT) else True
    raise TypeError(f"not a type: {t!r}")


def values_equal(a, b) -> bool:
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool) and a == b
    if is_number(a) and is_number(b):
        return a == b
    if type(a) is not type(b):
        return False
    if isinstance(a, (tuple, list)):
        return len(a) == len(b) and all(values_equal(x, y) for x, y in zip(a, b))
    if isinstance(a, dict):
        return a.keys() == b.keys() and all(values_equal(a[k], b[k]) for k in a)
    if isinstance(a, RecordV):
        return a.name == b.name and all(values_equal(x[1], y[1]) for x, y in zip(a.fields, b.fields))
    return a == b


def truncating_mod(a, b):
    if isinstance(a, int) and isinstance(b, int):
        r = abs(a) % abs(b)
        return -r if a < 0 else r
    return math.fmod(a, b)


# -- evaluation -------------------------------------------------------------

class Interpreter:
    def __init__(self, rp: ResolvedProgram):
        self.rp = rp
        self.alg = rp.algebra
        self.depth = 0

    def call(self, name: str, args: list, span: Span = NO_SPAN):
        if name in PRELUDE:
            return self.builtin(name, args, span)
        if name in self.rp.records:
            fields = self.rp.records[name]
            if len(args) != len(fields):
                raise EvalError(ARITY, span, f"{name} takes {len(fields)} arguments")
            return RecordV(name, tuple((f, v) for (f, _), v in zip(fields, args)))
        info = self.rp.functions[name]
        fun = info.fundef
        if len(args) != len(fun.params):
            raise EvalError(ARITY, span, f"{name} takes {len(fun.params)} arguments")
        if self.depth >= MAX_CALL_DEPTH:
            raise EvalError(DEPTH, span, "call depth exceeded")
        frame = {p.name: v for p, v in zip(fun.params, args)}
        self.depth += 1
        try:
            self.exec_block(frame, fun.body, info.tparams)
        except _Return as r:
            return r.value
        finally:
            self.depth -= 1
        return None

    def builtin(self, name: str, args: list, span: Span):
        arity = len(PRELUDE[name][1].params)
        if len(args) != arity:
            raise EvalError(ARITY, span, f"{name} takes {arity} arguments")
        if name == "String.length":
            self.need(isinstance(args[0], str), span, "String.length needs a string")
            return len(args[0])
        if name == "String.append":
            self.need(all(isinstance(a, str) for a in args), span, "String.append needs strings")
            return args[0] + args[1]
        if name == "sum":
            self.need(isinstance(args[0], list) and all(is_number(x) for x in args[0]),
                      span, "sum needs a list of numbers")
            return sum(args[0])
        if name == "cons":
            self.need(isinstance(args[1], list), span, "cons needs a list")
            return [args[0]] + args[1]
        if name == "append":
            self.need(all(isinstance(a, list) for a in args), span, "append needs lists")
            return args[0] + args[1]
        raise EvalError(TYPE_CONFUSION, span, f"unknown builtin {name}")

    @staticmethod
    def need(ok: bool, span: Span, message: str) -> None:
        if not ok:
            raise EvalError(TYPE_CONFUSION, span, message)

    # statements

    def exec_block(self, frame: dict, stmts, tparams) -> None:
        for s in stmts:
            self.exec_stmt(frame, s, tparams)

    def exec_stmt(self, frame: dict, s, tparams) -> None:
        match s:
            case N.Let(name, _, value) | N.Var(name, _, value) | N.Assign(name, value):
                frame[name] = self.eval(frame, value, tparams)
            case N.If(cond, then, orelse):
                if self.truth(self.eval(frame, cond, tparams), cond.span):
                    self.exec_block(frame, then, tparams)
                elif orelse is not None:
                    self.exec_block(frame, orelse, tparams)
            case N.For(name, iterable, body):
                seq = self.eval(frame, iterable, tparams)
                self.need(isinstance(seq, list), iterable.span, "for needs a list")
                for item in seq:
                    frame[name] = item
                    self.exec_block(frame, body, tparams)
            case N.Assert(e):
                if not self.truth(self.eval(frame, e, tparams), e.span):
                    raise EvalError(ASSERTION_FAILURE, s.span)
            case N.Return(value):
                raise _Return(self.eval(frame, value, tparams))
            case N.ExprStmt(e):
                self.eval(frame, e, tparams)

    def truth(self, v, span: Span) -> bool:
        self.need(isinstance(v, bool), span, "condition is not a boolean")
        return v

    # expressions

    def eval(self, frame: dict, e, tparams=()):
        match e:
            case N.VarRef(name):
                if name in frame:
                    return frame[name]
                return FuncV(name)
            case N.BuiltinRef(name):
                return FuncV(name)
            case N.NumLit(value) | N.StrLit(value) | N.BoolLit(value):
                return value
            case N.NoneLit():
                return None
            case N.ListLit(items):
                return [self.eval(frame, i, tparams) for i in items]
            case N.TupleLit(items):
                return tuple(self.eval(frame, i, tparams) for i in items)
            case N.IsTest(subject, target):
                v = self.eval(frame, subject, tparams)
                return membership(v, self.rp.to_type(target, tparams), self.alg)
            case N.HasField(subject, key):
                v = self.eval(frame, subject, tparams)
                self.need(isinstance(v, dict), subject.span, "has_field needs an object")
                return key in v
            case N.FieldAccess(subject, name):
                return self.field(self.eval(frame, subject, tparams), name, e.span)
            case N.Index(subject, index):
                v = self.eval(frame, subject, tparams)
                i = self.eval(frame, index, tparams)
                return self.index(v, i, e.span)
            case N.LengthOf(subject):
                v = self.eval(frame, subject, tparams)
                self.need(isinstance(v, (tuple, list)), subject.span, "length needs a tuple or list")
                return len(v)
            case N.Call(callee, args):
                f = self.eval(frame, callee, tparams)
                self.need(isinstance(f, FuncV), callee.span, "callee is not a function")
                return self.call(f.name, [self.eval(frame, a, tparams) for a in args], e.span)
            case N.Unary("not", operand):
                return not self.truth(self.eval(frame, operand, tparams), operand.span)
            case N.Unary("-", operand):
                v = self.eval(frame, operand, tparams)
                self.need(is_number(v), operand.span, "'-' needs a number")
                return -v
            case N.Binary("and", left, right):
                if not self.truth(self.eval(frame, left, tparams), left.span):
                    return False
                return self.truth(self.eval(frame, right, tparams), right.span)
            case N.Binary("or", left, right):
                if self.truth(self.eval(frame, left, tparams), left.span):
                    return True
                return self.truth(self.eval(frame, right, tparams), right.span)
            case N.Binary("==", left, right):
                return values_equal(self.eval(frame, left, tparams), self.eval(frame, right, tparams))
            case N.Binary(op, left, right):
                a = self.eval(frame, left, tparams)
                b = self.eval(frame, right, tparams)
                self.need(is_number(a), left.span, f"'{op}' needs numbers")
                self.need(is_number(b), right.span, f"'{op}' needs numbers")
                return self.arith(op, a, b, e.span)
            case N.IfExpr(cond, then, orelse):
                if self.truth(self.eval(frame, cond, tparams), cond.span):
                    return self.eval(frame, then, tparams)
                return self.eval(frame, orelse, tparams)
        raise TypeError(f"not an expression: {e!r}")

    def field(self, v, name: str, span: Span):
        if isinstance(v, RecordV):
            try:
                return v.get(name)
            except KeyError:
                raise EvalError(TYPE_CONFUSION, span, f"record {v.name} has no field {name}") from None
        if isinstance(v, dict):
            if name not in v:
                raise EvalError(MISSING_FIELD, span, f"missing field {name!r}")
            return v[name]
        raise EvalError(TYPE_CONFUSION, span, f"cannot read field {name!r}")

    def index(self, v, i, span: Span):
        if isinstance(v, dict):
            self.need(isinstance(i, str), span, "object key must be a string")
            return self.field(v, i, span)
        if isinstance(v, (tuple, list)):
            self.need(is_number(i), span, "index must be a number")
            if i != int(i) or not 0 <= i < len(v):
                kind = TYPE_CONFUSION if isinstance(v, tuple) else INDEX_OUT_OF_RANGE
                raise EvalError(kind, span, f"index {i} out of range")
            return v[int(i)]
        raise EvalError(TYPE_CONFUSION, span, "value cannot be indexed")

    @staticmethod
    def arith(op: str, a, b, span: Span):
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op in ("/", "mod") and b == 0:
            raise EvalError(ARITHMETIC, span, "division by zero")
        if op == "/":
            q = a / b
            return int(q) if q.is_integer() and isinstance(a, int) and isinstance(b, int) else q
        if op == "mod":
            return truncating_mod(a, b)
        return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[op]


def evaluate_call(program, name: str, args: list):
    """Evaluate ``name(*args)`` in ``program`` (a Program or ResolvedProgram)."""
    rp = program if isinstance(program, ResolvedProgram) else resolve(program)
    return Interpreter(rp).call(name, list(args))


# -- sampling ---------------------------------------------------------------

NUMBERS = (-1, 0, 1, 2, 999, 0.5)
STRINGS = ("", "a", "hello")
KEYS = ("rainfall", "a")
INSTANTIATIONS = (NUMBER, STRING, BOOLEAN, union(NUMBER, STRING), TOP)


class CannotSample(Exception):
    pass


class Sampler:
    """Draws random inhabitants of a type."""

    def __init__(self, rp: ResolvedProgram, rng: random.Random, depth: int = 3):
        self.rp = rp
        self.alg = rp.algebra
        self.rng = rng
        self.depth = depth

    def functions_of(self, t: FuncT) -> list[str]:
        names = [n for n, info in self.rp.functions.items()
                 if not info.tparams and self.alg.subtype(info.type, t)]
        names += [n for n, (tps, sig) in PRELUDE.items() if not tps and self.alg.subtype(sig, t)]
        return sorted(names)

    def sample(self, t: Type, depth: int | None = None):
        depth = self.depth if depth is None else depth
        rng = self.rng
        if t == TOP:
            return self.sample(rng.choice((NUMBER, STRING, BOOLEAN, NONE,
                                           TupleT((NUMBER, STRING)), ListT(NUMBER), MapT(NUMBER))), depth)
        if t == NUMBER:
            return rng.choice(NUMBERS)
        if t == STRING:
            return rng.choice(STRINGS)
        if t == BOOLEAN:
            return rng.choice((True, False))
        if t in (TRUE, FALSE):
            return t == TRUE
        if t == NONE:
            return None
        match t:
            case NumLitT(n):
                return n
            case TupleT(elems):
                return tuple(self.sample(x, depth - 1) for x in elems)
            case ListT(elem):
                n = rng.randint(0, 3) if depth > 0 else 0
                return [self.sample(elem, depth - 1) for _ in range(n)]
            case MapT(value):
                keys = [k for k in KEYS if depth > 0 and rng.random() < 0.6]
                return {k: self.sample(value, depth - 1) for k in keys}
            case RecordT(name):
                return RecordV(name, tuple((f, self.sample(ft, depth - 1))
                                           for f, ft in self.rp.records[name]))
            case UnionT() | AliasRef():
                atoms = self.alg.atoms(t)
                if not atoms:
                    raise CannotSample(f"empty type {t}")
                if depth <= 0:
                    leaves = [m for m in atoms if not isinstance(m, (TupleT, RecordT))]
                    atoms = leaves or atoms
                return self.sample(rng.choice(atoms), depth)
            case FuncT():
                names = self.functions_of(t)
                if not names:
                    raise CannotSample(f"no function of type {t}")
                return FuncV(rng.choice(names))
        raise CannotSample(f"cannot sample {t}")


def instantiate(rp: ResolvedProgram, name: str) -> FuncT | None:
    """Pick a concrete instantiation of a generic function so that every
    parameter type has inhabitants (function parameters need a match)."""
    info = rp.functions[name]
    if not info.tparams:
        return info.type
    sampler = Sampler(rp, random.Random(0))
    for combo in itertools.product(INSTANTIATIONS, repeat=len(info.tparams)):
        subst = dict(zip(info.tparams, combo))
        ft = substitute(info.type, subst)
        if all(not isinstance(p, FuncT) or sampler.functions_of(p) for p in ft.params):
            return ft
    return None


def sample_args(rp: ResolvedProgram, name: str, rng: random.Random, count: int) -> list[list]:
    ft = instantiate(rp, name)
    if ft is None:
        return []
    sampler = Sampler(rp, rng)
    return [[sampler.sample(p) for p in ft.params] for _ in range(count)]


def predicate_holds(rp: ResolvedProgram, name: str, args: list, value) -> bool:
    """Whether a predicate's result agrees with its latent annotation."""
    ft = instantiate(rp, name)
    lat = ft.latent if ft is not None else None
    if lat is None or not isinstance(value, bool):
        return True
    inside = membership(args[lat.index], lat.target, rp.algebra)
    if value:
        return inside
    return lat.kind != SYMMETRIC or not inside


# -- argument conversion and display ----------------------------------------

def from_json(v, t: Type, alg: Algebra):
    """Convert decoded JSON to a runtime value, guided by the expected type."""
    atoms = alg.atoms(t) if t != TOP else []
    if isinstance(v, list):
        tuples = [m for m in atoms if isinstance(m, TupleT) and len(m.elems) == len(v)]
        lists = [m for m in atoms if isinstance(m, ListT)]
        if tuples and not lists:
            return tuple(from_json(x, et, alg) for x, et in zip(v, tuples[0].elems))
        elem = union(*(m.elem for m in lists)) if lists else TOP
        return [from_json(x, elem, alg) for x in v]
    if isinstance(v, dict):
        records = [m for m in atoms if isinstance(m, RecordT)]
        for r in records:
            fields = alg.records[r.name]
            if set(v) == {f for f, _ in fields}:
                return RecordV(r.name, tuple((f, from_json(v[f], ft, alg)) for f, ft in fields))
        maps = [m for m in atoms if isinstance(m, MapT)]
        value_t = union(*(m.value for m in maps)) if maps else TOP
        return {k: from_json(x, value_t, alg) for k, x in v.items()}
    return v


def parse_args(text: str, params: tuple, alg: Algebra) -> list:
    decoded = json.loads(text)
    if not isinstance(decoded, list):
        decoded = [decoded]
    return [from_json(v, t, alg) for v, t in zip(decoded, params)] + decoded[len(params):]


def show(v) -> str:
    if v is True:
        return "true"
    if v is False:
        return "false"
    if v is None:
        return "None"
    if isinstance(v, float) and v.is_integer():
        return str(int(v))
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, tuple):
        return "(" + ", ".join(show(x) for x in v) + ("," if len(v) == 1 else "") + ")"
    if isinstance(v, list):
        return "[" + ", ".join(show(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {show(x)}" for k, x in v.items()) + "}"
    if isinstance(v, RecordV):
        return f"{v.name}(" + ", ".join(show(x) for _, x in v.fields) + ")"
    if isinstance(v, FuncV):
        return f"<function {v.name}>"
    return str(v)
