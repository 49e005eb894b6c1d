"""Render AST nodes back to concrete syntax.

Output is fully parenthesized where precedence could matter, so
``parse(unparse(p)) == p`` holds structurally.
"""

from __future__ import annotations

import json

from . import nodes as N

INDENT = "  "


def unparse(program: N.Program) -> str:
    chunks = []
    for decl in program.decls:
        if isinstance(decl, N.FunDef):
            chunks.append(_fundef(decl))
        elif isinstance(decl, N.RecordDef):
            lines = [f"struct {decl.name}:"]
            lines += [f"{INDENT}{f.name}: {type_str(f.type)}" for f in decl.fields]
            chunks.append("\n".join(lines))
        else:
            chunks.append(f"type {decl.name} = {type_str(decl.type)}")
    return "\n\n".join(chunks) + "\n" if chunks else ""


def _fundef(fun: N.FunDef) -> str:
    tps = f"[{', '.join(fun.tparams)}]" if fun.tparams else ""
    params = ", ".join(f"{p.name}: {type_str(p.type)}" for p in fun.params)
    ret = f" -> {annot_str(fun.ret)}" if fun.ret is not None else ""
    head = f"define {fun.name}{tps}({params}){ret}:"
    return "\n".join([head] + _block(fun.body, 1))


def _block(block, depth: int) -> list[str]:
    out = []
    pad = INDENT * depth
    for s in block:
        if isinstance(s, N.If):
            out += _if(s, depth, pad)
        elif isinstance(s, N.For):
            out.append(f"{pad}for {s.name} in {expr_str(s.iterable)}:")
            out += _block(s.body, depth + 1)
        else:
            out.append(pad + simple_str(s))
    return out


def _if(s: N.If, depth: int, pad: str, keyword: str = "if") -> list[str]:
    out = [f"{pad}{keyword} {expr_str(s.cond)}:"]
    out += _block(s.then, depth + 1)
    if s.orelse is not None:
        if len(s.orelse) == 1 and isinstance(s.orelse[0], N.If):
            out += _if(s.orelse[0], depth, pad, "else if")
        else:
            out.append(f"{pad}else:")
            out += _block(s.orelse, depth + 1)
    return out


def simple_str(s) -> str:
    if isinstance(s, (N.Let, N.Var)):
        kw = "let" if isinstance(s, N.Let) else "var"
        annot = f": {type_str(s.annot)}" if s.annot is not None else ""
        return f"{kw} {s.name}{annot} = {expr_str(s.value)}"
    if isinstance(s, N.Assign):
        return f"{s.name} = {expr_str(s.value)}"
    if isinstance(s, N.Return):
        return f"return {expr_str(s.value)}"
    if isinstance(s, N.Assert):
        return f"assert {expr_str(s.expr)}"
    if isinstance(s, N.ExprStmt):
        return expr_str(s.expr)
    raise TypeError(f"not a simple statement: {s!r}")


def expr_str(e) -> str:
    match e:
        case N.VarRef(name) | N.BuiltinRef(name):
            return name
        case N.NumLit(value):
            return repr(value)
        case N.StrLit(value):
            return json.dumps(value)
        case N.BoolLit(value):
            return "true" if value else "false"
        case N.NoneLit():
            return "None"
        case N.ListLit(items):
            return "[" + ", ".join(expr_str(i) for i in items) + "]"
        case N.TupleLit(items):
            inner = ", ".join(expr_str(i) for i in items)
            return f"({inner},)" if len(items) == 1 else f"({inner})"
        case N.IsTest(subject, target):
            return f"({expr_str(subject)} is {type_str(target)})"
        case N.HasField(subject, key):
            return f"has_field({expr_str(subject)}, {json.dumps(key)})"
        case N.FieldAccess(subject, name):
            return f"{expr_str(subject)}.{name}"
        case N.Index(subject, index):
            return f"{expr_str(subject)}[{expr_str(index)}]"
        case N.LengthOf(subject):
            return f"Tuple.length({expr_str(subject)})"
        case N.Call(callee, args):
            return f"{expr_str(callee)}({', '.join(expr_str(a) for a in args)})"
        case N.Unary("not", operand):
            return f"(not {expr_str(operand)})"
        case N.Unary(op, operand):
            return f"({op}{expr_str(operand)})"
        case N.Binary(op, left, right):
            return f"({expr_str(left)} {op} {expr_str(right)})"
        case N.IfExpr(cond, then, orelse):
            return f"(if {expr_str(cond)}: {expr_str(then)} else: {expr_str(orelse)})"
    raise TypeError(f"not an expression: {e!r}")


def type_str(t) -> str:
    match t:
        case N.TName(name):
            return name
        case N.TNumLit(value):
            return repr(value)
        case N.TTuple(elems):
            return "Tuple(" + ", ".join(type_str(x) for x in elems) + ")"
        case N.TList(elem):
            return f"List({type_str(elem)})"
        case N.TObject(None):
            return "Object"
        case N.TObject(value):
            return f"Object({type_str(value)})"
        case N.TUnion(alts):
            return " | ".join(_union_alt(a) for a in alts)
        case N.TFunc(params, ret):
            ps = ", ".join(f"{n}: {type_str(p)}" if n else type_str(p) for n, p in params)
            return f"({ps}) -> {annot_str(ret)}"
    raise TypeError(f"not a type expression: {t!r}")


def _union_alt(t) -> str:
    # function types and nested unions need grouping inside a union
    if isinstance(t, (N.TFunc, N.TUnion)):
        return f"({type_str(t)})"
    return type_str(t)


def annot_str(a) -> str:
    if isinstance(a, N.SymPred):
        return f"{a.param} is {type_str(a.type)}"
    if isinstance(a, N.AsymPred):
        return f"implies {a.param} is {type_str(a.type)}"
    return type_str(a.type)
