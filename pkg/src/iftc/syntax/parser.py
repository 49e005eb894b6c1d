"""Recursive-descent parser producing :mod:`iftc.syntax.nodes` trees."""

from __future__ import annotations

from ..diagnostics import ParseError, Span
from . import nodes as N
from .lexer import Tok, Token, tokenize

_COMPARE = {Tok.LT: "<", Tok.LE: "<=", Tok.GT: ">", Tok.GE: ">=", Tok.EQ: "=="}
_NAMESPACED = {"String.length", "String.append", "Tuple.length", "List.length"}


class Parser:
    def __init__(self, tokens: list[Token], file: str = "<input>"):
        self.toks = [t for t in tokens if t.kind is not Tok.EXPECT_ERROR]
        self.file = file
        self.pos = 0
        self.last: Token | None = None

    # -- token helpers ------------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        i = self.pos + offset
        if i < len(self.toks):
            return self.toks[i]
        line = self.toks[-1].line if self.toks else 1
        return Token(Tok.EOF, "", line + 1, 1)

    def at(self, *kinds: Tok) -> bool:
        return self.peek().kind in kinds

    def advance(self) -> Token:
        tok = self.peek()
        if tok.kind is not Tok.EOF:
            self.pos += 1
        self.last = tok
        return tok

    def accept(self, kind: Tok) -> Token | None:
        if self.at(kind):
            return self.advance()
        return None

    def expect(self, kind: Tok, what: str | None = None) -> Token:
        if self.at(kind):
            return self.advance()
        tok = self.peek()
        found = tok.text or tok.kind.name
        raise ParseError(f"expected {what or kind.value}, found {found!r}", self.span_of(tok))

    def span_of(self, tok: Token) -> Span:
        return Span(self.file, tok.line, tok.col, max(1, len(tok.text)))

    def span_from(self, start: Token) -> Span:
        end = self.last or start
        if end.line == start.line:
            length = end.col + max(1, len(end.text)) - start.col
        else:
            length = max(1, len(start.text))
        return Span(self.file, start.line, start.col, max(1, length))

    # -- declarations -------------------------------------------------------

    def parse_program(self) -> N.Program:
        decls = []
        while not self.at(Tok.EOF):
            if self.accept(Tok.NEWLINE):
                continue
            if self.at(Tok.DEFINE):
                decls.append(self.parse_fundef())
            elif self.at(Tok.STRUCT):
                decls.append(self.parse_struct())
            elif self.at(Tok.TYPE):
                decls.append(self.parse_alias())
            else:
                tok = self.peek()
                raise ParseError(
                    f"expected a declaration (define, struct, type), found {tok.text or tok.kind.name!r}",
                    self.span_of(tok),
                )
        return N.Program(tuple(decls), file=self.file)

    def parse_fundef(self) -> N.FunDef:
        start = self.expect(Tok.DEFINE)
        name = self.expect(Tok.IDENT, "function name")
        tparams = []
        if self.accept(Tok.LBRACKET):
            while True:
                tparams.append(self.expect(Tok.TYPEIDENT, "type parameter").text)
                if not self.accept(Tok.COMMA):
                    break
            self.expect(Tok.RBRACKET)
        self.expect(Tok.LPAREN)
        params = []
        if not self.at(Tok.RPAREN):
            while True:
                ptok = self.expect(Tok.IDENT, "parameter name")
                self.expect(Tok.COLON)
                ptype = self.parse_type()
                params.append(N.Param(ptok.text, ptype, span=self.span_from(ptok)))
                if not self.accept(Tok.COMMA):
                    break
        self.expect(Tok.RPAREN)
        ret = None
        if self.accept(Tok.ARROW):
            ret = self.parse_return_annot()
        self.expect(Tok.COLON)
        body = self.parse_block()
        end_line = self.last.line if self.last else start.line
        return N.FunDef(
            name.text, tuple(tparams), tuple(params), ret, body,
            span=Span(self.file, name.line, name.col, len(name.text)),
            end_line=end_line,
        )

    def parse_struct(self) -> N.RecordDef:
        self.expect(Tok.STRUCT)
        name = self.expect(Tok.TYPEIDENT, "struct name")
        self.expect(Tok.COLON)
        self.expect(Tok.NEWLINE)
        self.expect(Tok.INDENT, "indented field list")
        fields = []
        while not self.accept(Tok.DEDENT):
            if self.accept(Tok.NEWLINE):
                continue
            ftok = self.expect(Tok.IDENT, "field name")
            self.expect(Tok.COLON)
            ftype = self.parse_type()
            fields.append(N.Param(ftok.text, ftype, span=self.span_from(ftok)))
            self.expect(Tok.NEWLINE)
        return N.RecordDef(name.text, tuple(fields), span=self.span_of(name))

    def parse_alias(self) -> N.TypeAliasDef:
        self.expect(Tok.TYPE)
        name = self.expect(Tok.TYPEIDENT, "type name")
        self.expect(Tok.ASSIGN)
        texpr = self.parse_type()
        self.expect(Tok.NEWLINE)
        return N.TypeAliasDef(name.text, texpr, span=self.span_of(name))

    # -- types --------------------------------------------------------------

    def parse_return_annot(self) -> N.ReturnAnnot:
        start = self.peek()
        if self.accept(Tok.IMPLIES):
            param = self.expect(Tok.IDENT, "predicate subject")
            self.expect(Tok.IS)
            texpr = self.parse_type()
            return N.AsymPred(param.text, texpr, span=self.span_from(start))
        if self.at(Tok.IDENT) and self.peek(1).kind is Tok.IS:
            param = self.advance()
            self.advance()
            texpr = self.parse_type()
            return N.SymPred(param.text, texpr, span=self.span_from(start))
        texpr = self.parse_type()
        return N.Plain(texpr, span=self.span_from(start))

    def parse_type(self) -> N.TypeExpr:
        start = self.peek()
        alts = [self.parse_type_atom()]
        while self.accept(Tok.BAR):
            alts.append(self.parse_type_atom())
        if len(alts) == 1:
            return alts[0]
        return N.TUnion(tuple(alts), span=self.span_from(start))

    def parse_type_atom(self) -> N.TypeExpr:
        tok = self.peek()
        if tok.kind is Tok.NUMBER:
            self.advance()
            return N.TNumLit(tok.value, span=self.span_of(tok))
        if tok.kind is Tok.TYPEIDENT:
            self.advance()
            if tok.text == "Tuple":
                self.expect(Tok.LPAREN)
                elems = [self.parse_type()]
                while self.accept(Tok.COMMA):
                    elems.append(self.parse_type())
                self.expect(Tok.RPAREN)
                return N.TTuple(tuple(elems), span=self.span_from(tok))
            if tok.text == "List":
                self.expect(Tok.LPAREN)
                elem = self.parse_type()
                self.expect(Tok.RPAREN)
                return N.TList(elem, span=self.span_from(tok))
            if tok.text == "Object":
                if self.accept(Tok.LPAREN):
                    value = self.parse_type()
                    self.expect(Tok.RPAREN)
                    return N.TObject(value, span=self.span_from(tok))
                return N.TObject(None, span=self.span_of(tok))
            return N.TName(tok.text, span=self.span_of(tok))
        if tok.kind is Tok.LPAREN:
            self.advance()
            params = []
            if not self.at(Tok.RPAREN):
                while True:
                    pname = None
                    if self.at(Tok.IDENT) and self.peek(1).kind is Tok.COLON:
                        pname = self.advance().text
                        self.advance()
                    params.append((pname, self.parse_type()))
                    if not self.accept(Tok.COMMA):
                        break
            self.expect(Tok.RPAREN)
            if self.accept(Tok.ARROW):
                ret = self.parse_return_annot()
                return N.TFunc(tuple(params), ret, span=self.span_from(tok))
            if len(params) == 1 and params[0][0] is None:
                return params[0][1]
            raise ParseError("expected '->' after function parameter types", self.span_of(self.peek()))
        raise ParseError(f"expected a type, found {tok.text or tok.kind.name!r}", self.span_of(tok))

    # -- statements ---------------------------------------------------------

    def parse_block(self) -> tuple:
        if self.accept(Tok.NEWLINE):
            self.expect(Tok.INDENT, "indented block")
            stmts = []
            while not self.accept(Tok.DEDENT):
                if self.at(Tok.EOF):
                    break
                if self.accept(Tok.NEWLINE):
                    continue
                stmts.append(self.parse_stmt())
            if not stmts:
                raise ParseError("empty block", self.span_of(self.peek()))
            return tuple(stmts)
        stmt = self.parse_simple_stmt()
        self.expect(Tok.NEWLINE, "end of line")
        return (stmt,)

    def parse_stmt(self) -> N.Stmt:
        if self.at(Tok.IF):
            return self.parse_if()
        if self.at(Tok.FOR):
            start = self.advance()
            name = self.expect(Tok.IDENT, "loop variable")
            self.expect(Tok.IN)
            iterable = self.parse_expr()
            self.expect(Tok.COLON)
            body = self.parse_block()
            return N.For(name.text, iterable, body, span=Span(self.file, start.line, start.col, 3))
        stmt = self.parse_simple_stmt()
        self.expect(Tok.NEWLINE, "end of line")
        return stmt

    def parse_if(self) -> N.If:
        start = self.expect(Tok.IF)
        cond = self.parse_expr()
        self.expect(Tok.COLON)
        then = self.parse_block()
        orelse = None
        if self.at(Tok.ELSE):
            self.advance()
            if self.at(Tok.IF):
                orelse = (self.parse_if(),)
            else:
                self.expect(Tok.COLON)
                orelse = self.parse_block()
        return N.If(cond, then, orelse, span=Span(self.file, start.line, start.col, 2))

    def parse_simple_stmt(self) -> N.Stmt:
        tok = self.peek()
        if tok.kind in (Tok.LET, Tok.VAR):
            self.advance()
            name = self.expect(Tok.IDENT, "variable name")
            annot = None
            if self.accept(Tok.COLON):
                annot = self.parse_type()
            self.expect(Tok.ASSIGN)
            value = self.parse_expr()
            cls = N.Let if tok.kind is Tok.LET else N.Var
            return cls(name.text, annot, value, span=self.span_from(tok))
        if tok.kind is Tok.RETURN:
            self.advance()
            value = self.parse_expr()
            return N.Return(value, span=self.span_from(tok))
        if tok.kind is Tok.ASSERT:
            self.advance()
            expr = self.parse_expr()
            return N.Assert(expr, span=self.span_from(tok))
        if tok.kind is Tok.IDENT and self.peek(1).kind is Tok.ASSIGN:
            self.advance()
            self.advance()
            value = self.parse_expr()
            return N.Assign(tok.text, value, span=self.span_from(tok))
        if tok.kind in (Tok.IF, Tok.FOR, Tok.DEFINE, Tok.STRUCT, Tok.TYPE, Tok.ELSE):
            raise ParseError(f"{tok.text!r} is not allowed here", self.span_of(tok))
        expr = self.parse_expr()
        return N.ExprStmt(expr, span=self.span_from(tok))

    # -- expressions --------------------------------------------------------

    def parse_expr(self) -> N.Expr:
        if self.at(Tok.IF):
            return self.parse_if_expr()
        return self.parse_or()

    def parse_if_expr(self) -> N.IfExpr:
        start = self.expect(Tok.IF)
        cond = self.parse_expr()
        self.expect(Tok.COLON)
        then = self.parse_expr()
        self.expect(Tok.ELSE, "'else' in conditional expression")
        self.expect(Tok.COLON)
        orelse = self.parse_expr()
        return N.IfExpr(cond, then, orelse, span=self.span_from(start))

    def parse_or(self) -> N.Expr:
        start = self.peek()
        left = self.parse_and()
        while self.accept(Tok.OR):
            right = self.parse_and()
            left = N.Binary("or", left, right, span=self.span_from(start))
        return left

    def parse_and(self) -> N.Expr:
        start = self.peek()
        left = self.parse_not()
        while self.accept(Tok.AND):
            right = self.parse_not()
            left = N.Binary("and", left, right, span=self.span_from(start))
        return left

    def parse_not(self) -> N.Expr:
        start = self.peek()
        if self.accept(Tok.NOT):
            operand = self.parse_not()
            return N.Unary("not", operand, span=self.span_from(start))
        return self.parse_compare()

    def parse_compare(self) -> N.Expr:
        start = self.peek()
        left = self.parse_additive()
        if self.accept(Tok.IS):
            target = self.parse_type()
            left = N.IsTest(left, target, span=self.span_from(start))
        elif self.peek().kind in _COMPARE:
            op = _COMPARE[self.advance().kind]
            right = self.parse_additive()
            left = N.Binary(op, left, right, span=self.span_from(start))
        if self.peek().kind in _COMPARE or self.at(Tok.IS):
            raise ParseError(
                "chained comparisons are not supported; combine them with 'and'",
                self.span_of(self.peek()),
            )
        return left

    def parse_additive(self) -> N.Expr:
        start = self.peek()
        left = self.parse_multiplicative()
        while self.at(Tok.PLUS, Tok.MINUS):
            op = self.advance().text
            right = self.parse_multiplicative()
            left = N.Binary(op, left, right, span=self.span_from(start))
        return left

    def parse_multiplicative(self) -> N.Expr:
        start = self.peek()
        left = self.parse_unary()
        while self.at(Tok.STAR, Tok.SLASH, Tok.MOD):
            op = self.advance().text
            right = self.parse_unary()
            left = N.Binary(op, left, right, span=self.span_from(start))
        return left

    def parse_unary(self) -> N.Expr:
        start = self.peek()
        if self.accept(Tok.MINUS):
            operand = self.parse_unary()
            return N.Unary("-", operand, span=self.span_from(start))
        return self.parse_postfix()

    def parse_postfix(self) -> N.Expr:
        start = self.peek()
        expr = self.parse_primary()
        while True:
            if self.accept(Tok.LPAREN):
                args = self.parse_args(Tok.RPAREN)
                expr = N.Call(expr, args, span=self.span_from(start))
            elif self.accept(Tok.LBRACKET):
                index = self.parse_expr()
                self.expect(Tok.RBRACKET)
                expr = N.Index(expr, index, span=self.span_from(start))
            elif self.accept(Tok.DOT):
                name = self.expect(Tok.IDENT, "field name")
                expr = N.FieldAccess(expr, name.text, span=self.span_from(start))
            else:
                return expr

    def parse_args(self, closer: Tok) -> tuple:
        args = []
        if not self.at(closer):
            while True:
                args.append(self.parse_expr())
                if not self.accept(Tok.COMMA):
                    break
        self.expect(closer)
        return tuple(args)

    def parse_primary(self) -> N.Expr:
        tok = self.peek()
        kind = tok.kind
        if kind is Tok.NUMBER:
            self.advance()
            return N.NumLit(tok.value, span=self.span_of(tok))
        if kind is Tok.STRING:
            self.advance()
            return N.StrLit(tok.value, span=self.span_of(tok))
        if kind in (Tok.TRUE, Tok.FALSE):
            self.advance()
            return N.BoolLit(kind is Tok.TRUE, span=self.span_of(tok))
        if kind is Tok.IF:
            return self.parse_if_expr()
        if kind is Tok.IDENT:
            self.advance()
            if tok.text == "has_field" and self.at(Tok.LPAREN):
                self.advance()
                subject = self.parse_expr()
                self.expect(Tok.COMMA)
                key = self.expect(Tok.STRING, "string literal key")
                self.expect(Tok.RPAREN)
                return N.HasField(subject, key.value, span=self.span_from(tok))
            return N.VarRef(tok.text, span=self.span_of(tok))
        if kind is Tok.TYPEIDENT:
            self.advance()
            if tok.text == "None":
                return N.NoneLit(span=self.span_of(tok))
            if self.at(Tok.DOT) and self.peek(1).kind is Tok.IDENT:
                self.advance()
                member = self.advance()
                full = f"{tok.text}.{member.text}"
                if full not in _NAMESPACED:
                    raise ParseError(f"unknown builtin {full!r}", self.span_from(tok))
                if full in ("Tuple.length", "List.length"):
                    self.expect(Tok.LPAREN)
                    subject = self.parse_expr()
                    self.expect(Tok.RPAREN)
                    return N.LengthOf(subject, span=self.span_from(tok))
                return N.BuiltinRef(full, span=self.span_from(tok))
            return N.VarRef(tok.text, span=self.span_of(tok))
        if kind is Tok.LPAREN:
            self.advance()
            first = self.parse_expr()
            if self.accept(Tok.COMMA):
                items = [first]
                while not self.at(Tok.RPAREN):
                    items.append(self.parse_expr())
                    if not self.accept(Tok.COMMA):
                        break
                self.expect(Tok.RPAREN)
                return N.TupleLit(tuple(items), span=self.span_from(tok))
            self.expect(Tok.RPAREN)
            return first
        if kind is Tok.LBRACKET:
            self.advance()
            items = self.parse_args(Tok.RBRACKET)
            return N.ListLit(items, span=self.span_from(tok))
        raise ParseError(f"expected an expression, found {tok.text or kind.name!r}", self.span_of(tok))


def parse_program(tokens: list[Token], file: str = "<input>") -> N.Program:
    """Parse a token stream; raises ParseError (E002) on malformed input."""
    return Parser(tokens, file).parse_program()


def parse_source(source: str, file: str = "<input>") -> N.Program:
    return parse_program(tokenize(source, file), file)


def parse_expression(source: str, file: str = "<input>") -> N.Expr:
    p = Parser(tokenize(source, file), file)
    expr = p.parse_expr()
    p.accept(Tok.NEWLINE)
    if not p.at(Tok.EOF):
        raise ParseError("trailing input after expression", p.span_of(p.peek()))
    return expr
