"""Recursive-descent parser for metaQASM concrete syntax.

Accepts both the block-scoped form (``qreg x[3] in { ... }``) and the flat
openQASM style, where a declaration scopes over the rest of the enclosing
command list.  Gate applications may be written ``g(a, b)`` or ``g a, b``.
"""
from __future__ import annotations

from . import ast as A
from .lexer import QasmSyntaxError, Token, tokenize

BUILTIN_GATES = {"h": 1, "t": 1, "tdg": 1, "cx": 2}
RESERVED_GATE_NAMES = frozenset(BUILTIN_GATES) | {"cphase", "cu1"}
TYPE_NAMES = ("Bit", "Qbit", "Circuit", "Family")


class Parser:
    def __init__(self, tokens: list[Token], file: str = "<input>"):
        self.tokens = tokens
        self.pos = 0
        if tokens:
            last = tokens[-1].span
            eof_span = A.SourceSpan(last.file, last.line, last.column + last.length, 1)
        else:
            eof_span = A.SourceSpan(file, 1, 1, 1)
        self.eof = Token("eof", "", eof_span)

    # -- token helpers ----------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else self.eof

    def at(self, *kinds: str) -> bool:
        return self.peek().kind in kinds

    def advance(self) -> Token:
        tok = self.peek()
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, message: str, expected=(), tok: Token | None = None):
        tok = tok or self.peek()
        if tok.kind == "inf":
            message = "'∞' is not valid in source programs"
        raise QasmSyntaxError(tok.span, message, expected)

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            found = "end of input" if tok.kind == "eof" else repr(tok.text)
            self.error(f"expected {kind!r}, found {found}", (kind,))
        return self.advance()

    def ident(self) -> Token:
        return self.expect("ident")

    # -- programs and commands ---------------------------------------------

    def program(self) -> A.Command:
        header = None
        if self.at("OPENQASM"):
            tok = self.advance()
            version = self.peek()
            if version.kind not in ("real", "nat"):
                self.error("expected version number after OPENQASM", ("real",))
            self.advance()
            self.expect(";")
            header = (version.text, tok.span)
        body = self.commands(("eof",))
        self.expect("eof")
        if header is not None:
            return A.Header(header[0], body, header[1])
        return body

    def commands(self, end: tuple[str, ...]) -> A.Command:
        items = []  # (is_flat_declaration, node)
        while not self.at(*end):
            flat, node, ends_with_brace = self.command_item()
            items.append((flat, node))
            if self.at(";"):
                self.advance()
            elif not ends_with_brace and not self.at(*end):
                self.error("expected ';' after command", (";",))
        result: A.Command = A.Skip()
        for flat, node in reversed(items):
            if flat:
                result = A.with_scope(node, result)
            elif isinstance(result, A.Skip):
                result = node
            else:
                result = A.Seq(node, result, node.span)
        return result

    def block_scope(self):
        """Optional ``in { C }``; returns the scope or None for flat style."""
        if not self.at("in"):
            return None
        self.advance()
        self.expect("{")
        scope = self.commands(("}",))
        self.expect("}")
        return scope

    def command_item(self):
        tok = self.peek()
        kind = tok.kind
        if kind == "include":
            self.advance()
            path = self.expect("string").value
            return True, A.Include(path, A.Skip(), tok.span), False
        if kind in ("qreg", "creg"):
            self.advance()
            name = self.decl_name()
            self.expect("[")
            size = self.index()
            self.expect("]")
            cls = A.QregIn if kind == "qreg" else A.CregIn
            scope = self.block_scope()
            node = cls(name, size, scope or A.Skip(), tok.span)
            return scope is None, node, scope is not None
        if kind == "gate":
            self.advance()
            name = self.decl_name(gate=True)
            params = self.params()
            body = self.unitary_block()
            scope = self.block_scope()
            return scope is None, A.GateIn(name, params, body, scope or A.Skip(), tok.span), True
        if kind == "family":
            self.advance()
            self.expect("(")
            index_vars = self.ident_list()
            self.expect(")")
            name = self.decl_name(gate=True)
            params = self.params()
            body = self.unitary_block()
            scope = self.block_scope()
            node = A.FamilyIn(name, index_vars, params, body, scope or A.Skip(), tok.span)
            return scope is None, node, True
        if kind == "measure":
            self.advance()
            src = self.expr()
            self.expect("->")
            dst = self.expr()
            return False, A.Measure(src, dst, tok.span), False
        if kind == "reset":
            self.advance()
            return False, A.Reset(self.expr(), tok.span), False
        if kind == "if":
            self.advance()
            self.expect("(")
            cond = self.expr()
            self.expect("==")
            value = self.expect("nat").value
            self.expect(")")
            body, braced = self.unitary_body()
            return False, A.IfEq(cond, value, body, tok.span), braced
        if kind in ("eof", "}"):
            self.error("expected a command", ("qreg", "creg", "gate", "family", "measure", "reset", "if", "ident"))
        stmt, braced = self.unitary()
        return False, A.UStmt(stmt, stmt.span), braced

    def decl_name(self, gate: bool = False) -> str:
        tok = self.ident()
        if gate and tok.text in RESERVED_GATE_NAMES:
            self.error(f"cannot redefine builtin gate {tok.text!r}", tok=tok)
        return tok.text

    def ident_list(self) -> tuple[str, ...]:
        names = [self.ident().text]
        while self.at(","):
            self.advance()
            names.append(self.ident().text)
        return tuple(names)

    def params(self) -> tuple[A.Param, ...]:
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                tok = self.ident()
                self.expect(":")
                params.append(A.Param(tok.text, self.type_(), tok.span))
                if not self.at(","):
                    break
                self.advance()
        self.expect(")")
        return tuple(params)

    # -- types ----------------------------------------------------------

    def type_(self) -> A.Type:
        tok = self.peek()
        if tok.kind != "ident" or tok.text not in TYPE_NAMES:
            self.error("expected a type", TYPE_NAMES)
        self.advance()
        if tok.text in ("Bit", "Qbit"):
            base = A.Bit() if tok.text == "Bit" else A.Qbit()
            if self.at("["):
                self.advance()
                size = self.index()
                self.expect("]")
                return A.Reg(base, size)
            return base
        if tok.text == "Circuit":
            return A.Circuit(self.type_list())
        self.expect("(")
        index_vars = self.ident_list()
        self.expect(")")
        return A.Family(index_vars, self.type_list())

    def type_list(self) -> tuple[A.Type, ...]:
        self.expect("(")
        types = []
        if not self.at(")"):
            while True:
                # parameter names inside function types are documentation only
                if self.at("ident") and self.peek(1).kind == ":":
                    self.advance()
                    self.advance()
                types.append(self.type_())
                if not self.at(","):
                    break
                self.advance()
        self.expect(")")
        return tuple(types)

    # -- unitary statements ------------------------------------------------

    def unitary_block(self) -> A.UnitaryStmt:
        self.expect("{")
        stmts = []
        while not self.at("}"):
            stmt, braced = self.unitary()
            stmts.append(stmt)
            if self.at(";"):
                self.advance()
            elif not braced and not self.at("}"):
                self.error("expected ';' or '}' after statement", (";", "}"))
        if not stmts:
            self.error("expected a unitary statement", ("ident", "reverse", "for"))
        self.expect("}")
        return A.useq(stmts)

    def unitary_body(self):
        if self.at("{"):
            return self.unitary_block(), True
        return self.unitary()

    def unitary(self):
        """Parse one unitary statement; returns (stmt, ends_with_brace)."""
        tok = self.peek()
        if tok.kind == "reverse":
            self.advance()
            body, braced = self.unitary_body()
            return A.Reverse(body, tok.span), braced
        if tok.kind == "for":
            self.advance()
            var = self.ident().text
            self.expect("=")
            lo = self.index()
            self.expect("..")
            hi = self.index()
            self.expect("do")
            body, braced = self.unitary_body()
            return A.For(var, lo, hi, body, tok.span), braced
        if tok.kind == "{":
            return self.unitary_block(), True
        if tok.kind == "instance":
            target = self.expr()
            return A.Apply(target, self.call_args(), tok.span), False
        if tok.kind != "ident":
            self.error("expected a unitary statement", ("ident", "reverse", "for", "instance"))
        name = tok.text
        if name == "cphase" and self.peek(1).kind == "(":
            self.advance()
            self.expect("(")
            k = self.index()
            self.expect(")")
            a, b = self.fixed_args(name, 2)
            return A.CPhase(k, a, b, tok.span), False
        if name == "cu1" and self.peek(1).kind == "(":
            self.advance()
            k, negative = self.cu1_angle()
            a, b = self.fixed_args(name, 2)
            stmt = A.CPhase(A.NatLit(k), a, b, tok.span)
            return (A.Reverse(stmt, tok.span) if negative else stmt), False
        if name in BUILTIN_GATES:
            self.advance()
            args = self.fixed_args(name, BUILTIN_GATES[name])
            if name == "cx":
                return A.CX(args[0], args[1], tok.span), False
            cls = {"h": A.H, "t": A.T, "tdg": A.Tdg}[name]
            return cls(args[0], tok.span), False
        target = self.expr()
        return A.Apply(target, self.call_args(), tok.span), False

    def cu1_angle(self) -> tuple[int, bool]:
        """``cu1(±pi/2^e)`` as emitted by the elaborator; returns (e + 1, negative)."""
        self.expect("(")
        negative = False
        if self.at("-"):
            self.advance()
            negative = True
        pi = self.ident()
        if pi.text != "pi":
            self.error("expected angle of the form pi/2^e", ("pi",), tok=pi)
        exponent = 0
        if self.at("/"):
            self.advance()
            two = self.expect("nat")
            if two.value != 2:
                self.error("expected angle of the form pi/2^e", ("2",), tok=two)
            self.expect("^")
            paren = self.at("(")
            if paren:
                self.advance()
            sign = 1
            if self.at("-"):
                self.advance()
                sign = -1
            exponent = sign * self.expect("nat").value
            if paren:
                self.expect(")")
        self.expect(")")
        k = exponent + 1
        if k < 0:
            self.error("cu1 angle exceeds 2*pi")
        return k, negative

    def call_args(self) -> tuple[A.Expr, ...]:
        if self.at("("):
            self.advance()
            args = []
            if not self.at(")"):
                args = self.expr_list()
            self.expect(")")
            return tuple(args)
        if self.at(";", "}", "eof"):
            return ()
        return tuple(self.expr_list())

    def fixed_args(self, name: str, arity: int):
        tok = self.peek()
        args = self.call_args()
        if len(args) != arity:
            self.error(f"{name} takes {arity} argument(s), got {len(args)}", tok=tok)
        return args

    def expr_list(self) -> list[A.Expr]:
        args = [self.expr()]
        while self.at(","):
            self.advance()
            args.append(self.expr())
        return args

    # -- expressions ------------------------------------------------------

    def expr(self) -> A.Expr:
        tok = self.peek()
        if tok.kind == "instance":
            self.advance()
            self.expect("(")
            indices = [self.index()]
            while self.at(","):
                self.advance()
                indices.append(self.index())
            self.expect(")")
            return A.Instance(tuple(indices), self.expr(), tok.span)
        name = self.ident()
        if not self.at("["):
            return A.Var(name.text, name.span)
        self.advance()
        lo = self.index()
        if self.at(".."):
            self.advance()
            hi = self.index()
            end = self.expect("]")
            return A.Slice(name.text, lo, hi, _cover(name.span, end.span))
        end = self.expect("]")
        return A.Deref(name.text, lo, _cover(name.span, end.span))

    # -- index expressions -------------------------------------------------

    def index(self) -> A.IndexExpr:
        left = self.index_term()
        while self.at("+", "-"):
            op = self.advance()
            right = self.index_term()
            cls = A.Add if op.kind == "+" else A.Sub
            left = cls(left, right, left.span)
        return left

    def index_term(self) -> A.IndexExpr:
        left = self.index_atom()
        while self.at("*"):
            self.advance()
            right = self.index_atom()
            left = A.Mul(left, right, left.span)
        return left

    def index_atom(self) -> A.IndexExpr:
        tok = self.peek()
        if tok.kind == "nat":
            self.advance()
            return A.NatLit(tok.value, tok.span)
        if tok.kind == "ident":
            self.advance()
            return A.IndexVar(tok.text, tok.span)
        if tok.kind == "(":
            self.advance()
            inner = self.index()
            self.expect(")")
            return inner
        self.error("expected an index expression", ("nat", "ident", "("))


def _cover(start: A.SourceSpan, end: A.SourceSpan) -> A.SourceSpan:
    if start.line == end.line:
        return A.SourceSpan(start.file, start.line, start.column, end.column + end.length - start.column)
    return start


def parse_program(tokens: list[Token], file: str = "<input>") -> A.Command:
    return Parser(tokens, file).program()


def parse_source(source: str, file: str = "<input>") -> A.Command:
    return parse_program(tokenize(source, file), file)
