"""Expression parser for the text grammar produced by ``render``.

Grammar::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := primary ("^" exponent)?
    exponent:= INT | "-" INT | "(" "-"? INT ")"
    primary := INT | "(" expr ")" | "#" INT | jet | call | diff | NAME
    jet     := DEP "_" (LETTERS | "{" LETTERS "}")
    diff    := "diff" "(" expr ("," INDEP)+ ")"
    call    := FUNC ("'"+ | "'" "[" INT ("," INT)* "]")? "(" expr ("," expr)* ")"
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .calculus import total_derivative_multi
from .errors import ExpressionError, ParseError, UndeclaredSymbol
from .expr import (
    DiffExpr,
    FunctionDecl,
    JetCoord,
    MultiIndex,
    Param,
    as_expr,
    atom,
    atom_of,
    const,
    func,
    jet,
    var,
)

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z][A-Za-z0-9]*)
  | (?P<op>[-+*/^(),'\[\]{}_\#])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str, line: int = 1, column: int = 1) -> list[Token]:
    out: list[Token] = []
    pos = 0
    col = column
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind != "ws":
            out.append(Token(kind, s, line, col))
        for ch in s:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        pos = m.end()
    out.append(Token("end", "", line, col))
    return out


@dataclass
class Context:
    """Symbols visible to the parser."""

    independents: tuple[str, ...] = ()
    dependents: tuple[str, ...] = ()
    functions: Mapping[str, FunctionDecl] = field(default_factory=dict)
    params: tuple[str, ...] = ("lambda",)
    placeholders: bool = False

    @classmethod
    def of(cls, sys, params: Iterable[str] = ("lambda",), placeholders: bool = False) -> "Context":
        return cls(tuple(sys.independents), tuple(sys.dependents), dict(sys.functions),
                   tuple(params), placeholders)


class _Parser:
    def __init__(self, tokens: list[Token], ctx: Context):
        self.toks = tokens
        self.k = 0
        self.ctx = ctx
        self.indep = {v: i for i, v in enumerate(ctx.independents)}
        self.dep = {v: j for j, v in enumerate(ctx.dependents)}

    @property
    def tok(self) -> Token:
        return self.toks[self.k]

    def error(self, msg: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.column)

    def undeclared(self, name: str, tok: Token) -> UndeclaredSymbol:
        return UndeclaredSymbol(f"undeclared symbol {name!r} at line {tok.line}, column {tok.column}")

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.k += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        t = self.tok
        if not self.accept(text):
            got = t.text or "end of input"
            raise self.error(f"expected {text!r}, found {got!r}", t)
        return t

    def expect_int(self) -> int:
        t = self.tok
        if t.kind != "int":
            raise self.error(f"expected an integer, found {t.text or 'end of input'!r}", t)
        self.k += 1
        return int(t.text)

    # grammar

    def parse(self) -> DiffExpr:
        e = self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")
        return e

    def expr(self) -> DiffExpr:
        e = self.term()
        while True:
            if self.accept("+"):
                e = e + self.term()
            elif self.accept("-"):
                e = e - self.term()
            else:
                return e

    def term(self) -> DiffExpr:
        e = self.unary()
        while True:
            if self.accept("*"):
                e = e * self.unary()
            elif self.tok.text == "/" and self.tok.kind == "op":
                t = self.tok
                self.k += 1
                d = self.unary()
                try:
                    e = e / d
                except (ExpressionError, ZeroDivisionError) as exc:
                    raise self.error(str(exc), t) from None
            else:
                return e

    def unary(self) -> DiffExpr:
        if self.accept("-"):
            return -self.unary()
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> DiffExpr:
        base = self.primary()
        if not self.accept("^"):
            return base
        t = self.tok
        if self.accept("("):
            k = -self.expect_int() if self.accept("-") else self.expect_int()
            self.expect(")")
        else:
            k = -self.expect_int() if self.accept("-") else self.expect_int()
        try:
            return base ** k
        except (ExpressionError, ZeroDivisionError) as exc:
            raise self.error(str(exc), t) from None

    def primary(self) -> DiffExpr:
        t = self.tok
        if t.kind == "int":
            self.k += 1
            return const(int(t.text))
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if self.accept("#"):
            if not self.ctx.placeholders:
                raise self.error("placeholders #k are only allowed in function rules", t)
            k = self.expect_int()
            if k < 1:
                raise self.error("placeholders are numbered from #1", t)
            return atom(Param(f"#{k}"))
        if t.kind != "name":
            raise self.error(f"unexpected {t.text or 'end of input'!r}", t)
        self.k += 1
        name = t.text
        if name == "diff" and self.tok.text == "(":
            return self.diff(t)
        if name in self.ctx.functions:
            return self.call(name, t)
        if name in self.dep:
            if self.tok.text == "_" and self.tok.kind == "op":
                return self.subscript(self.dep[name])
            return jet(self.dep[name], (0,) * len(self.indep))
        if name in self.indep:
            return var(self.indep[name])
        if name in self.ctx.params:
            return atom(Param(name))
        raise self.undeclared(name, t)

    def subscript(self, dep: int) -> DiffExpr:
        self.expect("_")
        braced = self.accept("{")
        t = self.tok
        if t.kind != "name":
            raise self.error("expected derivative variables after '_'", t)
        self.k += 1
        counts = [0] * len(self.indep)
        for n, ch in enumerate(t.text):
            if ch not in self.indep:
                raise ParseError(f"{ch!r} is not an independent variable", t.line, t.column + n)
            counts[self.indep[ch]] += 1
        if braced:
            self.expect("}")
        return jet(dep, counts)

    def diff(self, head: Token) -> DiffExpr:
        self.expect("(")
        e = self.expr()
        counts = [0] * len(self.indep)
        if self.tok.text != ",":
            raise self.error("diff needs at least one independent variable")
        while self.accept(","):
            t = self.tok
            if t.kind != "name" or t.text not in self.indep:
                raise self.error(f"{t.text!r} is not an independent variable", t)
            self.k += 1
            counts[self.indep[t.text]] += 1
        self.expect(")")
        # a bare dependent variable or jet becomes a jet; anything else is differentiated
        if len(e.terms) == 1:
            (mono, c), = e.terms.items()
            if c == 1 and len(mono) == 2 and mono[1] == 1:
                a = atom_of(mono[0])
                if isinstance(a, JetCoord):
                    return jet(a.dep, a.multi.plus(counts))
        return total_derivative_multi(e, MultiIndex(counts))

    def call(self, name: str, head: Token) -> DiffExpr:
        decl = self.ctx.functions[name]
        deriv = None
        if self.tok.text == "'":
            primes = 0
            while self.accept("'"):
                primes += 1
            if self.accept("["):
                if primes != 1:
                    raise self.error("use either primes or a bracketed derivative list", head)
                deriv = [self.expect_int()]
                while self.accept(","):
                    deriv.append(self.expect_int())
                self.expect("]")
            else:
                deriv = [primes]
            if len(deriv) != decl.arity:
                raise self.error(f"{name} takes {decl.arity} argument(s)", head)
        self.expect("(")
        args = [self.expr()]
        while self.accept(","):
            args.append(self.expr())
        self.expect(")")
        if len(args) != decl.arity:
            raise self.error(f"{name} takes {decl.arity} argument(s), got {len(args)}", head)
        try:
            return func(decl, args, deriv)
        except ValueError as exc:
            raise self.error(str(exc), head) from None


def parse_expression(text: str, ctx: Context, line: int = 1, column: int = 1) -> DiffExpr:
    """Parse ``text`` into a DiffExpr using the symbols declared in ``ctx``."""
    return _Parser(tokenize(text, line, column), ctx).parse()


def parse_rational(text: str) -> Fraction:
    """A rational constant such as ``-3``, ``1/2`` or ``(-1/2)``."""
    try:
        e = parse_expression(text, Context())
    except (ParseError, UndeclaredSymbol) as exc:
        raise ParseError(f"expected a rational number, got {text!r}") from exc
    v = e.const_value() if e.is_const() else None
    if v is None:
        raise ParseError(f"expected a rational number, got {text!r}")
    return Fraction(v)


def parse_jet(text: str, ctx: Context) -> JetCoord:
    """A single jet coordinate such as ``u_t`` or ``diff(u, x, x)``."""
    e = as_expr(parse_expression(text, ctx))
    if len(e.terms) == 1:
        (mono, c), = e.terms.items()
        if c == 1 and len(mono) == 2 and mono[1] == 1:
            a = atom_of(mono[0])
            if isinstance(a, JetCoord):
                return a
    raise ParseError(f"expected a single jet coordinate, got {text!r}")
