"""Small expression language for operators and kernel polynomials.

Operator mode uses the generators ``x, y, Dx, Dy``; polynomial mode uses
``xi, eta``.  ``i`` is the imaginary unit.  Grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*' factor) | ('/' number) | <juxtaposed '(' factor>)*
    factor := atom ('^' uint)? | '-' factor
    atom   := number | 'i' | gen | '(' expr ')'
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .algebra import D1, D2, M1, M2, WeylOp, normal_mul
from .poly import Poly

OP_GENS = ("x", "y", "Dx", "Dy")
POLY_GENS = ("xi", "eta")


class DSLError(ValueError):
    kind = "syntax"

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        where = f" at offset {offset}" if offset is not None else ""
        super().__init__(f"{message}{where}")


class ParseError(DSLError):
    kind = "syntax"


class UnknownIdentifier(DSLError):
    kind = "unknown-identifier"


class ExponentError(DSLError):
    kind = "exponent"


class ModeError(DSLError):
    kind = "mode"


# AST -------------------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: complex


@dataclass(frozen=True)
class Gen:
    name: str


@dataclass(frozen=True)
class Sum:
    left: "OpExpr"
    right: "OpExpr"


@dataclass(frozen=True)
class Product:
    left: "OpExpr"
    right: "OpExpr"


@dataclass(frozen=True)
class Power:
    base: "OpExpr"
    exponent: int


@dataclass(frozen=True)
class Neg:
    operand: "OpExpr"


OpExpr = Union[Const, Gen, Sum, Product, Power, Neg]

# lexer -----------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d*)?|\.\d+)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))")


@dataclass(frozen=True)
class _Tok:
    kind: str  # num, id, op, end
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            off = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[off]!r}", off)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), start))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, gens: tuple[str, ...]):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.gens = gens

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> None:
        if self.tok.text != text or self.tok.kind != "op":
            raise ParseError(f"expected {text!r}, found {self.tok.text or 'end of input'!r}", self.tok.pos)
        self.take()

    def parse(self) -> OpExpr:
        if self.tok.kind == "end":
            raise ParseError("empty expression", 0)
        e = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.pos)
        return e

    def expr(self) -> OpExpr:
        e = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.take().text
            r = self.term()
            e = Sum(e, r if op == "+" else Neg(r))
        return e

    def term(self) -> OpExpr:
        e = self.factor()
        while True:
            t = self.tok
            if t.kind == "op" and t.text == "*":
                self.take()
                e = Product(e, self.factor())
            elif t.kind == "op" and t.text == "/":
                self.take()
                d = self.tok
                if d.kind != "num":
                    raise ParseError("division only by a numeric literal", d.pos)
                self.take()
                v = float(d.text)
                if v == 0:
                    raise ParseError("division by zero", d.pos)
                e = Product(e, Const(1.0 / v))
            elif t.kind == "op" and t.text == "(":
                e = Product(e, self.factor())
            else:
                return e

    def factor(self) -> OpExpr:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.take()
            return Neg(self.factor())
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.take()
            return Power(base, self.exponent())
        return base

    def exponent(self) -> int:
        t = self.tok
        if t.kind == "num":
            self.take()
            if not re.fullmatch(r"\d+", t.text):
                raise ExponentError(f"exponent must be a nonnegative integer, got {t.text}", t.pos)
            e = int(t.text)
        elif t.kind == "op" and t.text == "(":
            self.take()
            inner = self.expr()
            self.expect(")")
            val = _const_value(inner)
            if val is None or val.imag != 0 or val.real != int(val.real) or val.real < 0:
                raise ExponentError("exponent must be a nonnegative integer", t.pos)
            e = int(val.real)
        elif t.kind == "op" and t.text == "-":
            raise ExponentError("negative exponent", t.pos)
        else:
            raise ExponentError("exponent must be a nonnegative integer", t.pos)
        if self.tok.kind == "op" and self.tok.text == "^":
            self.take()
            e = e ** self.exponent()
        return e

    def atom(self) -> OpExpr:
        t = self.tok
        if t.kind == "num":
            self.take()
            return Const(complex(float(t.text)))
        if t.kind == "id":
            self.take()
            if t.text == "i":
                return Const(1j)
            if t.text in self.gens:
                return Gen(t.text)
            if t.text in OP_GENS or t.text in POLY_GENS:
                raise ModeError(f"generator {t.text!r} not allowed here", t.pos)
            raise UnknownIdentifier(f"unknown identifier {t.text!r}", t.pos)
        if t.kind == "op" and t.text == "(":
            self.take()
            e = self.expr()
            self.expect(")")
            return e
        raise ParseError(f"unexpected {t.text or 'end of input'!r}", t.pos)


def _const_value(e: OpExpr) -> complex | None:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Neg):
        v = _const_value(e.operand)
        return None if v is None else -v
    if isinstance(e, (Sum, Product)):
        a, b = _const_value(e.left), _const_value(e.right)
        if a is None or b is None:
            return None
        return a + b if isinstance(e, Sum) else a * b
    if isinstance(e, Power):
        v = _const_value(e.base)
        return None if v is None else v**e.exponent
    return None


def parse_op(text: str) -> OpExpr:
    """Parse an operator expression in x, y, Dx, Dy."""
    return _Parser(text, OP_GENS).parse()


def parse_poly_expr(text: str) -> OpExpr:
    return _Parser(text, POLY_GENS).parse()


# lowering --------------------------------------------------------------------

_OP_VALUES = {"x": M1, "y": M2, "Dx": D1, "Dy": D2}


def lower(expr: OpExpr) -> WeylOp:
    """Evaluate an operator AST in source order and normal-order the result."""
    if isinstance(expr, Const):
        return WeylOp.identity(expr.value)
    if isinstance(expr, Gen):
        if expr.name not in _OP_VALUES:
            raise ModeError(f"polynomial generator {expr.name!r} in operator expression")
        return _OP_VALUES[expr.name]
    if isinstance(expr, Sum):
        return lower(expr.left) + lower(expr.right)
    if isinstance(expr, Product):
        return normal_mul(lower(expr.left), lower(expr.right))
    if isinstance(expr, Power):
        return lower(expr.base) ** expr.exponent
    if isinstance(expr, Neg):
        return -lower(expr.operand)
    raise TypeError(f"not an expression node: {expr!r}")


def _lower_poly(expr: OpExpr) -> Poly:
    if isinstance(expr, Const):
        return Poly.const(expr.value, 2)
    if isinstance(expr, Gen):
        if expr.name not in POLY_GENS:
            raise ModeError(f"operator generator {expr.name!r} in polynomial expression")
        return Poly.var(POLY_GENS.index(expr.name), 2)
    if isinstance(expr, Sum):
        return _lower_poly(expr.left) + _lower_poly(expr.right)
    if isinstance(expr, Product):
        return _lower_poly(expr.left) * _lower_poly(expr.right)
    if isinstance(expr, Power):
        return _lower_poly(expr.base) ** expr.exponent
    if isinstance(expr, Neg):
        return -_lower_poly(expr.operand)
    raise TypeError(f"not an expression node: {expr!r}")


def parse_poly2(text: str) -> Poly:
    """Parse a commutative polynomial in xi, eta."""
    return _lower_poly(parse_poly_expr(text))


def op(text: str) -> WeylOp:
    """Shorthand: parse and lower an operator formula."""
    return lower(parse_op(text))


def substitute_ast(expr: OpExpr, mapping: dict[str, OpExpr]) -> OpExpr:
    """Replace generator leaves by sub-expressions (textual substitution)."""
    if isinstance(expr, Gen):
        return mapping.get(expr.name, expr)
    if isinstance(expr, Const):
        return expr
    if isinstance(expr, Sum):
        return Sum(substitute_ast(expr.left, mapping), substitute_ast(expr.right, mapping))
    if isinstance(expr, Product):
        return Product(substitute_ast(expr.left, mapping), substitute_ast(expr.right, mapping))
    if isinstance(expr, Power):
        return Power(substitute_ast(expr.base, mapping), expr.exponent)
    if isinstance(expr, Neg):
        return Neg(substitute_ast(expr.operand, mapping))
    raise TypeError(f"not an expression node: {expr!r}")


# pretty printing ---------------------------------------------------------------

def _num(x: float) -> str:
    s = np.format_float_positional(x, unique=True, trim="-")
    return s


def _coef(c: complex) -> tuple[str, str]:
    """Return (sign, magnitude text) for a coefficient."""
    a, b = c.real, c.imag
    if b == 0:
        return ("-" if a < 0 else "+", _num(abs(a)))
    if a == 0:
        mag = "i" if abs(b) == 1 else f"{_num(abs(b))}*i"
        return ("-" if b < 0 else "+", mag)
    sign_b = "-" if b < 0 else "+"
    ib = "i" if abs(b) == 1 else f"{_num(abs(b))}*i"
    return ("+", f"({_num(a)} {sign_b} {ib})")


def _format_terms(items, names) -> str:
    if not items:
        return "0"
    parts = []
    for exps, c in items:
        factors = []
        for name, e in zip(names, exps):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        sign, mag = _coef(c)
        if factors and mag == "1":
            body = "*".join(factors)
        elif factors:
            body = mag + "*" + "*".join(factors)
        else:
            body = mag
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _order(keys):
    return sorted(keys, key=lambda k: (-sum(k), [-v for v in k]))


def format_op(B: WeylOp) -> str:
    """Canonical DSL text of a normal-ordered operator."""
    return _format_terms([(k, B.terms[k]) for k in _order(B.terms)], OP_GENS)


def format_poly(p: Poly, names: tuple[str, ...] = POLY_GENS) -> str:
    return _format_terms([(k, p.terms[k]) for k in _order(p.terms)], names)


def format_symbol(a: Poly) -> str:
    return format_poly(a, ("x", "y", "xi", "eta"))
