"""Recursive-descent parser for coefficient expressions.

Grammar (standard precedence, ``^`` binds tightest and is right
associative, unary minus binds looser than ``^``)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary | unary)*      # juxtaposition multiplies
    unary   := '-' unary | '+' unary | power
    power   := atom ('^' unary)?
    atom    := NUMBER | IDENT | '(' expr ')'

Identifiers resolve to coordinates, radical symbols, previously bound
names, basis 1-forms ``d<coord>`` and basis vectors ``e<coord>``.  On two
basis monomials ``^`` is the wedge product; on a Scalar base it is an
integer power.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

from .scalar import Chart, Scalar


class ParseError(ValueError):
    """Syntax or semantic error with a source position."""

    def __init__(self, message: str, line: int = 1, column: int = 1, expected: tuple[str, ...] = ()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        text = f"line {line}, column {column}: {message}"
        if expected:
            text += f" (expected one of: {', '.join(expected)})"
        super().__init__(text)


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class Token:
    kind: str  # num, ident, op, end
    text: str
    column: int


def tokenize(text: str, line: int = 1, column: int = 1) -> list[Token]:
    pos = 0
    out = []
    while True:
        while pos < len(text) and text[pos] in " \t\r":
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", line, column + pos,
                             ("number", "identifier", "operator"))
        kind = m.lastgroup
        start = m.start(kind)
        out.append(Token(kind, m.group(kind), column + start))
        pos = m.end()
    out.append(Token("end", "", column + len(text)))
    return out


class Combo:
    """Formal sum of basis monomials with Scalar coefficients.

    Keys are ``('d', I)`` for forms ``dx^I`` and ``('e', J)`` for
    multivectors; the scalar part sits under ``('d', ())`` unless the
    combination is purely multivector, in which case it lives under
    ``('e', ())``.  Scalars are kept as plain :class:`Scalar` until they
    meet a basis element.
    """

    __slots__ = ("chart", "terms")

    def __init__(self, chart: Chart, terms: Mapping[tuple, Scalar]):
        self.chart = chart
        self.terms = {k: v for k, v in terms.items() if not v.is_zero()}

    def kinds(self) -> set[str]:
        return {k[0] for k, _ in self.terms.items() if k[1]}

    def scaled(self, s: Scalar) -> "Combo":
        return Combo(self.chart, {k: v * s for k, v in self.terms.items()})

    def __add__(self, other: "Combo") -> "Combo":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return Combo(self.chart, out)

    def neg(self) -> "Combo":
        return Combo(self.chart, {k: -v for k, v in self.terms.items()})


def _merge(a: tuple, b: tuple) -> tuple[int, tuple]:
    """Sign and sorted union of two increasing index tuples (0 sign on overlap)."""
    if set(a) & set(b):
        return 0, ()
    seq = list(a) + list(b)
    sign = 1
    # count inversions
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign, tuple(sorted(seq))


def _scalar_to_combo(s: Scalar, kind: str) -> Combo:
    return Combo(s.chart, {(kind, ()): s})


class ExprParser:
    def __init__(self, text: str, chart: Chart, env: Optional[Mapping[str, object]] = None,
                 line: int = 1, column: int = 1, allow_basis: bool = True):
        self.chart = chart
        self.env = dict(env or {})
        self.line = line
        self.tokens = tokenize(text, line, column)
        self.pos = 0
        self.allow_basis = allow_basis

    # -- token helpers --------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message: str, expected=(), tok: Token | None = None):
        t = tok or self.tok
        return ParseError(message, self.line, t.column, expected)

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.pos += 1
            return True
        return False

    # -- grammar --------------------------------------------------------
    def parse(self):
        if self.tok.kind == "end":
            raise self.error("empty expression", ("number", "identifier", "(", "-"))
        value = self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected token {self.tok.text!r}", ("+", "-", "*", "/", "^", "end of expression"))
        return value

    def expr(self):
        value = self.term()
        while True:
            if self.accept("+"):
                value = self.add(value, self.term())
            elif self.accept("-"):
                value = self.add(value, self.negate(self.term()))
            else:
                return value

    def _starts_atom(self) -> bool:
        t = self.tok
        return t.kind in ("num", "ident") or (t.kind == "op" and t.text == "(")

    def term(self):
        value = self.unary()
        while True:
            op_tok = self.tok
            if self.accept("*"):
                value = self.mul(value, self.unary(), op_tok)
            elif self.accept("/"):
                value = self.div(value, self.unary(), op_tok)
            elif self._starts_atom():
                value = self.mul(value, self.unary(), op_tok)
            else:
                return value

    def unary(self):
        if self.accept("-"):
            return self.negate(self.unary())
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self):
        base_tok = self.tok
        base = self.atom()
        op_tok = self.tok
        if self.accept("^"):
            exponent = self.unary()
            return self.pow(base, exponent, op_tok, base_tok)
        return base

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.pos += 1
            return Scalar.const(self.chart, _number(t.text))
        if t.kind == "ident":
            self.pos += 1
            return self.resolve(t)
        if self.accept("("):
            value = self.expr()
            if not self.accept(")"):
                raise self.error("missing closing parenthesis", (")",))
            return value
        raise self.error(f"unexpected token {t.text or 'end of input'!r}", ("number", "identifier", "("))

    # -- semantics ------------------------------------------------------
    def resolve(self, t: Token):
        name = t.text
        ch = self.chart
        if name in self.env:
            return self.env[name]
        if name in ch.names:
            return ch.coord(name)
        if name in ch.radical_names:
            return ch.radical(name)
        if len(name) > 1 and name[0] in "de":
            coord = name[1:]
            if coord in ch.names:
                if not self.allow_basis:
                    raise self.error(f"basis symbol {name!r} not allowed here", tok=t)
                kind = name[0]
                return Combo(ch, {(kind, (ch.coord_index(coord),)): ch.one})
            raise self.error(f"unknown identifier {name!r} (no coordinate {coord!r} declared)", tok=t)
        raise self.error(f"unknown identifier {name!r}", tok=t)

    def add(self, a, b):
        if isinstance(a, Scalar) and isinstance(b, Scalar):
            return a + b
        a, b = self.as_combo(a, b), self.as_combo(b, a)
        return a + b

    def as_combo(self, v, other) -> Combo:
        if isinstance(v, Combo):
            return v
        kinds = other.kinds() if isinstance(other, Combo) else set()
        kind = "e" if kinds == {"e"} else "d"
        return _scalar_to_combo(v, kind)

    def negate(self, v):
        return -v if isinstance(v, Scalar) else v.neg()

    def mul(self, a, b, tok: Token):
        if isinstance(a, Scalar) and isinstance(b, Scalar):
            return a * b
        if isinstance(a, Scalar):
            return b.scaled(a)
        if isinstance(b, Scalar):
            return a.scaled(b)
        return self.wedge(a, b, tok)

    def div(self, a, b, tok: Token):
        if not isinstance(b, Scalar):
            raise self.error("division by a non-scalar", tok=tok)
        if b.is_zero():
            raise self.error("division by zero", tok=tok)
        return a / b if isinstance(a, Scalar) else a.scaled(b.inverse())

    def wedge(self, a: Combo, b: Combo, tok: Token) -> Combo:
        ka, kb = a.kinds(), b.kinds()
        if ka and kb and ka != kb:
            raise self.error("cannot wedge forms with vectors", tok=tok)
        kind = (ka or kb or {"d"}).pop()
        out: dict = {}
        for (k1, i1), c1 in a.terms.items():
            for (k2, i2), c2 in b.terms.items():
                sign, idx = _merge(i1, i2)
                if sign == 0:
                    continue
                key = (kind, idx)
                v = c1 * c2 if sign > 0 else -(c1 * c2)
                out[key] = out[key] + v if key in out else v
        return Combo(self.chart, out)

    def pow(self, base, exponent, tok: Token, base_tok: Token):
        if isinstance(base, Combo):
            if not isinstance(exponent, Combo):
                raise self.error("'^' after a basis symbol expects another basis symbol", tok=tok)
            return self.wedge(base, exponent, tok)
        if isinstance(exponent, Combo):
            return self.mul(base, exponent, tok)
        if not exponent.is_constant():
            raise self.error("exponent must be an integer constant", tok=tok)
        e = exponent.constant_value()
        if e.denominator != 1:
            raise self.error("exponent must be an integer", tok=tok)
        try:
            return base ** int(e)
        except ZeroDivisionError:
            raise self.error("negative power of zero", tok=base_tok) from None


def _number(text: str) -> Fraction:
    return Fraction(text)


def parse_value(text: str, chart: Chart, env=None, line: int = 1, column: int = 1):
    """Parse to a :class:`Scalar` or :class:`Combo`."""
    return ExprParser(text, chart, env, line, column).parse()


def parse_scalar(text: str, chart: Chart, env=None, line: int = 1, column: int = 1) -> Scalar:
    value = ExprParser(text, chart, env, line, column, allow_basis=False).parse()
    if not isinstance(value, Scalar):
        raise ParseError("expected a scalar expression", line, column)
    return value
