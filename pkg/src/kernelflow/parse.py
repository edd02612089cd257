"""Expression parser producing exact Taylor jets.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom (('^' | '**') exponent)?
    exponent := ['-'] INT | '(' ['-'] INT ')'
    atom   := NUMBER | 'x' | 'y' | FUNC '(' expr ')' | '(' expr ')'
    FUNC   := exp | sin | cos

Numbers may be integers or decimals (``0.25`` is read as 1/4).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from kernelflow.jet import Jet, JetError


class ParseError(JetError):
    """Syntax error, reported with the 0-based character offset."""

    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


@dataclass(frozen=True)
class _Token:
    kind: str
    value: str
    pos: int


_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:\.\d*)?|\.\d+)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|[-+*/^(),])
""", re.VERBOSE)

FUNCTIONS = ("exp", "sin", "cos")


def _tokenize(text: str) -> list[_Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            out.append(_Token(kind, m.group(), pos))
        pos = m.end()
    out.append(_Token("end", "", len(text)))
    return out


def exp_series(u: Jet) -> Jet:
    """Maclaurin series of exp(u); ``u`` must vanish at the origin."""
    _check_origin(u, "exp")
    out = Jet.const(1, u.order)
    p = Jet.const(1, u.order)
    for n in range(1, u.order + 1):
        p = p * u
        if p.is_zero():
            break
        out = out + p.scale(Fraction(1, factorial(n)))
    return out


def sin_series(u: Jet) -> Jet:
    _check_origin(u, "sin")
    return _trig(u, start=1)


def cos_series(u: Jet) -> Jet:
    _check_origin(u, "cos")
    return _trig(u, start=0)


def _trig(u: Jet, start: int) -> Jet:
    out = Jet.zero(u.order)
    u2 = u * u
    p = u if start == 1 else Jet.const(1, u.order)
    n, sign = start, 1
    while n <= u.order and not p.is_zero():
        out = out + p.scale(Fraction(sign, factorial(n)))
        p = p * u2
        n += 2
        sign = -sign
    return out


def _check_origin(u: Jet, name: str) -> None:
    if u.constant:
        raise JetError(
            f"{name}() argument has constant term {u.constant}; the expansion would need "
            f"{name}({u.constant}), which is not rational. Pre-multiply by the constant factor "
            "or shift the argument so it vanishes at the origin")


_SERIES = {"exp": exp_series, "sin": sin_series, "cos": cos_series}


class _Parser:
    def __init__(self, text: str, order: int):
        self.text = text
        self.order = order
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, value: str) -> _Token:
        if self.tok.value != value:
            got = self.tok.value or "end of input"
            raise ParseError(f"expected {value!r}, got {got!r}", self.tok.pos, self.text)
        return self.advance()

    def error(self, message: str, tok: _Token | None = None):
        tok = tok or self.tok
        return ParseError(message, tok.pos, self.text)

    def parse(self) -> Jet:
        if self.tok.kind == "end":
            raise self.error("empty expression")
        out = self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.value!r}")
        return out

    def expr(self) -> Jet:
        out = self.term()
        while self.tok.value in ("+", "-"):
            op = self.advance().value
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> Jet:
        out = self.unary()
        while self.tok.value in ("*", "/"):
            op_tok = self.advance()
            rhs = self.unary()
            if op_tok.value == "*":
                out = out * rhs
            else:
                if not rhs.constant:
                    raise self.error("division by a series with zero constant term", op_tok)
                out = out / rhs
        return out

    def unary(self) -> Jet:
        if self.tok.value == "-":
            self.advance()
            return -self.unary()
        if self.tok.value == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> Jet:
        base = self.atom()
        if self.tok.value in ("^", "**"):
            op_tok = self.advance()
            e = self.exponent()
            if e < 0 and not base.constant:
                raise self.error("negative power of a series with zero constant term", op_tok)
            return base ** e
        return base

    def exponent(self) -> int:
        paren = self.tok.value == "("
        if paren:
            self.advance()
        sign = 1
        if self.tok.value == "-":
            self.advance()
            sign = -1
        tok = self.tok
        if tok.kind != "num" or not tok.value.isdigit():
            raise self.error("non-integer exponent", tok)
        self.advance()
        if paren:
            if self.tok.value != ")":
                raise self.error("non-integer exponent")
            self.advance()
        return sign * int(tok.value)

    def atom(self) -> Jet:
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return Jet.const(Fraction(tok.value), self.order)
        if tok.kind == "name":
            self.advance()
            if tok.value == "x":
                return Jet.x(self.order)
            if tok.value == "y":
                return Jet.y(self.order)
            if tok.value in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                try:
                    return _SERIES[tok.value](arg)
                except JetError as exc:
                    raise ParseError(str(exc), tok.pos, self.text) from exc
            raise self.error(f"unknown name {tok.value!r}", tok)
        if tok.value == "(":
            self.advance()
            out = self.expr()
            self.expect(")")
            return out
        raise self.error(f"unexpected {tok.value or 'end of input'!r}", tok)


def parse_expr(text: str, order: int) -> Jet:
    """Parse ``text`` into its order-``order`` Taylor jet at the origin.

    >>> str(parse_expr("(2+x*y)*(1+2*x)", 3))
    '2 + 4*x + x*y + 2*x^2*y'
    """
    if order < 0:
        raise JetError("order must be nonnegative")
    return _Parser(text, order).parse()
