from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from support import P
from kernelflow.jet import Jet, JetError
from kernelflow.parse import ParseError, parse_expr


def sympy_oracle(text: str, order: int) -> Jet:
    """Independent Taylor expansion by sympy, via the scaling trick x -> t x."""
    x, y, t = sympy.symbols("x y t")
    expr = sympy.sympify(text.replace("^", "**"))
    ser = sympy.series(expr.subs({x: t * x, y: t * y}), t, 0, order + 1).removeO()
    poly = sympy.Poly(sympy.expand(ser.subs(t, 1)), x, y)
    return Jet({m: Fraction(int(c.p), int(c.q)) for m, c in poly.terms()}, order)


def test_product_example():
    # the exact value of the product truncated at degree 3
    assert parse_expr("(2+x*y)*(1+2*x)", 3) == Jet({(0, 0): 2, (1, 0): 4, (1, 1): 1, (2, 1): 2}, 3)


def test_zero():
    assert parse_expr("0", 5) == Jet.zero(5)


def test_exp_example():
    assert parse_expr("exp(x)*(2*x+y+x^2)", 2) == P("2*x + y + 3*x^2 + x*y", 2)


@pytest.mark.parametrize("text", [
    "exp(x)*(2*x+y+x^2)", "sin(x+y)*cos(x*y)", "1/(1 - x - y^2)", "exp(x^2)*cos(y)",
    "(1+x)^(-2)", "x + y^2*cos(y)", "sin(x)^3 - y/(2+x)",
])
def test_against_sympy_series(text):
    assert parse_expr(text, 7) == sympy_oracle(text, 7)


def test_power_syntax():
    assert P("x**3", 5) == P("x^3", 5)
    assert P("2^3", 2) == Jet.const(8, 2)
    assert P("0.25*x", 2) == Jet({(1, 0): Fraction(1, 4)}, 2)


@pytest.mark.parametrize("text, pos", [("x +* y", 3), ("(x + y", 6), ("x $ y", 2), ("foo(x)", 0)])
def test_syntax_errors_report_position(text, pos):
    with pytest.raises(ParseError) as info:
        parse_expr(text, 4)
    assert info.value.position == pos


def test_division_by_nonunit():
    with pytest.raises(JetError, match="zero constant term"):
        parse_expr("1/(x+y)", 4)


def test_non_integer_exponent():
    with pytest.raises(JetError, match="non-integer exponent"):
        parse_expr("x^(1/2)", 4)
    with pytest.raises(JetError, match="non-integer exponent"):
        parse_expr("x^y", 4)


def test_transcendental_needs_zero_constant():
    with pytest.raises(JetError):
        parse_expr("exp(1+x)", 4)


@given(st.sampled_from(["1+x", "x*y-2", "exp(x)", "cos(x-y)", "3 - y^2", "1/(1+x)"]),
       st.sampled_from(["y", "2+x*y", "sin(y)", "1 - x + x^3"]))
def test_parse_of_product_is_product_of_parses(a, b):
    assert parse_expr(f"({a})*({b})", 6) == parse_expr(a, 6) * parse_expr(b, 6)
