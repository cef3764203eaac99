"""
Expression language tests
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings as hypothesis_settings, strategies as st

from core.expressions import (
    BinaryOp, ExpressionDomainError, ExpressionSyntaxError, FunctionCall, Negate, Number,
    UnknownIdentifierError, Variable, evaluate, parse, to_source, variables,
)


@pytest.mark.parametrize("text", [
    "cos(x) + alpha/(x+1)^2",
    "(2 - sin(x))*alpha",
    "cos(x) + (2-alpha)/(x+1)^2",
    "exp(-x) * sqrt(abs(alpha - 0.5)) + ln(1 + x)",
    "1.5e-3 * x",
])
def test_parses_endpoint_formulas(text):
    expr = parse(text)
    assert variables(expr) <= {"x", "alpha"}


def test_precedence():
    assert parse("x+alpha*x") == parse("x+(alpha*x)")
    assert parse("x - alpha - 1") == parse("(x - alpha) - 1")
    assert parse("2^3^2") == parse("2^(3^2)")
    assert parse("-x^2") == Negate(BinaryOp("^", Variable("x"), Number(2.0)))
    assert parse("-x*2") == BinaryOp("*", Negate(Variable("x")), Number(2.0))


def test_whitespace_insensitive():
    assert parse("  cos( x )+alpha ") == parse("cos(x) + alpha")


@pytest.mark.parametrize("text,offset", [
    ("(", 0),
    ("", 0),
    ("x +", 3),
    ("x $ 1", 2),
    ("(x + 1", 0),
    ("x 1", 2),
    ("sin x", 4),
])
def test_syntax_errors_carry_offsets(text, offset):
    with pytest.raises(ExpressionSyntaxError) as error:
        parse(text)
    assert error.value.offset == offset
    assert f"offset {offset}" in str(error.value)


def test_offsets_are_in_bytes():
    with pytest.raises(ExpressionSyntaxError) as error:
        parse("α + x")
    assert error.value.offset == 0
    with pytest.raises(ExpressionSyntaxError) as error:
        parse("x +\u00a0$")
    assert error.value.offset == 5


@pytest.mark.parametrize("text,offset", [("x + 1e400", 4), ("1e999*alpha", 0)])
def test_overflowing_literals_are_rejected(text, offset):
    with pytest.raises(ExpressionSyntaxError) as error:
        parse(text)
    assert error.value.offset == offset


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifierError):
        parse("tan(x)")
    with pytest.raises(UnknownIdentifierError):
        parse("y + 1")


def test_evaluation_examples():
    assert evaluate(parse("cos(x)+alpha/(x+1)^2"), 0.0, 1.0) == 2.0
    assert evaluate(parse("2 - sin(x)"), 0.0, 0.0) == 2.0
    assert evaluate(parse("x"), 7.0, 0.3) == 7.0
    assert evaluate(parse("-2^2"), 0.0, 0.0) == -4.0


@pytest.mark.parametrize("text,subexpression", [
    ("ln(x - 1)", "ln((x - 1.0))"),
    ("sqrt(alpha - 1)", "sqrt((alpha - 1.0))"),
    ("1/(x - x)", "(1.0 / (x - x))"),
    ("(0 - 2)^alpha", "((0.0 - 2.0) ^ alpha)"),
    ("x^(0-1)", "(x ^ (0.0 - 1.0))"),
])
def test_domain_errors_name_the_subexpression(text, subexpression):
    with pytest.raises(ExpressionDomainError) as error:
        evaluate(parse(text), 0.0, 0.5)
    assert error.value.subexpression == subexpression


def test_negative_base_with_integer_exponent_is_allowed():
    assert evaluate(parse("(0-2)^3"), 0.0, 0.0) == -8.0


def test_rejects_points_outside_the_domain():
    expr = parse("x + alpha")
    with pytest.raises(ExpressionDomainError):
        evaluate(expr, -1.0, 0.5)
    with pytest.raises(ExpressionDomainError):
        evaluate(expr, 1.0, 1.5)


def test_array_evaluation_broadcasts():
    expr = parse("cos(x) + alpha/(x+1)^2")
    x = np.linspace(0.0, 10.0, 7)[:, None]
    alpha = np.linspace(0.0, 1.0, 5)[None, :]
    block = evaluate(expr, x, alpha)
    assert block.shape == (7, 5)
    assert block[3, 2] == pytest.approx(evaluate(expr, float(x[3, 0]), float(alpha[0, 2])), rel=1e-15)
    constant = evaluate(parse("2"), x, alpha)
    assert constant.shape == (7, 5) and np.all(constant == 2.0)


def test_to_source_is_fully_parenthesised():
    expr = parse("cos(x) + alpha/(x+1)^2")
    assert to_source(expr) == "(cos(x) + (alpha / ((x + 1.0) ^ 2.0)))"
    assert isinstance(parse("abs(x)"), FunctionCall)


# Randomized expression trees

leaves = st.one_of(
    st.floats(min_value=0.0, max_value=1e6, allow_nan=False, allow_infinity=False).map(Number),
    st.sampled_from(["x", "alpha"]).map(Variable),
)


def _extend(children):
    return st.one_of(
        children.map(Negate),
        st.tuples(st.sampled_from(["+", "-", "*", "/", "^"]), children, children).map(
            lambda parts: BinaryOp(*parts)),
        st.tuples(st.sampled_from(["sin", "cos", "exp", "abs", "ln", "sqrt"]), children).map(
            lambda parts: FunctionCall(*parts)),
    )


expressions = st.recursive(leaves, _extend, max_leaves=12)


@given(expressions)
@hypothesis_settings(max_examples=500, deadline=None)
def test_round_trip_through_source(expr):
    assert parse(to_source(expr)) == expr


@given(expressions, st.floats(min_value=0.0, max_value=50.0), st.floats(min_value=0.0, max_value=1.0))
@hypothesis_settings(max_examples=300, deadline=None)
def test_evaluation_is_pure(expr, x, alpha):
    try:
        first = evaluate(expr, x, alpha)
    except ExpressionDomainError:
        return
    second = evaluate(expr, x, alpha)
    assert math.isnan(first) and math.isnan(second) or \
        np.float64(first).tobytes() == np.float64(second).tobytes()
