"""
Endpoint Expression Language for FuzzyCesaro
Parses and evaluates arithmetic formulas in x and alpha so fuzzy-number-valued
functions can be defined from the command line or a catalog manifest
"""

import math
import re
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, List, Optional, Tuple, Union

import numpy as np

ArrayLike = Union[float, np.ndarray]

VARIABLES = frozenset({"x", "alpha"})


class ExpressionSyntaxError(ValueError):
    """Malformed expression text; offset is the byte position of the problem"""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownIdentifierError(ExpressionSyntaxError):
    """Identifier that is neither a variable nor a known function"""


class ExpressionDomainError(ValueError):
    """Evaluation left the real domain of an operation"""

    def __init__(self, message: str, subexpression: str):
        super().__init__(f"{message} in '{subexpression}'")
        self.subexpression = subexpression


# Abstract syntax tree

class Expr:
    """Base class for expression nodes"""

    def to_source(self) -> str:
        raise NotImplementedError

    def _eval(self, x: np.ndarray, alpha: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.to_source()


@dataclass(frozen=True)
class Number(Expr):
    value: float

    def to_source(self) -> str:
        return repr(float(self.value))

    def _eval(self, x, alpha):
        return np.float64(self.value)


@dataclass(frozen=True)
class Variable(Expr):
    name: str

    def to_source(self) -> str:
        return self.name

    def _eval(self, x, alpha):
        return x if self.name == "x" else alpha


@dataclass(frozen=True)
class Negate(Expr):
    operand: Expr

    def to_source(self) -> str:
        return f"(-{self.operand.to_source()})"

    def _eval(self, x, alpha):
        return -self.operand._eval(x, alpha)


@dataclass(frozen=True)
class BinaryOp(Expr):
    op: str
    left: Expr
    right: Expr

    def to_source(self) -> str:
        return f"({self.left.to_source()} {self.op} {self.right.to_source()})"

    def _eval(self, x, alpha):
        left = self.left._eval(x, alpha)
        right = self.right._eval(x, alpha)
        if self.op == "+":
            return left + right
        if self.op == "-":
            return left - right
        if self.op == "*":
            return left * right
        if self.op == "/":
            if np.any(right == 0):
                raise ExpressionDomainError("division by zero", self.to_source())
            return left / right
        # "^"
        if np.any((left < 0) & (right != np.floor(right))):
            raise ExpressionDomainError("non-integer power of a negative base", self.to_source())
        if np.any((left == 0) & (right < 0)):
            raise ExpressionDomainError("division by zero", self.to_source())
        return np.power(left, right)


# name -> (ufunc, domain violation test, error message)
FUNCTIONS: Dict[str, Tuple[Callable, Optional[Callable], str]] = {
    "sin": (np.sin, None, ""),
    "cos": (np.cos, None, ""),
    "exp": (np.exp, None, ""),
    "abs": (np.abs, None, ""),
    "ln": (np.log, lambda v: v <= 0, "logarithm of a non-positive number"),
    "sqrt": (np.sqrt, lambda v: v < 0, "square root of a negative number"),
}


@dataclass(frozen=True)
class FunctionCall(Expr):
    name: str
    argument: Expr

    def to_source(self) -> str:
        return f"{self.name}({self.argument.to_source()})"

    def _eval(self, x, alpha):
        func, invalid, reason = FUNCTIONS[self.name]
        value = self.argument._eval(x, alpha)
        if invalid is not None and np.any(invalid(value)):
            raise ExpressionDomainError(reason, self.to_source())
        return func(value)


# Tokenizer

@dataclass(frozen=True)
class Token:
    kind: str  # number, ident, op, lparen, rparen, end
    text: str
    offset: int


TOKEN_PATTERN = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^])"
    r"|(?P<lparen>\()"
    r"|(?P<rparen>\)))"
)


def tokenize(text: str) -> List[Token]:
    tokens = []
    position = 0
    while position < len(text):
        if text[position:].strip() == "":
            break
        match = TOKEN_PATTERN.match(text, position)
        if match is None or match.end() == position:
            offset = position + (len(text[position:]) - len(text[position:].lstrip()))
            raise ExpressionSyntaxError(f"unexpected character {text[offset]!r}", _byte_offset(text, offset))
        kind = match.lastgroup
        tokens.append(Token(kind, match.group(kind), _byte_offset(text, match.start(kind))))
        position = match.end()
    tokens.append(Token("end", "", _byte_offset(text, len(text))))
    return tokens


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


# Pratt parser: ^ (right) binds tighter than unary minus, then * /, then + -

BINDING_POWER = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 30}
UNARY_MINUS_POWER = 25


class Parser:
    """Top-down operator precedence parser over a token list"""

    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.position = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.position]

    def advance(self) -> Token:
        token = self.current
        if token.kind != "end":
            self.position += 1
        return token

    def parse(self) -> Expr:
        expr = self.expression(0)
        if self.current.kind != "end":
            raise ExpressionSyntaxError(f"unexpected {self.current.text!r}", self.current.offset)
        return expr

    def expression(self, rbp: int) -> Expr:
        left = self.nud(self.advance())
        while self.current.kind == "op" and rbp < BINDING_POWER[self.current.text]:
            token = self.advance()
            left = self.led(token, left)
        return left

    def nud(self, token: Token) -> Expr:
        if token.kind == "number":
            value = float(token.text)
            if not math.isfinite(value):
                raise ExpressionSyntaxError(f"numeric literal {token.text!r} overflows", token.offset)
            return Number(value)
        if token.kind == "ident":
            return self._identifier(token)
        if token.kind == "op" and token.text == "-":
            return Negate(self.expression(UNARY_MINUS_POWER))
        if token.kind == "lparen":
            return self._group(token)
        if token.kind == "end":
            raise ExpressionSyntaxError("unexpected end of input", token.offset)
        raise ExpressionSyntaxError(f"unexpected {token.text!r}", token.offset)

    def led(self, token: Token, left: Expr) -> Expr:
        power = BINDING_POWER[token.text]
        if token.text == "^":
            # right associative
            return BinaryOp("^", left, self.expression(power - 1))
        return BinaryOp(token.text, left, self.expression(power))

    def _group(self, opening: Token) -> Expr:
        if self.current.kind == "end":
            raise ExpressionSyntaxError("unclosed '('", opening.offset)
        inner = self.expression(0)
        closing = self.advance()
        if closing.kind == "end":
            raise ExpressionSyntaxError("unclosed '('", opening.offset)
        if closing.kind != "rparen":
            raise ExpressionSyntaxError(f"expected ')' but found {closing.text!r}", closing.offset)
        return inner

    def _identifier(self, token: Token) -> Expr:
        if token.text in VARIABLES:
            return Variable(token.text)
        if token.text in FUNCTIONS:
            opening = self.advance()
            if opening.kind != "lparen":
                raise ExpressionSyntaxError(f"expected '(' after {token.text}", opening.offset)
            return FunctionCall(token.text, self._group(opening))
        raise UnknownIdentifierError(f"unknown identifier {token.text!r}", token.offset)


def parse(text: str) -> Expr:
    """Parse expression text into an immutable syntax tree"""
    return Parser(text).parse()


def to_source(expr: Expr) -> str:
    return expr.to_source()


def variables(expr: Expr) -> FrozenSet[str]:
    """Identifiers of variables referenced by the expression"""
    if isinstance(expr, Variable):
        return frozenset({expr.name})
    if isinstance(expr, Negate):
        return variables(expr.operand)
    if isinstance(expr, BinaryOp):
        return variables(expr.left) | variables(expr.right)
    if isinstance(expr, FunctionCall):
        return variables(expr.argument)
    return frozenset()


def evaluate(expr: Expr, x: ArrayLike, alpha: ArrayLike) -> ArrayLike:
    """
    Evaluate in IEEE double precision

    Scalars in give a float out; arrays broadcast against each other, so a
    column of x nodes and a row of alpha levels evaluate a whole block at once.
    """
    x_values = np.asarray(x, dtype=float)
    alpha_values = np.asarray(alpha, dtype=float)
    if np.any(x_values < 0):
        raise ExpressionDomainError("x must be nonnegative", expr.to_source())
    if np.any((alpha_values < 0) | (alpha_values > 1)):
        raise ExpressionDomainError("alpha must lie in [0, 1]", expr.to_source())

    with np.errstate(all="ignore"):
        value = expr._eval(x_values, alpha_values)

    shape = np.broadcast(x_values, alpha_values).shape
    if shape == ():
        return float(value)
    return np.array(np.broadcast_to(value, shape), dtype=float)
