"""
Expression Language Service - parse and exactly differentiate function expressions

Users supply single-variable functions (theta_1, theta_2, pressure laws,
density factors) as text over the formal variable ``s``. Expressions are parsed
into an immutable tree and differentiated in forward mode: every node is
evaluated on a truncated Taylor series, so derivatives up to order 4 are exact
up to rounding.

Grammar (standard precedence, left associativity)::

    expr     := term (("+" | "-") term)*
    term     := unary (("*" | "/") unary)*
    unary    := "-" unary | power
    power    := primary ("^" exponent)*
    exponent := "-"? primary            (must be constant)
    primary  := NUMBER | "s" | FUNC "(" expr ")" | "(" expr ")"
"""

import logging
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, FrozenSet, List, Tuple, Union

import numpy as np

from ..core.errors import DomainError, ExpressionSyntaxError, InvalidParameter

logger = logging.getLogger(__name__)

VARIABLE = "s"
MAX_ORDER = 4
FUNCTIONS = ("exp", "ln", "sin", "cos", "sinh", "cosh", "sqrt")

_PRIMARY_START = frozenset({"number", VARIABLE, "(", *FUNCTIONS})
_OPERAND_START = _PRIMARY_START | {"-"}


# ---------------------------------------------------------------------------
# Expression tree
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Power:
    base: "Node"
    exponent: float


@dataclass(frozen=True)
class Call:
    name: str
    arg: "Node"


Node = Union[Num, Var, Neg, Binary, Power, Call]


# ---------------------------------------------------------------------------
# Truncated Taylor arithmetic (coefficients c_k = f^(k)(x) / k!)
# ---------------------------------------------------------------------------


def _mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.convolve(a, b)[: len(a)]


def _div(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if b[0] == 0.0:
        raise DomainError("division by zero")
    c = np.zeros_like(a)
    for k in range(len(a)):
        c[k] = (a[k] - np.dot(b[1 : k + 1], c[k - 1 :: -1][:k])) / b[0]
    return c


def _exp(a: np.ndarray) -> np.ndarray:
    e = np.zeros_like(a)
    try:
        e[0] = math.exp(a[0])
    except OverflowError:
        raise DomainError("exp overflow", context={"argument": a[0]})
    for k in range(1, len(a)):
        j = np.arange(1, k + 1)
        e[k] = np.dot(j * a[1 : k + 1], e[k - 1 :: -1][:k]) / k
    return e


def _ln(a: np.ndarray) -> np.ndarray:
    if a[0] <= 0.0:
        raise DomainError("logarithm of a non-positive value", context={"argument": a[0]})
    g = np.zeros_like(a)
    g[0] = math.log(a[0])
    for k in range(1, len(a)):
        j = np.arange(1, k)
        g[k] = (a[k] - np.dot(j * g[1:k], a[k - 1 : 0 : -1][: k - 1]) / k) / a[0]
    return g


def _sin_cos(a: np.ndarray, hyperbolic: bool) -> Tuple[np.ndarray, np.ndarray]:
    s = np.zeros_like(a)
    c = np.zeros_like(a)
    if hyperbolic:
        s[0], c[0] = math.sinh(a[0]), math.cosh(a[0])
    else:
        s[0], c[0] = math.sin(a[0]), math.cos(a[0])
    sign = 1.0 if hyperbolic else -1.0
    for k in range(1, len(a)):
        j = np.arange(1, k + 1)
        weights = j * a[1 : k + 1]
        s[k] = np.dot(weights, c[k - 1 :: -1][:k]) / k
        c[k] = sign * np.dot(weights, s[k - 1 :: -1][:k]) / k
    return s, c


def _int_pow(a: np.ndarray, n: int) -> np.ndarray:
    result = np.zeros_like(a)
    result[0] = 1.0
    base = a
    m = abs(n)
    while m:
        if m & 1:
            result = _mul(result, base)
        base = _mul(base, base)
        m >>= 1
    if n < 0:
        one = np.zeros_like(a)
        one[0] = 1.0
        return _div(one, result)
    return result


def _pow(a: np.ndarray, q: float) -> np.ndarray:
    if float(q).is_integer():
        return _int_pow(a, int(q))
    if a[0] <= 0.0:
        raise DomainError("fractional power of a non-positive value", context={"base": a[0], "exponent": q})
    return _exp(q * _ln(a))


def _sqrt(a: np.ndarray) -> np.ndarray:
    if a[0] <= 0.0:
        raise DomainError("square root of a non-positive value", context={"argument": a[0]})
    return _exp(0.5 * _ln(a))


_CALLS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "exp": _exp,
    "ln": _ln,
    "sqrt": _sqrt,
    "sin": lambda a: _sin_cos(a, hyperbolic=False)[0],
    "cos": lambda a: _sin_cos(a, hyperbolic=False)[1],
    "sinh": lambda a: _sin_cos(a, hyperbolic=True)[0],
    "cosh": lambda a: _sin_cos(a, hyperbolic=True)[1],
}


def _taylor(node: Node, x: np.ndarray) -> np.ndarray:
    """Evaluate ``node`` on the Taylor series ``x`` of the formal variable"""
    if isinstance(node, Num):
        out = np.zeros_like(x)
        out[0] = node.value
        return out
    if isinstance(node, Var):
        return x
    if isinstance(node, Neg):
        return -_taylor(node.operand, x)
    if isinstance(node, Binary):
        left = _taylor(node.left, x)
        right = _taylor(node.right, x)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return _mul(left, right)
        return _div(left, right)
    if isinstance(node, Power):
        return _pow(_taylor(node.base, x), node.exponent)
    return _CALLS[node.name](_taylor(node.arg, x))


def _contains_variable(node: Node) -> bool:
    if isinstance(node, Var):
        return True
    if isinstance(node, Num):
        return False
    if isinstance(node, Neg):
        return _contains_variable(node.operand)
    if isinstance(node, Binary):
        return _contains_variable(node.left) or _contains_variable(node.right)
    if isinstance(node, Power):
        return _contains_variable(node.base)
    return _contains_variable(node.arg)


def _render(node: Node) -> str:
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        return VARIABLE
    if isinstance(node, Neg):
        return f"(-{_render(node.operand)})"
    if isinstance(node, Binary):
        return f"({_render(node.left)} {node.op} {_render(node.right)})"
    if isinstance(node, Power):
        return f"({_render(node.base)}^({float(node.exponent)!r}))"
    return f"{node.name}({_render(node.arg)})"


# ---------------------------------------------------------------------------
# Public type
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FuncExpr:
    """Parsed single-variable function with exact derivative evaluation"""

    root: Node
    source: str

    def jet(self, x: float, order: int = 2) -> List[float]:
        """Value and derivatives up to ``order`` at ``x``"""
        return eval_jet1(self, x, order)

    def __call__(self, x: float) -> float:
        return eval_jet1(self, x, 0)[0]

    @property
    def is_constant(self) -> bool:
        return not _contains_variable(self.root)

    def render(self) -> str:
        return _render(self.root)

    def __str__(self) -> str:
        return self.source


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "number" | "ident" | "op" | "end" | "invalid"
    text: str
    pos: int


def _tokenize(src: str) -> List[_Token]:
    tokens: List[_Token] = []
    pos = 0
    while True:
        while pos < len(src) and src[pos].isspace():
            pos += 1
        if pos >= len(src):
            tokens.append(_Token("end", "", pos))
            return tokens
        match = _TOKEN_RE.match(src, pos)
        if match is None or match.end() == pos:
            tokens.append(_Token("invalid", src[pos], pos))
            tokens.append(_Token("end", "", len(src)))
            return tokens
        kind = match.lastgroup
        text = match.group(kind)
        tokens.append(_Token(kind, text, match.start(kind)))
        pos = match.end()


class _Parser:
    """Recursive-descent parser over the token list"""

    def __init__(self, src: str):
        self.src = src
        self.tokens = _tokenize(src)
        self.index = 0
        self.depth = 0

    def _peek(self) -> _Token:
        return self.tokens[self.index]

    def _advance(self) -> _Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def _fail(self, message: str, token: _Token, expected: FrozenSet[str]):
        offset = len(self.src[: token.pos].encode("utf-8"))
        raise ExpressionSyntaxError(message, offset, expected)

    def _after_operand(self) -> FrozenSet[str]:
        expected = {"+", "-", "*", "/", "^"}
        expected.add(")" if self.depth else "end")
        return frozenset(expected)

    def parse(self) -> Node:
        node = self._expr()
        token = self._peek()
        if token.kind != "end":
            self._fail(f"unexpected {token.text!r}", token, self._after_operand())
        return node

    def _expr(self) -> Node:
        node = self._term()
        while self._peek().kind == "op" and self._peek().text in "+-":
            op = self._advance().text
            node = Binary(op, node, self._term())
        return node

    def _term(self) -> Node:
        node = self._unary()
        while self._peek().kind == "op" and self._peek().text in "*/":
            op = self._advance().text
            node = Binary(op, node, self._unary())
        return node

    def _unary(self) -> Node:
        token = self._peek()
        if token.kind == "op" and token.text == "-":
            self._advance()
            return Neg(self._unary())
        return self._power()

    def _power(self) -> Node:
        node = self._primary()
        while self._peek().kind == "op" and self._peek().text == "^":
            self._advance()
            node = Power(node, self._exponent())
        return node

    def _exponent(self) -> float:
        start = self._peek()
        negative = start.kind == "op" and start.text == "-"
        if negative:
            self._advance()
        node = self._primary()
        if _contains_variable(node):
            self._fail("exponent must be constant", start, frozenset({"number", "("}))
        try:
            value = float(_taylor(node, np.zeros(1))[0])
        except DomainError:
            self._fail("exponent is not a finite constant", start, frozenset({"number", "("}))
        if not math.isfinite(value):
            self._fail("exponent is not a finite constant", start, frozenset({"number", "("}))
        return -value if negative else value

    def _primary(self) -> Node:
        token = self._peek()
        if token.kind == "number":
            self._advance()
            return Num(float(token.text))
        if token.kind == "ident":
            if token.text == VARIABLE:
                self._advance()
                return Var()
            if token.text in FUNCTIONS:
                self._advance()
                opening = self._peek()
                if not (opening.kind == "op" and opening.text == "("):
                    self._fail(f"expected '(' after {token.text}", opening, frozenset({"("}))
                self._advance()
                return Call(token.text, self._group())
            self._fail(f"unknown identifier {token.text!r}", token, _PRIMARY_START)
        if token.kind == "op" and token.text == "(":
            self._advance()
            return self._group()
        described = "end of input" if token.kind == "end" else repr(token.text)
        self._fail(f"unexpected {described}", token, _OPERAND_START)

    def _group(self) -> Node:
        self.depth += 1
        node = self._expr()
        closing = self._peek()
        if not (closing.kind == "op" and closing.text == ")"):
            self._fail("unbalanced parenthesis", closing, self._after_operand())
        self._advance()
        self.depth -= 1
        return node


@lru_cache(maxsize=512)
def parse_expr(src: str) -> FuncExpr:
    """
    Parse function expression text over the variable ``s``

    Args:
        src: Expression text, e.g. ``"sin(s) + 2*s"``

    Returns:
        Immutable FuncExpr

    Raises:
        ExpressionSyntaxError: with byte offset and expected-token set
    """
    if not isinstance(src, str) or not src.strip():
        raise ExpressionSyntaxError("empty expression", 0, _OPERAND_START)
    root = _Parser(src).parse()
    logger.debug(f"Parsed expression {src!r} as {_render(root)}")
    return FuncExpr(root=root, source=src)


def eval_jet1(e: FuncExpr, x: float, order: int) -> List[float]:
    """
    Evaluate value and exact derivatives of ``e`` at ``x``

    Args:
        e: Parsed expression
        x: Evaluation point
        order: Highest derivative (0..4)

    Returns:
        [e(x), e'(x), ..., e^(order)(x)]

    Raises:
        DomainError: log of non-positive, division by zero, fractional power of negative
    """
    if not 0 <= order <= MAX_ORDER:
        raise InvalidParameter(f"derivative order must be in 0..{MAX_ORDER}", context={"order": order})
    series = np.zeros(order + 1)
    series[0] = float(x)
    if order:
        series[1] = 1.0
    with np.errstate(over="raise", invalid="raise"):
        try:
            coefficients = _taylor(e.root, series)
        except FloatingPointError as exc:
            raise DomainError(f"non-finite value evaluating {e.source!r}", context={"x": x}) from exc
    if not np.all(np.isfinite(coefficients)):
        raise DomainError(f"non-finite value evaluating {e.source!r}", context={"x": x})
    return [float(c) * math.factorial(k) for k, c in enumerate(coefficients)]


def render(e: FuncExpr) -> str:
    """Fully parenthesized text that re-parses to the same function"""
    return e.render()


# ---------------------------------------------------------------------------
# Vectorized first-order evaluation (dual numbers over numpy arrays)
# ---------------------------------------------------------------------------


def _dual(node: Node, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(node, Num):
        return np.full_like(x, node.value), np.zeros_like(x)
    if isinstance(node, Var):
        return x, np.ones_like(x)
    if isinstance(node, Neg):
        a, da = _dual(node.operand, x)
        return -a, -da
    if isinstance(node, Binary):
        a, da = _dual(node.left, x)
        b, db = _dual(node.right, x)
        if node.op == "+":
            return a + b, da + db
        if node.op == "-":
            return a - b, da - db
        if node.op == "*":
            return a * b, da * b + a * db
        if np.any(b == 0.0):
            raise DomainError("division by zero")
        return a / b, (da * b - a * db) / (b * b)
    if isinstance(node, Power):
        a, da = _dual(node.base, x)
        q = node.exponent
        if float(q).is_integer():
            n = int(q)
            if n < 0 and np.any(a == 0.0):
                raise DomainError("division by zero")
            if n == 0:
                return np.ones_like(a), np.zeros_like(a)
            return a**n, n * a ** (n - 1) * da
        if np.any(a <= 0.0):
            raise DomainError("fractional power of a non-positive value")
        return a**q, q * a ** (q - 1.0) * da
    a, da = _dual(node.arg, x)
    name = node.name
    if name == "exp":
        e = np.exp(a)
        return e, e * da
    if name == "ln":
        if np.any(a <= 0.0):
            raise DomainError("logarithm of a non-positive value")
        return np.log(a), da / a
    if name == "sqrt":
        if np.any(a <= 0.0):
            raise DomainError("square root of a non-positive value")
        r = np.sqrt(a)
        return r, 0.5 * da / r
    if name == "sin":
        return np.sin(a), np.cos(a) * da
    if name == "cos":
        return np.cos(a), -np.sin(a) * da
    if name == "sinh":
        return np.sinh(a), np.cosh(a) * da
    return np.cosh(a), np.sinh(a) * da


def eval_array(e: FuncExpr, xs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Values and first derivatives of ``e`` over an array of points"""
    xs = np.asarray(xs, dtype=float)
    with np.errstate(over="raise", invalid="raise", divide="raise"):
        try:
            value, slope = _dual(e.root, xs)
        except FloatingPointError as exc:
            raise DomainError(f"non-finite value evaluating {e.source!r}") from exc
    return np.broadcast_to(value, xs.shape).astype(float), np.broadcast_to(slope, xs.shape).astype(float)
