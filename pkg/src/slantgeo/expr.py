"""Scalar expressions in chart coordinates with exact first derivatives.

Expressions are parsed from a small arithmetic language (``x1 .. xn`` for the
coordinates, ``pi`` and ``e`` as constants, ``sin cos exp ln sqrt``) into an
immutable tree.  :func:`eval_dual` evaluates a tree with forward-mode dual
numbers, so Jacobians and metric derivatives carry no truncation error.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | base ('^' ['-'] number)?
    base   := number | ident | '(' expr ')' | func '(' expr ')'
    func   := sin | cos | exp | ln | sqrt
    ident  := 'x' digits          (1-based coordinate index)
    number := decimal literal | pi | e
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterator, Sequence, Union

import numpy as np

__all__ = [
    "Const", "Var", "Unary", "Binary", "Power", "Expr",
    "ExprError", "ParseError", "DomainError",
    "DualValue", "ExprArray",
    "parse", "evaluate", "eval_dual", "to_text", "variables", "is_constant",
]

FUNCTIONS = ("sin", "cos", "exp", "ln", "sqrt")
CONSTANTS = {"pi": math.pi, "e": math.e}


class ExprError(ValueError):
    """Base class for expression errors."""


class ParseError(ExprError):
    """Malformed source text; ``offset`` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class DomainError(ExprError):
    """Evaluation left the domain of a partial function."""


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 0-based


@dataclass(frozen=True)
class Unary:
    op: str  # neg, sin, cos, exp, ln, sqrt
    arg: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # + - * /
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Power:
    base: "Expr"
    exponent: float


Expr = Union[Const, Var, Unary, Binary, Power]


# --------------------------------------------------------------------------- parsing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str, dimension: int):
        self.tokens = _tokenize(source)
        self.pos = 0
        self.dimension = dimension

    @property
    def tok(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect(self, text: str) -> None:
        if self.tok.text != text:
            raise ParseError(f"expected {text!r}, found {self.tok.text or 'end of input'!r}",
                             self.tok.offset)
        self.advance()

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.offset)
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.tok.text in ("+", "-"):
            op = self.advance().text
            left = Binary(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.factor()
        while self.tok.text in ("*", "/"):
            op = self.advance().text
            left = Binary(op, left, self.factor())
        return left

    def factor(self) -> Expr:
        if self.tok.text == "-":
            self.advance()
            return Unary("neg", self.factor())
        base = self.base()
        if self.tok.text == "^":
            self.advance()
            base = Power(base, self.exponent())
        return base

    def exponent(self) -> float:
        sign = 1.0
        if self.tok.text in ("-", "+"):
            sign = -1.0 if self.advance().text == "-" else 1.0
        t = self.tok
        if t.kind == "number":
            self.advance()
            return sign * self._number(t)
        if t.kind == "ident" and t.text in CONSTANTS:
            self.advance()
            return sign * CONSTANTS[t.text]
        raise ParseError("exponent must be a constant number", t.offset)

    @staticmethod
    def _number(t: _Token) -> float:
        value = float(t.text)
        if not math.isfinite(value):
            raise ParseError(f"numeric literal {t.text!r} overflows", t.offset)
        return value

    def base(self) -> Expr:
        t = self.tok
        if t.kind == "number":
            self.advance()
            return Const(self._number(t))
        if t.text == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "ident":
            self.advance()
            if t.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Unary(t.text, arg)
            if t.text in CONSTANTS:
                return Const(CONSTANTS[t.text])
            m = re.fullmatch(r"x(\d+)", t.text)
            if m is None:
                raise ParseError(f"unknown identifier {t.text!r}", t.offset)
            index = int(m.group(1))
            if not 1 <= index <= self.dimension:
                raise ParseError(
                    f"variable {t.text} out of range for dimension {self.dimension}", t.offset)
            return Var(index - 1)
        raise ParseError(f"unexpected {t.text or 'end of input'!r}", t.offset)


def parse(source: str, dimension: int) -> Expr:
    """Parse ``source`` into an expression over ``dimension`` coordinates."""
    if dimension < 1:
        raise ValueError("dimension must be positive")
    return _Parser(source, dimension).parse()


# --------------------------------------------------------------------------- inspection

def _walk(e: Expr) -> Iterator[Expr]:
    yield e
    if isinstance(e, Unary):
        yield from _walk(e.arg)
    elif isinstance(e, Binary):
        yield from _walk(e.left)
        yield from _walk(e.right)
    elif isinstance(e, Power):
        yield from _walk(e.base)


def variables(e: Expr) -> frozenset[int]:
    """0-based indices of the coordinates ``e`` depends on syntactically."""
    return frozenset(n.index for n in _walk(e) if isinstance(n, Var))


def is_constant(e: Expr) -> bool:
    return not variables(e)


def to_text(e: Expr) -> str:
    """Fully parenthesised source text; ``parse(to_text(e))`` rebuilds ``e``."""
    if isinstance(e, Const):
        return repr(float(e.value)) if e.value >= 0 else f"(-{-e.value!r})"
    if isinstance(e, Var):
        return f"x{e.index + 1}"
    if isinstance(e, Unary):
        if e.op == "neg":
            return f"(-{to_text(e.arg)})"
        return f"{e.op}({to_text(e.arg)})"
    if isinstance(e, Binary):
        return f"({to_text(e.left)} {e.op} {to_text(e.right)})"
    if isinstance(e, Power):
        return f"({to_text(e.base)} ^ {e.exponent!r})"
    raise TypeError(f"not an expression: {e!r}")


# --------------------------------------------------------------------------- evaluation

@dataclass(eq=False)
class DualValue:
    """A value together with its gradient in chart coordinates."""

    value: float
    derivatives: np.ndarray


def _check(value: float, what: str) -> float:
    if not math.isfinite(value):
        raise DomainError(f"{what} produced a non-finite value")
    return value


def _pow_allowed(base: float, exponent: float) -> None:
    if base == 0.0 and exponent < 0:
        raise DomainError("zero raised to a negative power")
    if base < 0.0 and not float(exponent).is_integer():
        raise DomainError("negative base raised to a non-integer power")


def evaluate(e: Expr, point: Sequence[float]) -> float:
    """Plain floating-point evaluation."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return float(point[e.index])
    if isinstance(e, Unary):
        a = evaluate(e.arg, point)
        if e.op == "neg":
            return -a
        if e.op == "sin":
            return math.sin(a)
        if e.op == "cos":
            return math.cos(a)
        if e.op == "exp":
            if a > 709.0:
                raise DomainError("exp overflow")
            return math.exp(a)
        if e.op == "ln":
            if a <= 0.0:
                raise DomainError(f"ln of non-positive value {a!r}")
            return math.log(a)
        if e.op == "sqrt":
            if a < 0.0:
                raise DomainError(f"sqrt of negative value {a!r}")
            return math.sqrt(a)
        raise ExprError(f"unknown function {e.op!r}")
    if isinstance(e, Binary):
        a = evaluate(e.left, point)
        b = evaluate(e.right, point)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return _check(a * b, "product")
        if e.op == "/":
            if b == 0.0:
                raise DomainError("division by zero")
            return _check(a / b, "quotient")
        raise ExprError(f"unknown operator {e.op!r}")
    if isinstance(e, Power):
        a = evaluate(e.base, point)
        _pow_allowed(a, e.exponent)
        try:
            return _check(a ** e.exponent, "power")
        except OverflowError:
            raise DomainError("power overflow") from None
    raise TypeError(f"not an expression: {e!r}")


def _dual(e: Expr, point: np.ndarray, zeros: np.ndarray) -> tuple[float, np.ndarray]:
    if isinstance(e, Const):
        return e.value, zeros
    if isinstance(e, Var):
        d = zeros.copy()
        d[e.index] = 1.0
        return float(point[e.index]), d
    if isinstance(e, Unary):
        a, da = _dual(e.arg, point, zeros)
        if e.op == "neg":
            return -a, -da
        if e.op == "sin":
            return math.sin(a), math.cos(a) * da
        if e.op == "cos":
            return math.cos(a), -math.sin(a) * da
        if e.op == "exp":
            if a > 709.0:
                raise DomainError("exp overflow")
            v = math.exp(a)
            return v, v * da
        if e.op == "ln":
            if a <= 0.0:
                raise DomainError(f"ln of non-positive value {a!r}")
            return math.log(a), da / a
        if e.op == "sqrt":
            if a <= 0.0:
                # sqrt(0) has no finite derivative
                raise DomainError(f"sqrt not differentiable at {a!r}")
            v = math.sqrt(a)
            return v, da / (2.0 * v)
        raise ExprError(f"unknown function {e.op!r}")
    if isinstance(e, Binary):
        a, da = _dual(e.left, point, zeros)
        b, db = _dual(e.right, point, zeros)
        if e.op == "+":
            return a + b, da + db
        if e.op == "-":
            return a - b, da - db
        if e.op == "*":
            return a * b, b * da + a * db
        if e.op == "/":
            if b == 0.0:
                raise DomainError("division by zero")
            return a / b, (da * b - a * db) / (b * b)
        raise ExprError(f"unknown operator {e.op!r}")
    if isinstance(e, Power):
        a, da = _dual(e.base, point, zeros)
        c = e.exponent
        _pow_allowed(a, c)
        if c == 0.0:
            return 1.0, zeros
        if a == 0.0 and c < 1.0:
            raise DomainError("power not differentiable at zero")
        try:
            return a ** c, (c * a ** (c - 1.0)) * da
        except OverflowError:
            raise DomainError("power overflow") from None
    raise TypeError(f"not an expression: {e!r}")


def eval_dual(e: Expr, point: Sequence[float]) -> DualValue:
    """Value and exact gradient of ``e`` at ``point`` (forward mode)."""
    p = np.asarray(point, dtype=float)
    value, grad = _dual(e, p, np.zeros(p.shape[0]))
    grad = np.array(grad, dtype=float)
    if not (math.isfinite(value) and np.all(np.isfinite(grad))):
        raise DomainError("non-finite value or derivative")
    return DualValue(float(value), grad)


class ExprArray:
    """An array of expressions evaluated entrywise.

    Constant entries are evaluated once at construction, so constant-coefficient
    tensors cost nothing per point.
    """

    def __init__(self, entries, dimension: int):
        rows = list(entries)
        if rows and isinstance(rows[0], (list, tuple)):
            if len({len(r) for r in rows}) != 1:
                raise ValueError("ragged expression matrix")
            shape = (len(rows), len(rows[0]))
            flat = [x for r in rows for x in r]
        else:
            shape = (len(rows),)
            flat = rows
        arr = np.empty(shape, dtype=object)
        for i, x in enumerate(flat):
            arr.flat[i] = x
        self.exprs = arr
        self.dimension = dimension
        self.shape = arr.shape
        self._const = np.zeros(arr.shape)
        self._live = []
        for idx in np.ndindex(arr.shape):
            e = arr[idx]
            if variables(e):
                self._live.append(idx)
            else:
                self._const[idx] = evaluate(e, ())

    def evaluate(self, point) -> np.ndarray:
        out = self._const.copy()
        for idx in self._live:
            out[idx] = evaluate(self.exprs[idx], point)
        return out

    def eval_dual(self, point) -> tuple[np.ndarray, np.ndarray]:
        """Values and gradients; gradients carry a trailing axis of length ``dimension``."""
        p = np.asarray(point, dtype=float)
        grads = np.zeros(self.shape + (self.dimension,))
        values = self._const.copy()
        for idx in self._live:
            d = eval_dual(self.exprs[idx], p)
            values[idx] = d.value
            grads[idx] = d.derivatives
        return values, grads

    def texts(self):
        return np.vectorize(to_text, otypes=[object])(self.exprs).tolist()
