"""Expression trees for univariate elementary functions.

Grammar (whitespace is ignored)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | '+' unary | power
    power   := atom ('^' unary)?          # right associative, exponent must fold to a constant
    atom    := NUMBER | 'x' | 'pi' | 'e' | FUNC '(' expr ')' | '(' expr ')'
    FUNC    := exp | ln | sin | cos | abs | sqrt

Constant subtrees are folded while parsing, so ``-3`` becomes ``Const(-3.0)``
and ``x^(1/2)`` becomes ``Pow(Var(), 0.5)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

FUNCTIONS = ("exp", "ln", "sin", "cos", "abs", "sqrt")
CONSTANTS = {"pi": math.pi, "e": math.e}
BINARY_OPS = ("+", "-", "*", "/")


class ExprError(Exception):
    pass


class ParseError(ExprError):
    """Syntax error at a UTF-8 byte offset, with the set of tokens that would have been accepted."""

    def __init__(self, message: str, offset: int, expected=()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f" (expected one of: {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{message} at byte {offset}{detail}")


class UnknownIdentifierError(ParseError):
    def __init__(self, name: str, offset: int):
        self.name = name
        super().__init__(f"unknown identifier {name!r}", offset, ("x", "pi", "e") + FUNCTIONS)


class DomainError(ExprError, ArithmeticError):
    """Raised when evaluation hits a pole, branch point or overflow.

    ``node`` is the innermost subexpression whose value was not finite.
    """

    def __init__(self, node: "Expr", points=None):
        self.node = node
        self.points = points
        where = "" if points is None else f" at {points!r}"
        super().__init__(f"non-finite value of {render(node)}{where}")


# --- AST ---------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"constant must be finite, got {self.value}")


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise ValueError(f"unknown operator {self.op!r}")


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: float


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expr"

    def __post_init__(self):
        if self.fn not in FUNCTIONS:
            raise ValueError(f"unknown function {self.fn!r}")


Expr = Union[Const, Var, Neg, BinOp, Pow, Call]

X = Var()


def Add(a, b):
    return BinOp("+", a, b)


def Sub(a, b):
    return BinOp("-", a, b)


def Mul(a, b):
    return BinOp("*", a, b)


def Div(a, b):
    return BinOp("/", a, b)


def children(e: Expr) -> tuple:
    if isinstance(e, (Const, Var)):
        return ()
    if isinstance(e, BinOp):
        return (e.left, e.right)
    if isinstance(e, Pow):
        return (e.base,)
    return (e.arg,)


def contains(e: Expr, fn: str) -> bool:
    if isinstance(e, Call) and e.fn == fn:
        return True
    return any(contains(c, fn) for c in children(e))


# --- constant folding --------------------------------------------------------


def _scalar(node: Expr) -> float:
    v = complex(evaluate(node, 0.0))
    if v.imag != 0.0 or not math.isfinite(v.real):
        raise DomainError(node)
    return v.real


def _fold(node: Expr) -> Expr:
    if all(isinstance(c, Const) for c in children(node)) and not isinstance(node, (Const, Var)):
        try:
            return Const(_scalar(node))
        except (DomainError, ValueError):
            return node
    return node


def _fold_neg(e: Expr) -> Expr:
    return _fold(Neg(e))


# --- lexer / parser ----------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = []  # (kind, text, char_pos)
        pos = 0
        while pos < len(src):
            if src[pos:].strip() == "":
                break
            m = _TOKEN.match(src, pos)
            if m is None:
                start = pos + (len(src[pos:]) - len(src[pos:].lstrip()))
                raise ParseError(f"unexpected character {src[start]!r}", self.byte(start),
                                 ("number", "identifier", "operator"))
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.tokens.append(("end", "", len(src)))
        self.i = 0

    def byte(self, char_pos: int) -> int:
        return len(self.src[:char_pos].encode("utf-8"))

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected):
        kind, text, pos = self.peek()
        what = "end of input" if kind == "end" else repr(text)
        raise ParseError(f"unexpected {what}", self.byte(pos), expected)

    def expect(self, op: str):
        kind, text, _ = self.peek()
        if kind != "op" or text != op:
            self.fail((op,))
        self.take()

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek()[0] != "end":
            self.fail(("+", "-", "*", "/", "^", "end of input"))
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            left = _fold(BinOp(op, left, self.term()))
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            left = _fold(BinOp(op, left, self.unary()))
        return left

    def unary(self) -> Expr:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.take()
            return _fold_neg(self.unary())
        if kind == "op" and text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, text, pos = self.peek()
        if kind == "op" and text == "^":
            self.take()
            exp_pos = self.peek()[2]
            exponent = self.unary()
            if not isinstance(exponent, Const):
                raise ParseError("exponent must be a constant", self.byte(exp_pos), ("number",))
            return _fold(Pow(base, exponent.value))
        return base

    def atom(self) -> Expr:
        kind, text, pos = self.peek()
        if kind == "num":
            self.take()
            value = float(text)
            if not math.isfinite(value):
                raise ParseError(f"number {text!r} overflows", self.byte(pos), ("number",))
            return Const(value)
        if kind == "name":
            self.take()
            if text == "x":
                return X
            if text in CONSTANTS:
                return Const(CONSTANTS[text])
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return _fold(Call(text, arg))
            raise UnknownIdentifierError(text, self.byte(pos))
        if kind == "op" and text == "(":
            self.take()
            e = self.expr()
            self.expect(")")
            return e
        self.fail(("number", "x", "pi", "e", "(", "-") + FUNCTIONS)


def parse(src: str) -> Expr:
    """Parse ``src`` into an expression tree; raises ParseError on bad input."""
    return _Parser(src).parse()


def as_expr(e) -> Expr:
    return parse(e) if isinstance(e, str) else e


# --- rendering ---------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return 3
    if isinstance(e, Pow):
        return 4
    if isinstance(e, Const) and e.value < 0:
        return 3
    return 5


def _num(v: float) -> str:
    if v.is_integer() and abs(v) < 1e15:
        s = str(int(v))
    else:
        s = repr(v)
    return f"({s})" if v < 0 or s.startswith("-") else s


def render(e: Expr) -> str:
    """Canonical text for ``e``; ``parse(render(e)) == e``."""
    if isinstance(e, Const):
        s = _num(e.value)
        return s[1:-1] if s.startswith("(") else s
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Call):
        return f"{e.fn}({render(e.arg)})"
    if isinstance(e, Neg):
        inner = render(e.arg)
        if _prec(e.arg) < 4 or inner.startswith("-"):
            inner = f"({inner})"
        return "-" + inner
    if isinstance(e, Pow):
        base = render(e.base)
        if _prec(e.base) < 5:
            base = f"({base})"
        return f"{base}^{_num(e.exponent)}"
    p = _PREC[e.op]
    left = render(e.left)
    right = render(e.right)
    if _prec(e.left) < p or _prec(e.left) == 3:
        left = f"({left})"
    # right operand of equal precedence needs parens to survive left associativity
    if _prec(e.right) <= p or _prec(e.right) == 3:
        right = f"({right})"
    return f"{left} {e.op} {right}"


# --- differentiation ---------------------------------------------------------


def _add(a, b):
    if a == Const(0.0):
        return b
    if b == Const(0.0):
        return a
    return _fold(Add(a, b))


def _sub(a, b):
    if b == Const(0.0):
        return a
    if a == Const(0.0):
        return _fold_neg(b)
    return _fold(Sub(a, b))


def _mul(a, b):
    if a == Const(0.0) or b == Const(0.0):
        return Const(0.0)
    if a == Const(1.0):
        return b
    if b == Const(1.0):
        return a
    return _fold(Mul(a, b))


def _div(a, b):
    if a == Const(0.0):
        return Const(0.0)
    if b == Const(1.0):
        return a
    return _fold(Div(a, b))


def _pow(base, n):
    if n == 1.0:
        return base
    if n == 0.0:
        return Const(1.0)
    return _fold(Pow(base, n))


@lru_cache(maxsize=None)
def differentiate(e: Expr) -> Expr:
    """Symbolic d/dx. ``abs(u)`` differentiates to ``u/abs(u) * u'`` (undefined at 0)."""
    if isinstance(e, Const):
        return Const(0.0)
    if isinstance(e, Var):
        return Const(1.0)
    if isinstance(e, Neg):
        return _fold_neg(differentiate(e.arg)) if differentiate(e.arg) != Const(0.0) else Const(0.0)
    if isinstance(e, BinOp):
        u, v = e.left, e.right
        du, dv = differentiate(u), differentiate(v)
        if e.op == "+":
            return _add(du, dv)
        if e.op == "-":
            return _sub(du, dv)
        if e.op == "*":
            return _add(_mul(du, v), _mul(u, dv))
        # quotient rule
        if dv == Const(0.0):
            return _div(du, v)
        return _div(_sub(_mul(du, v), _mul(u, dv)), _pow(v, 2.0))
    if isinstance(e, Pow):
        n = e.exponent
        return _mul(_mul(Const(n), _pow(e.base, n - 1.0)), differentiate(e.base))
    u = e.arg
    du = differentiate(u)
    outer = {
        "exp": lambda: e,
        "ln": lambda: _div(Const(1.0), u),
        "sin": lambda: Call("cos", u),
        "cos": lambda: _fold_neg(Call("sin", u)),
        "abs": lambda: _div(u, e),
        "sqrt": lambda: _div(Const(1.0), _mul(Const(2.0), e)),
    }[e.fn]()
    if e.fn in ("ln", "sqrt") and du != Const(1.0):
        # d ln(u) = u'/u and d sqrt(u) = u'/(2 sqrt(u)) read better as a single quotient
        return _div(du, u) if e.fn == "ln" else _div(du, _mul(Const(2.0), e))
    if e.fn == "abs" and du == Const(1.0):
        return outer
    return _mul(outer, du)


# --- evaluation --------------------------------------------------------------

_UFUNCS = {
    "exp": np.exp,
    "ln": np.log,
    "sin": np.sin,
    "cos": np.cos,
    "sqrt": np.sqrt,
}


def _eval(e: Expr, z: np.ndarray) -> np.ndarray:
    if isinstance(e, Const):
        out = np.full(z.shape, complex(e.value))
    elif isinstance(e, Var):
        out = z
    elif isinstance(e, Neg):
        out = -_eval(e.arg, z)
    elif isinstance(e, BinOp):
        a, b = _eval(e.left, z), _eval(e.right, z)
        if e.op == "+":
            out = a + b
        elif e.op == "-":
            out = a - b
        elif e.op == "*":
            out = a * b
        else:
            out = a / b
    elif isinstance(e, Pow):
        # numpy uses exact repeated squaring for integral exponents, principal branch otherwise
        out = np.power(_eval(e.base, z), e.exponent)
    elif e.fn == "abs":
        out = np.abs(_eval(e.arg, z)).astype(complex)
    else:
        out = _UFUNCS[e.fn](_eval(e.arg, z))
    if not np.all(np.isfinite(out)):
        bad = z[~np.isfinite(out)]
        raise DomainError(e, bad[0] if bad.size == 1 else bad)
    return out


def evaluate(e: Expr, z):
    """Evaluate ``e`` at a complex point or array of points.

    Uses the complex modulus for ``abs`` and principal branches for ``ln``,
    ``sqrt`` and non-integer powers. Raises DomainError on any non-finite
    intermediate value.
    """
    scalar = np.ndim(z) == 0
    arr = np.asarray(z, dtype=complex)
    if scalar:
        arr = arr.reshape(1)
    with np.errstate(all="ignore"):
        out = _eval(e, arr)
    return complex(out[0]) if scalar else out


def eval_abs_deriv(e: Expr, z):
    """|f'(z)| as a nonnegative real (scalar or array)."""
    d = evaluate(differentiate(e), z)
    return abs(d) if isinstance(d, complex) else np.abs(d)
