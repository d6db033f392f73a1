"""A small, total expression grammar for coefficient functions of t.

Grammar (whitespace-insensitive, ASCII names):

    expr   := term  (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right-associative, binds above '-'
    atom   := NUMBER | 'pi' | 't' | NAME '(' expr ')' | '(' expr ')'

with NAME one of sin, cos, tan, sinh, cosh, exp, ln, abs, atan, atanh,
sqrt. Parse errors carry byte offsets. Evaluation follows IEEE doubles
except that real-domain violations (ln/sqrt/atanh out of range, division
by zero, fractional powers of negatives) raise instead of producing NaN.
No symbolic differentiation: derivative inputs are supplied as their own
expressions.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

from .core import ScalarField
from .errors import EvalDomainError, ParseError

__all__ = [
    "Expr", "Num", "Var", "Pi", "Neg", "Bin", "Call",
    "parse", "evaluate", "to_source", "substitute", "is_constant",
    "field_from_expression", "FUNCTIONS",
]


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Bin:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    arg: "Expr"


Expr = Union[Num, Var, Pi, Neg, Bin, Call]

FUNCTIONS = ("sin", "cos", "tan", "sinh", "cosh", "exp", "ln", "abs",
             "atan", "atanh", "sqrt")

_TOKEN = re.compile(r"""
    (?P<num>\d+\.\d*([eE][+-]?\d+)?|\.\d+([eE][+-]?\d+)?|\d+([eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
  | (?P<ws>\s+)
""", re.VERBOSE)


def _tokenize(src: str):
    toks = []
    i = 0
    while i < len(src):
        m = _TOKEN.match(src, i)
        if m is None:
            raise ParseError(f"unexpected character {src[i]!r}", i)
        if m.lastgroup != "ws":
            toks.append((m.lastgroup, m.group(), i))
        i = m.end()
    toks.append(("end", "", len(src)))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.toks = _tokenize(src)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos]

    def take(self):
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        kind, text, off = self.peek()
        if kind != "op" or text != op:
            raise ParseError(f"expected {op!r}", off)
        self.take()

    def parse(self) -> Expr:
        e = self.expr()
        kind, text, off = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected trailing input {text!r}", off)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.take()
                e = Bin(text, e, self.term())
            else:
                return e

    def term(self) -> Expr:
        e = self.unary()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.take()
                e = Bin(text, e, self.unary())
            else:
                return e

    def unary(self) -> Expr:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.take()
            return Bin("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, text, off = self.take()
        if kind == "num":
            return Num(float(text))
        if kind == "name":
            if text == "t":
                return Var()
            if text == "pi":
                return Pi()
            if text in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(text, arg)
            raise ParseError(f"unknown identifier {text!r}", off)
        if kind == "op" and text == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        raise ParseError(f"unexpected token {text!r}" if text else "unexpected end of input", off)


def parse(src: str) -> Expr:
    return _Parser(src).parse()


def _apply(name: str, x: float) -> float:
    if name == "ln":
        if x <= 0.0:
            raise EvalDomainError(f"ln of non-positive value {x:g}")
        return math.log(x)
    if name == "sqrt":
        if x < 0.0:
            raise EvalDomainError(f"sqrt of negative value {x:g}")
        return math.sqrt(x)
    if name == "atanh":
        if abs(x) >= 1.0:
            raise EvalDomainError(f"atanh of value {x:g} outside (-1, 1)")
        return math.atanh(x)
    if name == "abs":
        return abs(x)
    try:
        return getattr(math, name)(x)
    except OverflowError:
        # IEEE semantics: exp/cosh saturate to +inf, sinh keeps the sign
        return math.copysign(math.inf, x) if name == "sinh" else math.inf


def evaluate(e: Expr, t: float) -> float:
    """Evaluate the tree at t. Domain violations raise EvalDomainError;
    a NaN can never escape silently."""
    v = _eval(e, t)
    if math.isnan(v):
        raise EvalDomainError("expression evaluated to NaN")
    return v


def _eval(e: Expr, t: float) -> float:
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return float(t)
    if isinstance(e, Pi):
        return math.pi
    if isinstance(e, Neg):
        return -_eval(e.arg, t)
    if isinstance(e, Call):
        return _apply(e.name, _eval(e.arg, t))
    l = _eval(e.left, t)
    r = _eval(e.right, t)
    if e.op == "+":
        return l + r
    if e.op == "-":
        return l - r
    if e.op == "*":
        return l * r
    if e.op == "/":
        if r == 0.0:
            raise EvalDomainError("division by zero")
        return l / r
    try:
        return math.pow(l, r)
    except ValueError:
        raise EvalDomainError(f"power {l:g}^{r:g} is not a real number")
    except OverflowError:
        return math.inf


# precedence levels for the printer
_LEVEL_ADD, _LEVEL_MUL, _LEVEL_UNARY, _LEVEL_POW, _LEVEL_ATOM = 1, 2, 3, 4, 5


def _level(e: Expr) -> int:
    if isinstance(e, (Num, Var, Pi, Call)):
        return _LEVEL_ATOM
    if isinstance(e, Neg):
        return _LEVEL_UNARY
    return {"+": _LEVEL_ADD, "-": _LEVEL_ADD,
            "*": _LEVEL_MUL, "/": _LEVEL_MUL,
            "^": _LEVEL_POW}[e.op]


def _print(e: Expr, min_level: int) -> str:
    lvl = _level(e)
    if isinstance(e, Num):
        s = repr(e.value)
        s = s[:-2] if s.endswith(".0") else s
    elif isinstance(e, Var):
        s = "t"
    elif isinstance(e, Pi):
        s = "pi"
    elif isinstance(e, Call):
        s = f"{e.name}({_print(e.arg, 0)})"
    elif isinstance(e, Neg):
        s = "-" + _print(e.arg, _LEVEL_UNARY)
    elif e.op == "^":
        # right-associative: the exponent may be a unary expression
        s = _print(e.left, _LEVEL_ATOM) + "^" + _print(e.right, _LEVEL_UNARY)
    else:
        s = (_print(e.left, lvl) + " " + e.op + " "
             + _print(e.right, lvl + 1))
    return f"({s})" if lvl < min_level else s


def to_source(e: Expr) -> str:
    """Print the tree; parsing the result reproduces the tree exactly."""
    return _print(e, 0)


def substitute(e: Expr, replacement: Expr) -> Expr:
    """Replace every occurrence of the variable by another tree."""
    if isinstance(e, Var):
        return replacement
    if isinstance(e, Neg):
        return Neg(substitute(e.arg, replacement))
    if isinstance(e, Bin):
        return Bin(e.op, substitute(e.left, replacement),
                   substitute(e.right, replacement))
    if isinstance(e, Call):
        return Call(e.name, substitute(e.arg, replacement))
    return e


def is_constant(e: Expr) -> bool:
    if isinstance(e, Var):
        return False
    if isinstance(e, Neg):
        return is_constant(e.arg)
    if isinstance(e, Bin):
        return is_constant(e.left) and is_constant(e.right)
    if isinstance(e, Call):
        return is_constant(e.arg)
    return True


def field_from_expression(src: str, domain=(-math.inf, math.inf),
                          name: str = "") -> ScalarField:
    """Parse source into a deterministic ScalarField (same t, same value)."""
    tree = parse(src)
    return ScalarField(lambda t: evaluate(tree, t), domain, True,
                       name or src)
