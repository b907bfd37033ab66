"""
Field Expressions
=================

Serializable closed-form scalar fields.

A :class:`FieldExpr` is parsed from text, rendered back to canonical text,
evaluated to a :class:`~core.jets.Jet` at a point, or evaluated to a plain
float (the oracle path used by finite-difference checks and guard
validation).

Grammar (whitespace insignificant):

    expr    := term (('+' | '-') term)*
    term    := factor ('*' factor)*
    factor  := '-' factor | power
    power   := primary ('^' signed_number)?
    primary := number | var | func '(' expr ')' | '(' expr ')'
    var     := 'x' digits | 'r'
    func    := 'sin' | 'cos' | 'exp' | 'log' | 'sqrt'

``x1`` is the first chart variable and ``r`` the Euclidean radius of the
chart point. Non-integer powers, ``log`` and ``sqrt`` need a positive
argument; :meth:`FieldExpr.validate` checks that on sample points.
"""

import logging
import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, Union

import numpy as np

from core.errors import FieldExprGuardError, FieldExprSyntaxError, JetDomainError
from core.jets import (
    Jet,
    jet_constant,
    jet_cos,
    jet_exp,
    jet_log,
    jet_pow,
    jet_sin,
    jet_sqrt,
    jet_variables,
)

logger = logging.getLogger(__name__)

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt")

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<var>x\d+)"
    r"|(?P<name>[A-Za-z_]+)"
    r"|(?P<op>[-+*^()])"
    r")"
)


# -- expression tree ---------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 0-based


@dataclass(frozen=True)
class Radius:
    pass


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class Add:
    terms: tuple  # ((sign, node), ...)


@dataclass(frozen=True)
class Mul:
    factors: tuple


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: float


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Var, Radius, Neg, Add, Mul, Pow, Call]


# -- parser ------------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        stripped = text.rstrip()
        while pos < len(stripped):
            m = _TOKEN.match(stripped, pos)
            if not m or m.end() == pos:
                rest = stripped[pos:]
                bad = pos + len(rest) - len(rest.lstrip())
                raise FieldExprSyntaxError(
                    f"Unexpected character {stripped[bad]!r}", text, bad
                )
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start))
            pos = m.end()
        self.i = 0

    def peek(self) -> Optional[tuple[str, str, int]]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def position(self) -> int:
        tok = self.peek()
        return tok[2] if tok else len(self.text.rstrip())

    def error(self, message: str) -> FieldExprSyntaxError:
        return FieldExprSyntaxError(message, self.text, self.position())

    def accept_op(self, op: str) -> bool:
        tok = self.peek()
        if tok and tok[0] == "op" and tok[1] == op:
            self.i += 1
            return True
        return False

    def expect_op(self, op: str) -> None:
        if not self.accept_op(op):
            found = self.peek()
            if found:
                raise self.error(f"Expected '{op}', found {found[1]!r}")
            raise self.error(f"Expected '{op}' before end of input")

    def parse(self) -> Node:
        if not self.tokens:
            raise self.error("Empty expression")
        node = self.expr()
        if self.peek() is not None:
            raise self.error(f"Unexpected token {self.peek()[1]!r}")
        return node

    def expr(self) -> Node:
        terms = [(1, self.term())]
        while True:
            if self.accept_op("+"):
                terms.append((1, self.term()))
            elif self.accept_op("-"):
                terms.append((-1, self.term()))
            else:
                break
        return terms[0][1] if len(terms) == 1 else Add(tuple(terms))

    def term(self) -> Node:
        factors = [self.factor()]
        while self.accept_op("*"):
            factors.append(self.factor())
        return factors[0] if len(factors) == 1 else Mul(tuple(factors))

    def factor(self) -> Node:
        if self.accept_op("-"):
            return Neg(self.factor())
        return self.power()

    def power(self) -> Node:
        base = self.primary()
        if self.accept_op("^"):
            sign = -1.0 if self.accept_op("-") else 1.0
            if sign > 0:
                self.accept_op("+")
            tok = self.peek()
            if not tok or tok[0] != "number":
                raise self.error("Exponent must be a number")
            self.i += 1
            return Pow(base, sign * float(tok[1]))
        return base

    def primary(self) -> Node:
        tok = self.peek()
        if tok is None:
            raise self.error("Unexpected end of input")
        kind, text, _ = tok
        if kind == "number":
            self.i += 1
            return Num(float(text))
        if kind == "var":
            index = int(text[1:])
            if index < 1:
                raise self.error("Variables are numbered from x1")
            self.i += 1
            return Var(index - 1)
        if kind == "name":
            if text == "r":
                self.i += 1
                return Radius()
            if text not in FUNCTIONS:
                raise self.error(f"Unknown name {text!r}")
            self.i += 1
            self.expect_op("(")
            arg = self.expr()
            self.expect_op(")")
            return Call(text, arg)
        if self.accept_op("("):
            inner = self.expr()
            self.expect_op(")")
            return inner
        raise self.error(f"Unexpected token {text!r}")


# -- rendering ---------------------------------------------------------------------


def _num(value: float) -> str:
    text = repr(float(value))
    return text[:-2] if text.endswith(".0") else text


_EXPR, _TERM, _FACTOR, _BASE = range(4)


def _render(node: Node, level: int = _EXPR) -> str:
    if isinstance(node, Num):
        return _num(node.value)
    if isinstance(node, Var):
        return f"x{node.index + 1}"
    if isinstance(node, Radius):
        return "r"
    if isinstance(node, Call):
        return f"{node.func}({_render(node.arg)})"
    if isinstance(node, Pow):
        text = f"{_render(node.base, _BASE)}^{_num(node.exponent)}"
        return f"({text})" if level >= _BASE else text
    if isinstance(node, Neg):
        text = f"-{_render(node.arg, _FACTOR)}"
        return f"({text})" if level >= _BASE else text
    if isinstance(node, Mul):
        text = "*".join(_render(f, _FACTOR) for f in node.factors)
        return f"({text})" if level >= _FACTOR else text
    if isinstance(node, Add):
        parts = []
        for k, (sign, term) in enumerate(node.terms):
            body = _render(term, _TERM)
            if k == 0:
                parts.append(body if sign > 0 else f"-{body}")
            else:
                parts.append(f" {'+' if sign > 0 else '-'} {body}")
        text = "".join(parts)
        return f"({text})" if level >= _TERM else text
    raise TypeError(f"Not a field expression node: {node!r}")


# -- evaluation --------------------------------------------------------------------


class JetEnv:
    """Chart variables at one point, shared by every expression evaluated there."""

    def __init__(self, point: Sequence[float], order: int):
        self.point = tuple(float(x) for x in point)
        self.order = order
        self.variables = jet_variables(self.point, order)

    @property
    def dim(self) -> int:
        return len(self.point)

    @cached_property
    def radius(self) -> Jet:
        total = self.variables[0] * self.variables[0]
        for v in self.variables[1:]:
            total = total + v * v
        try:
            return jet_sqrt(total)
        except JetDomainError as e:
            raise FieldExprGuardError("r is not smooth at the origin") from e

    def constant(self, value: float) -> Jet:
        return jet_constant(value, self.dim, self.order)


def _to_jet(node: Node, env: JetEnv) -> Jet:
    if isinstance(node, Num):
        return env.constant(node.value)
    if isinstance(node, Var):
        if node.index >= env.dim:
            raise FieldExprGuardError(
                f"x{node.index + 1} used on a {env.dim}-dimensional chart"
            )
        return env.variables[node.index]
    if isinstance(node, Radius):
        return env.radius
    if isinstance(node, Neg):
        return -_to_jet(node.arg, env)
    if isinstance(node, Add):
        total = None
        for sign, term in node.terms:
            value = _to_jet(term, env)
            value = value if sign > 0 else -value
            total = value if total is None else total + value
        return total
    if isinstance(node, Mul):
        total = _to_jet(node.factors[0], env)
        for f in node.factors[1:]:
            total = total * _to_jet(f, env)
        return total
    if isinstance(node, Pow):
        return jet_pow(_to_jet(node.base, env), node.exponent)
    if isinstance(node, Call):
        arg = _to_jet(node.arg, env)
        return {
            "sin": jet_sin,
            "cos": jet_cos,
            "exp": jet_exp,
            "log": jet_log,
            "sqrt": jet_sqrt,
        }[node.func](arg)
    raise TypeError(f"Not a field expression node: {node!r}")


def _to_float(node: Node, point: Sequence[float]) -> float:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        if node.index >= len(point):
            raise FieldExprGuardError(
                f"x{node.index + 1} used on a {len(point)}-dimensional chart"
            )
        return float(point[node.index])
    if isinstance(node, Radius):
        return math.sqrt(sum(float(x) ** 2 for x in point))
    if isinstance(node, Neg):
        return -_to_float(node.arg, point)
    if isinstance(node, Add):
        return sum(sign * _to_float(t, point) for sign, t in node.terms)
    if isinstance(node, Mul):
        return math.prod(_to_float(f, point) for f in node.factors)
    if isinstance(node, Pow):
        base = _to_float(node.base, point)
        if float(node.exponent).is_integer():
            if base == 0 and node.exponent < 0:
                raise FieldExprGuardError(
                    f"{_render(node)}: zero base with negative power"
                )
            return base ** int(node.exponent)
        if base <= 0:
            raise FieldExprGuardError(
                f"{_render(node)}: base {base:.6g} is not positive at {tuple(point)}"
            )
        return base**node.exponent
    if isinstance(node, Call):
        arg = _to_float(node.arg, point)
        if node.func in ("log", "sqrt") and arg <= 0:
            raise FieldExprGuardError(
                f"{_render(node)}: argument {arg:.6g} is not positive at {tuple(point)}"
            )
        return getattr(math, node.func)(arg)
    raise TypeError(f"Not a field expression node: {node!r}")


def _max_var(node: Node) -> int:
    if isinstance(node, Var):
        return node.index + 1
    if isinstance(node, (Neg,)):
        return _max_var(node.arg)
    if isinstance(node, Call):
        return _max_var(node.arg)
    if isinstance(node, Pow):
        return _max_var(node.base)
    if isinstance(node, Add):
        return max(_max_var(t) for _, t in node.terms)
    if isinstance(node, Mul):
        return max(_max_var(f) for f in node.factors)
    return 0


@dataclass(frozen=True)
class FieldExpr:
    """
    Parsed scalar field.

    Attributes:
        tree: Expression tree
        text: Source text it was parsed from

    Example:
        >>> f = parse_field_expr("0.2*sin(0.5*x2 + 1.0)*x3")
        >>> f.value((0.0, 1.0, 2.0))
        0.39899...
    """

    tree: Node
    text: str = ""

    def __repr__(self) -> str:
        return f"<FieldExpr {self.render()}>"

    def render(self) -> str:
        """Canonical text; parsing it gives back an identical tree."""
        return _render(self.tree)

    @property
    def variables_used(self) -> int:
        """Number of leading chart variables the expression needs."""
        return _max_var(self.tree)

    @property
    def is_zero(self) -> bool:
        return isinstance(self.tree, Num) and self.tree.value == 0.0

    def evaluate(self, point: Sequence[float], order: int) -> Jet:
        return self.to_jet(JetEnv(point, order))

    def to_jet(self, env: JetEnv) -> Jet:
        try:
            return _to_jet(self.tree, env)
        except JetDomainError as e:
            raise FieldExprGuardError(
                f"{self.render()} left its domain at {env.point}: {e}"
            ) from e

    def value(self, point: Sequence[float]) -> float:
        return _to_float(self.tree, point)

    def validate(self, points: np.ndarray) -> "FieldExpr":
        """
        Evaluate on every sample point to enforce positivity guards.

        Raises:
            FieldExprGuardError: On the first violating point
        """
        for p in np.atleast_2d(points):
            v = self.value(p)
            if not math.isfinite(v):
                raise FieldExprGuardError(
                    f"{self.render()} is not finite at {tuple(p)}"
                )
        return self

    def scaled(self, factor: float) -> "FieldExpr":
        """``factor*(self)`` as a new expression."""
        if factor == 1.0:
            return self
        return parse_field_expr(f"{_num(factor)}*({self.render()})")


def parse_field_expr(text: str) -> FieldExpr:
    """
    Parse field expression text.

    Raises:
        FieldExprSyntaxError: With line and column of the offending token
    """
    if not isinstance(text, str):
        text = _num(float(text))
    tree = _Parser(text).parse()
    return FieldExpr(tree, text)


ZERO = FieldExpr(Num(0.0), "0")
ONE = FieldExpr(Num(1.0), "1")
