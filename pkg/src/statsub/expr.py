"""Coefficient expressions over chart coordinates.

Expressions are parsed from a small infix grammar and evaluated to
second-order Taylor jets (value, gradient, Hessian) by forward-mode
propagation. Variables are written ``x1 .. xm`` (1-based).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

FUNCTIONS = ("exp", "log", "sin", "cos")


class ExprError(ValueError):
    """Base class for parse errors; ``offset`` is a byte offset into the source."""

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} at offset {offset}"
        super().__init__(message)


class ExprSyntaxError(ExprError):
    pass


class UnknownIdentifierError(ExprError):
    pass


class VariableRangeError(ExprError):
    pass


class DomainError(ArithmeticError):
    """Raised when a subexpression leaves its domain (log of x <= 0, 1/0)."""

    def __init__(self, message: str, subexpr: str):
        self.subexpr = subexpr
        super().__init__(f"{message} in '{subexpr}'")


# --- tree -----------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 1-based


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Func:
    name: str
    arg: "Node"


Node = Union[Const, Var, Neg, BinOp, Pow, Func]


@dataclass(frozen=True)
class ScalarExpr:
    """A parsed coefficient function of ``dim`` chart coordinates."""

    node: Node
    dim: int

    def __str__(self) -> str:
        return to_source(self)

    def __call__(self, point) -> float:
        return evaluate(self, point)


# --- parsing --------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)
_VAR = re.compile(r"x(\d+)$")


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            if src[pos:].strip() == "":
                break
            start = pos + (len(src[pos:]) - len(src[pos:].lstrip()))
            raise ExprSyntaxError(f"unexpected character {src[start]!r}", start)
        kind = m.lastgroup
        if kind is None:  # trailing whitespace only
            break
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str, dim: int):
        self.src = src
        self.dim = dim
        self.tokens = _tokenize(src)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def _expect(self, value: str):
        kind, text, off = self.tok
        if text != value or kind == "end":
            found = "end of input" if kind == "end" else repr(text)
            raise ExprSyntaxError(f"expected {value!r}, found {found}", off)
        self.i += 1

    def parse(self) -> Node:
        node = self.expr()
        kind, text, off = self.tok
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {text!r}", off)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok[1] in ("+", "-") and self.tok[0] == "op":
            op = self.tok[1]
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.tok[1] in ("*", "/") and self.tok[0] == "op":
            op = self.tok[1]
            self.i += 1
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        negate = False
        if self.tok[0] == "op" and self.tok[1] == "-":
            negate = True
            self.i += 1
        node = self.atom()
        if self.tok[0] == "op" and self.tok[1] == "^":
            self.i += 1
            node = Pow(node, self._integer())
        elif negate and isinstance(node, Const):
            return Const(-node.value)
        return Neg(node) if negate else node

    def _integer(self) -> int:
        sign = 1
        if self.tok[0] == "op" and self.tok[1] == "-":
            sign = -1
            self.i += 1
        kind, text, off = self.tok
        if kind != "num" or not text.isdigit():
            raise ExprSyntaxError("expected integer exponent", off)
        self.i += 1
        return sign * int(text)

    def atom(self) -> Node:
        kind, text, off = self.tok
        if kind == "num":
            self.i += 1
            return Const(float(text))
        if kind == "name":
            self.i += 1
            m = _VAR.match(text)
            if m:
                idx = int(m.group(1))
                if not 1 <= idx <= self.dim:
                    raise VariableRangeError(
                        f"variable {text} outside chart dimension {self.dim}", off
                    )
                return Var(idx)
            if text in FUNCTIONS:
                self._expect("(")
                arg = self.expr()
                self._expect(")")
                return Func(text, arg)
            raise UnknownIdentifierError(f"unknown identifier {text!r}", off)
        if kind == "op" and text == "(":
            self.i += 1
            node = self.expr()
            self._expect(")")
            return node
        found = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(f"unexpected {found}", off)


def parse(src: str, dim: int) -> ScalarExpr:
    """Parse ``src`` into an expression over ``dim`` coordinates."""
    if dim < 1:
        raise ValueError("chart dimension must be positive")
    return ScalarExpr(_Parser(src, dim).parse(), dim)


def constant(value: float, dim: int) -> ScalarExpr:
    return ScalarExpr(Const(float(value)), dim)


# --- printing -------------------------------------------------------------


def _src(node: Node) -> str:
    if isinstance(node, Const):
        return repr(node.value)
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, Neg):
        return "-" + _atom(node.arg, allow_pow=True)
    if isinstance(node, BinOp):
        return f"({_src(node.left)} {node.op} {_src(node.right)})"
    if isinstance(node, Pow):
        return f"{_atom(node.base)}^{node.exponent}"
    if isinstance(node, Func):
        return f"{node.name}({_src(node.arg)})"
    raise TypeError(node)


def _atom(node: Node, allow_pow: bool = False) -> str:
    if isinstance(node, Var | Func) or (isinstance(node, Const) and not np.signbit(node.value)):
        return _src(node)
    if isinstance(node, BinOp):
        return _src(node)  # already parenthesized
    if allow_pow and isinstance(node, Pow):
        return _src(node)
    return f"({_src(node)})"


def to_source(e: ScalarExpr) -> str:
    """Render an expression so that ``parse(to_source(e))`` rebuilds the same tree."""
    return _src(e.node)


# --- jets -----------------------------------------------------------------


@dataclass(frozen=True)
class Jet2:
    """Second-order Taylor jet of a scalar at one point."""

    value: float
    grad: np.ndarray
    hess: np.ndarray


def _chain(u, f0, f1, f2):
    """Compose a univariate function (values f0, f1, f2 of f, f', f'') with jet ``u``."""
    v, g, h = u
    g1 = f1[:, None] * g
    h1 = f2[:, None, None] * (g[:, :, None] * g[:, None, :]) + f1[:, None, None] * h
    return f0, g1, h1


def _mul(a, b):
    va, ga, ha = a
    vb, gb, hb = b
    cross = ga[:, :, None] * gb[:, None, :]
    h = va[:, None, None] * hb + vb[:, None, None] * ha + (cross + np.swapaxes(cross, 1, 2))
    return va * vb, va[:, None] * gb + vb[:, None] * ga, h


def _eval(node: Node, pts: np.ndarray):
    n, m = pts.shape
    if isinstance(node, Const):
        return np.full(n, node.value), np.zeros((n, m)), np.zeros((n, m, m))
    if isinstance(node, Var):
        g = np.zeros((n, m))
        g[:, node.index - 1] = 1.0
        return pts[:, node.index - 1].copy(), g, np.zeros((n, m, m))
    if isinstance(node, Neg):
        v, g, h = _eval(node.arg, pts)
        return -v, -g, -h
    if isinstance(node, BinOp):
        a = _eval(node.left, pts)
        b = _eval(node.right, pts)
        if node.op == "+":
            return a[0] + b[0], a[1] + b[1], a[2] + b[2]
        if node.op == "-":
            return a[0] - b[0], a[1] - b[1], a[2] - b[2]
        if node.op == "*":
            return _mul(a, b)
        u = b[0]
        if np.any(u == 0.0):
            raise DomainError("division by zero", _src(node.right))
        recip = _chain(b, 1.0 / u, -1.0 / u**2, 2.0 / u**3)
        return _mul(a, recip)
    if isinstance(node, Pow):
        u = _eval(node.base, pts)
        k = node.exponent
        x = u[0]
        if k == 0:
            return np.ones(n), np.zeros((n, m)), np.zeros((n, m, m))
        if k < 0 and np.any(x == 0.0):
            raise DomainError("zero raised to a negative power", _src(node))
        if k == 1:
            return u
        return _chain(u, x**k, k * x ** (k - 1), k * (k - 1) * x ** (k - 2))
    if isinstance(node, Func):
        u = _eval(node.arg, pts)
        x = u[0]
        if node.name == "exp":
            e = np.exp(x)
            return _chain(u, e, e, e)
        if node.name == "log":
            if np.any(x <= 0.0):
                raise DomainError("log of non-positive value", _src(node.arg))
            return _chain(u, np.log(x), 1.0 / x, -1.0 / x**2)
        if node.name == "sin":
            s, c = np.sin(x), np.cos(x)
            return _chain(u, s, c, -s)
        if node.name == "cos":
            s, c = np.sin(x), np.cos(x)
            return _chain(u, c, -s, -c)
    raise TypeError(node)


def _as_points(e: ScalarExpr, points) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[-1] != e.dim:
        raise ValueError(f"point has {pts.shape[-1]} coordinates, expression expects {e.dim}")
    return pts


def eval_jet2_batch(e: ScalarExpr, points) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Jets at many points: arrays of shape (N,), (N, m), (N, m, m)."""
    pts = _as_points(e, points)
    v, g, h = _eval(e.node, pts)
    # symmetrize; exact because a + b == b + a in IEEE arithmetic
    h = h + np.swapaxes(h, 1, 2)
    return v, g, 0.5 * h


def eval_jet2(e: ScalarExpr, p) -> Jet2:
    v, g, h = eval_jet2_batch(e, np.asarray(p, dtype=float)[None, :])
    return Jet2(float(v[0]), g[0], h[0])


def evaluate(e: ScalarExpr, p) -> float:
    return eval_jet2(e, p).value


def fd_jet2(e: ScalarExpr, p, h: float = 1e-5) -> Jet2:
    """Central-difference gradient and Hessian of ``e`` at ``p`` (test oracle)."""
    if h <= 0:
        raise ValueError("step must be positive")
    p = np.asarray(p, dtype=float)
    m = e.dim

    def f(q):
        return evaluate(e, q)

    f0 = f(p)
    grad = np.zeros(m)
    hess = np.zeros((m, m))
    for i in range(m):
        ei = np.zeros(m)
        ei[i] = h
        fp, fm = f(p + ei), f(p - ei)
        grad[i] = (fp - fm) / (2 * h)
        hess[i, i] = (fp - 2 * f0 + fm) / h**2
        for j in range(i):
            ej = np.zeros(m)
            ej[j] = h
            d = (f(p + ei + ej) - f(p + ei - ej) - f(p - ei + ej) + f(p - ei - ej)) / (4 * h * h)
            hess[i, j] = hess[j, i] = d
    return Jet2(f0, grad, hess)


def depth(node: Node) -> int:
    if isinstance(node, Const | Var):
        return 1
    if isinstance(node, Neg | Func):
        return 1 + depth(node.arg)
    if isinstance(node, Pow):
        return 1 + depth(node.base)
    return 1 + max(depth(node.left), depth(node.right))


def is_zero(e: ScalarExpr | None) -> bool:
    return e is None or (isinstance(e.node, Const) and e.node.value == 0.0)


__all__ = [
    "BinOp",
    "Const",
    "DomainError",
    "ExprError",
    "ExprSyntaxError",
    "Func",
    "Jet2",
    "Neg",
    "Pow",
    "ScalarExpr",
    "UnknownIdentifierError",
    "Var",
    "VariableRangeError",
    "constant",
    "eval_jet2",
    "eval_jet2_batch",
    "evaluate",
    "fd_jet2",
    "parse",
    "to_source",
]
