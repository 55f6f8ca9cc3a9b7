"""Scalar fields over the coordinates x1..x4.

A tiny expression language with exact symbolic partial derivatives.  Fields
are immutable trees; evaluation goes through a generated Python function that
is compiled once per field and cached.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' INT)?
    base   := NUMBER | 'x1'|'x2'|'x3'|'x4' | FUNC '(' expr ')' | '(' expr ')' | '-' base
    FUNC   := 'sin' | 'cos' | 'exp'

Note that unary minus binds tighter than ``^``: ``-x1^2`` is ``(-x1)^2``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence, Union

__all__ = [
    "ScalarField", "Point", "ExprError", "ParseError", "UnknownIdentifier",
    "ExponentError", "DomainError", "parse", "diff", "evaluate", "const",
    "var", "compile_fields", "sin", "cos", "exp",
]

FUNCTIONS = ("sin", "cos", "exp")


class ExprError(ValueError):
    pass


class ParseError(ExprError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownIdentifier(ParseError):
    pass


class ExponentError(ParseError):
    pass


class DomainError(ArithmeticError):
    """Evaluation left the domain of the field (e.g. division by zero)."""


class Point(NamedTuple):
    x1: float
    x2: float
    x3: float
    x4: float


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Node:
    free: frozenset = field(init=False, compare=False, repr=False)


@dataclass(frozen=True)
class Const(Node):
    value: float

    def __post_init__(self):
        object.__setattr__(self, "free", frozenset())


@dataclass(frozen=True)
class Var(Node):
    index: int

    def __post_init__(self):
        object.__setattr__(self, "free", frozenset((self.index,)))


@dataclass(frozen=True)
class Binary(Node):
    op: str
    left: Node
    right: Node

    def __post_init__(self):
        object.__setattr__(self, "free", self.left.free | self.right.free)


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exponent: int

    def __post_init__(self):
        object.__setattr__(self, "free", self.base.free)


@dataclass(frozen=True)
class Neg(Node):
    arg: Node

    def __post_init__(self):
        object.__setattr__(self, "free", self.arg.free)


@dataclass(frozen=True)
class Call(Node):
    func: str
    arg: Node

    def __post_init__(self):
        object.__setattr__(self, "free", self.arg.free)


ZERO = Const(0.0)
ONE = Const(1.0)


def _is_const(n: Node, value: float | None = None) -> bool:
    return isinstance(n, Const) and (value is None or n.value == value)


# Smart constructors: constant folding and 0/1 identities only.

def _add(l: Node, r: Node) -> Node:
    if _is_const(l) and _is_const(r):
        return Const(l.value + r.value)
    if _is_const(l, 0.0):
        return r
    if _is_const(r, 0.0):
        return l
    if isinstance(r, Neg):
        return _sub(l, r.arg)
    return Binary("+", l, r)


def _sub(l: Node, r: Node) -> Node:
    if _is_const(l) and _is_const(r):
        return Const(l.value - r.value)
    if _is_const(r, 0.0):
        return l
    if _is_const(l, 0.0):
        return _neg(r)
    if isinstance(r, Neg):
        return _add(l, r.arg)
    return Binary("-", l, r)


def _mul(l: Node, r: Node) -> Node:
    if _is_const(l) and _is_const(r):
        return Const(l.value * r.value)
    if _is_const(l, 0.0) or _is_const(r, 0.0):
        return ZERO
    if _is_const(l, 1.0):
        return r
    if _is_const(r, 1.0):
        return l
    if _is_const(l, -1.0):
        return _neg(r)
    if _is_const(r, -1.0):
        return _neg(l)
    return Binary("*", l, r)


def _div(l: Node, r: Node) -> Node:
    if _is_const(r, 1.0):
        return l
    if _is_const(l, 0.0) and not _is_const(r, 0.0):
        return ZERO
    if _is_const(l) and _is_const(r) and r.value != 0.0:
        return Const(l.value / r.value)
    return Binary("/", l, r)


def _pow(b: Node, n: int) -> Node:
    if n == 0:
        return ONE
    if n == 1:
        return b
    if _is_const(b):
        return Const(b.value ** n)
    return Pow(b, n)


def _neg(a: Node) -> Node:
    if _is_const(a):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def _call(func: str, a: Node) -> Node:
    if _is_const(a):
        return Const(getattr(math, func)(a.value))
    return Call(func, a)


_BINARY = {"+": _add, "-": _sub, "*": _mul, "/": _div}


# ---------------------------------------------------------------------------
# Public field type
# ---------------------------------------------------------------------------

Operand = Union["ScalarField", float, int]


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Immutable scalar expression in x1..x4."""

    ast: Node
    _compiled: dict = field(default_factory=dict, repr=False)

    @property
    def free_vars(self) -> frozenset:
        return self.ast.free

    def is_zero(self) -> bool:
        return _is_const(self.ast, 0.0)

    def diff(self, v: int) -> ScalarField:
        return diff(self, v)

    def __call__(self, *p) -> float:
        return evaluate(self, p[0] if len(p) == 1 else p)

    def __str__(self) -> str:
        return _to_str(self.ast, 0)

    def __repr__(self) -> str:
        return f"ScalarField({str(self)!r})"

    def _binary(self, op: str, other: Operand, swap: bool = False) -> ScalarField:
        o = _lift(other).ast
        l, r = (o, self.ast) if swap else (self.ast, o)
        return ScalarField(_BINARY[op](l, r))

    def __add__(self, other):
        return self._binary("+", other)

    def __radd__(self, other):
        return self._binary("+", other, swap=True)

    def __sub__(self, other):
        return self._binary("-", other)

    def __rsub__(self, other):
        return self._binary("-", other, swap=True)

    def __mul__(self, other):
        return self._binary("*", other)

    def __rmul__(self, other):
        return self._binary("*", other, swap=True)

    def __truediv__(self, other):
        return self._binary("/", other)

    def __rtruediv__(self, other):
        return self._binary("/", other, swap=True)

    def __pow__(self, n: int):
        if not isinstance(n, int) or isinstance(n, bool) or n < 0:
            raise ExprError("exponent must be a non-negative integer")
        return ScalarField(_pow(self.ast, n))

    def __neg__(self):
        return ScalarField(_neg(self.ast))

    def __pos__(self):
        return self


def _lift(x: Operand) -> ScalarField:
    if isinstance(x, ScalarField):
        return x
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        if not math.isfinite(x):
            raise ExprError(f"non-finite constant {x!r}")
        return ScalarField(Const(float(x)))
    raise TypeError(f"cannot use {type(x).__name__} as a scalar field")


def const(value: float) -> ScalarField:
    return _lift(value)


def var(i: int) -> ScalarField:
    if i not in (1, 2, 3, 4):
        raise ValueError(f"coordinate index must be 1..4, got {i}")
    return ScalarField(Var(i))


def sin(f: Operand) -> ScalarField:
    return ScalarField(_call("sin", _lift(f).ast))


def cos(f: Operand) -> ScalarField:
    return ScalarField(_call("cos", _lift(f).ast))


def exp(f: Operand) -> ScalarField:
    return ScalarField(_call("exp", _lift(f).ast))


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        stripped_end = len(text.rstrip())
        while pos < stripped_end:
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                raise ParseError(f"unexpected character {text[pos]!r}", self._byte(pos))
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), self._byte(start)))
            pos = m.end()
        self.tokens.append(("end", "", self._byte(len(text))))
        self.i = 0

    def _byte(self, char_offset: int) -> int:
        return len(self.text[:char_offset].encode("utf-8"))

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, off = self.take()
        if text != value or kind != "op":
            what = "end of input" if kind == "end" else repr(text)
            raise ParseError(f"expected {value!r}, found {what}", off)

    def parse(self) -> Node:
        node = self.expr()
        kind, text, off = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {text!r}", off)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = _BINARY[op](node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = _BINARY[op](node, self.factor())
        return node

    def factor(self) -> Node:
        node = self.base()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            kind, text, off = self.take()
            if kind != "num" or not text.isdigit():
                raise ExponentError(f"exponent must be a non-negative integer, found {text or 'end of input'!r}", off)
            node = _pow(node, int(text))
        return node

    def base(self) -> Node:
        kind, text, off = self.take()
        if kind == "num":
            value = float(text)
            if not math.isfinite(value):
                raise ParseError(f"numeric literal {text!r} out of range", off)
            return Const(value)
        if kind == "name":
            if text in ("x1", "x2", "x3", "x4"):
                return Var(int(text[1]))
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return _call(text, arg)
            raise UnknownIdentifier(f"unknown identifier {text!r}", off)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "op" and text == "-":
            return _neg(self.base())
        what = "end of input" if kind == "end" else repr(text)
        raise ParseError(f"unexpected {what}", off)


def parse(text: str) -> ScalarField:
    """Parse ``text`` into a field.  Raises :class:`ParseError` subclasses."""
    return ScalarField(_Parser(text).parse())


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _num(v: float) -> str:
    if v.is_integer() and abs(v) < 1e16:
        s = str(int(v))
    else:
        s = repr(v)
    return f"(-{s[1:]})" if v < 0 else s


def _to_str(n: Node, ctx: int) -> str:
    # ctx: binding strength the parent requires (0 expr, 1 sum, 2 product, 3 factor, 4 base)
    if isinstance(n, Const):
        return _num(n.value)
    if isinstance(n, Var):
        return f"x{n.index}"
    if isinstance(n, Call):
        return f"{n.func}({_to_str(n.arg, 0)})"
    if isinstance(n, Neg):
        return f"(-{_to_str(n.arg, 4)})"
    if isinstance(n, Pow):
        s = f"{_to_str(n.base, 4)}^{n.exponent}"
        return f"({s})" if ctx > 3 else s
    p = _PREC[n.op]
    left = _to_str(n.left, p)
    # right operand of '-' and '/' must bind strictly tighter
    right = _to_str(n.right, p + 1 if n.op in "-/" else p)
    s = f"{left} {n.op} {right}" if p == 1 else f"{left}*{right}" if n.op == "*" else f"{left}/{right}"
    return f"({s})" if p < ctx else s


# ---------------------------------------------------------------------------
# Differentiation
# ---------------------------------------------------------------------------


def _d(n: Node, v: int) -> Node:
    if v not in n.free:
        return ZERO
    if isinstance(n, Var):
        return ONE
    if isinstance(n, Binary):
        l, r = n.left, n.right
        if n.op == "+":
            return _add(_d(l, v), _d(r, v))
        if n.op == "-":
            return _sub(_d(l, v), _d(r, v))
        if n.op == "*":
            return _add(_mul(_d(l, v), r), _mul(l, _d(r, v)))
        # quotient rule
        num = _sub(_mul(_d(l, v), r), _mul(l, _d(r, v)))
        return _div(num, _pow(r, 2))
    if isinstance(n, Pow):
        return _mul(_mul(Const(float(n.exponent)), _pow(n.base, n.exponent - 1)), _d(n.base, v))
    if isinstance(n, Neg):
        return _neg(_d(n.arg, v))
    if isinstance(n, Call):
        inner = _d(n.arg, v)
        if n.func == "sin":
            return _mul(_call("cos", n.arg), inner)
        if n.func == "cos":
            return _neg(_mul(_call("sin", n.arg), inner))
        return _mul(n, inner)
    raise TypeError(f"unexpected node {n!r}")  # pragma: no cover


def diff(f: ScalarField, v: int) -> ScalarField:
    """Exact partial derivative of ``f`` with respect to x_v."""
    if v not in (1, 2, 3, 4):
        raise ValueError(f"coordinate index must be 1..4, got {v}")
    return ScalarField(_d(f.ast, v))


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


class _Emitter:
    """Straight-line code generator; shared subtrees (by identity) are emitted once."""

    def __init__(self):
        self.lines: list[str] = []
        self.names: dict[int, str] = {}
        self.keep: list[Node] = []

    def emit(self, n: Node) -> str:
        key = id(n)
        if key in self.names:
            return self.names[key]
        if isinstance(n, Const):
            ref = repr(n.value)
        elif isinstance(n, Var):
            ref = f"x{n.index}"
        else:
            if isinstance(n, Binary):
                code = f"{self.emit(n.left)} {n.op} {self.emit(n.right)}"
            elif isinstance(n, Pow):
                code = f"{self.emit(n.base)} ** {n.exponent}"
            elif isinstance(n, Neg):
                code = f"-{self.emit(n.arg)}"
            else:
                code = f"_{n.func}({self.emit(n.arg)})"
            ref = f"t{len(self.lines)}"
            self.lines.append(f"    {ref} = {code}")
        self.names[key] = ref
        self.keep.append(n)
        return ref


_NAMESPACE = {"_sin": math.sin, "_cos": math.cos, "_exp": math.exp}


def compile_fields(fields: Sequence[ScalarField]) -> Callable[[float, float, float, float], tuple]:
    """Compile several fields into one function ``f(x1, x2, x3, x4) -> tuple``.

    Division by zero and overflow surface as :class:`DomainError`.
    """
    em = _Emitter()
    outs = [em.emit(f.ast) for f in fields]
    body = "\n".join(em.lines)
    src = f"def _f(x1, x2, x3, x4):\n{body}\n    return ({', '.join(outs)}{',' if len(outs) == 1 else ''})\n"
    ns = dict(_NAMESPACE)
    exec(compile(src, "<walkergeom.expr>", "exec"), ns)
    raw = ns["_f"]

    def run(x1, x2, x3, x4):
        try:
            return raw(x1, x2, x3, x4)
        except ZeroDivisionError as e:
            raise DomainError(f"division by zero at ({x1}, {x2}, {x3}, {x4})") from e
        except (OverflowError, ValueError) as e:
            raise DomainError(f"{e} at ({x1}, {x2}, {x3}, {x4})") from e

    return run


def evaluate(f: ScalarField, p: Sequence[float]) -> float:
    """IEEE double value of ``f`` at the point ``p``."""
    if len(p) != 4:
        raise ValueError(f"point must have 4 coordinates, got {len(p)}")
    x = [float(v) for v in p]
    if not all(math.isfinite(v) for v in x):
        raise ValueError(f"point has non-finite coordinates: {p!r}")
    fn = f._compiled.get("eval")
    if fn is None:
        fn = f._compiled.setdefault("eval", compile_fields([f]))
    return fn(*x)[0]
