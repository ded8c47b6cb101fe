"""Scalar expression language used to define problems from text.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := '-' factor | power
    power  := atom ('^' factor)?
    atom   := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

``^`` is right-associative and binds tighter than unary minus, so ``-x^2``
is ``-(x^2)`` and ``2^3^2`` is ``2^9``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

import numpy as np

__all__ = [
    "Expression",
    "ExpressionError",
    "ExprSyntaxError",
    "UnknownIdentifierError",
    "ArityError",
    "MissingBindingError",
    "FUNCTIONS",
    "CONSTANTS",
    "parse",
    "evaluate",
    "to_source",
]

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
}
CONSTANTS = {"pi": math.pi, "e": math.e}

_BINARY = {
    "+": np.add,
    "-": np.subtract,
    "*": np.multiply,
    "/": np.divide,
    "^": np.power,
}


class ExpressionError(ValueError):
    pass


class ExprSyntaxError(ExpressionError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class UnknownIdentifierError(ExpressionError):
    def __init__(self, name: str, pos: int):
        super().__init__(f"unknown identifier {name!r} at position {pos}")
        self.name = name
        self.pos = pos


class ArityError(ExpressionError):
    def __init__(self, name: str, got: int, pos: int):
        super().__init__(f"{name}() takes exactly 1 argument ({got} given) at position {pos}")
        self.name = name
        self.pos = pos


class MissingBindingError(ExpressionError, KeyError):
    def __str__(self):
        return self.args[0]


# -- tree ---------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Var, Const, Neg, BinOp, Call]


@dataclass(frozen=True)
class Expression:
    """A parsed expression over a fixed set of variable names."""

    root: Node
    variables: frozenset
    source: str

    def __call__(self, **bindings):
        return evaluate(self, bindings)

    def __str__(self):
        return self.source


# -- tokenizer ----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


def _tokenize(source: str):
    pos = 0
    tokens = []
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {source[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str, allowed_vars: frozenset):
        self.tokens = _tokenize(source)
        self.i = 0
        self.allowed_vars = allowed_vars

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        kind, value, pos = self.tok
        if value != text or kind == "end":
            found = "end of input" if kind == "end" else repr(value)
            raise ExprSyntaxError(f"expected {text!r}, found {found}", pos)
        self.advance()

    def parse(self):
        node = self.expr()
        kind, value, pos = self.tok
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {value!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while self.tok[1] in ("+", "-") and self.tok[0] == "op":
            op = self.advance()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.tok[1] in ("*", "/") and self.tok[0] == "op":
            op = self.advance()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        if self.tok[0] == "op" and self.tok[1] == "-":
            self.advance()
            return Neg(self.factor())
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok[0] == "op" and self.tok[1] == "^":
            self.advance()
            # right operand is a factor: right-associative, allows 2^-1
            return BinOp("^", base, self.factor())
        return base

    def atom(self):
        kind, value, pos = self.advance()
        if kind == "number":
            return Num(float(value))
        if kind == "name":
            if self.tok[0] == "op" and self.tok[1] == "(":
                return self.call(value, pos)
            if value in self.allowed_vars:
                return Var(value)
            if value in CONSTANTS:
                return Const(value)
            if value in FUNCTIONS:
                raise ExprSyntaxError(f"function {value!r} used without arguments", pos)
            raise UnknownIdentifierError(value, pos)
        if kind == "op" and value == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "end":
            raise ExprSyntaxError("unexpected end of input", pos)
        raise ExprSyntaxError(f"unexpected {value!r}", pos)

    def call(self, name, pos):
        if name not in FUNCTIONS:
            if name in self.allowed_vars or name in CONSTANTS:
                raise ExprSyntaxError(f"{name!r} is not a function", pos)
            raise UnknownIdentifierError(name, pos)
        self.expect("(")
        args = []
        if not (self.tok[0] == "op" and self.tok[1] == ")"):
            args.append(self.expr())
            while self.tok[0] == "op" and self.tok[1] == ",":
                self.advance()
                args.append(self.expr())
        self.expect(")")
        if len(args) != 1:
            raise ArityError(name, len(args), pos)
        return Call(name, args[0])


def parse(source: str, allowed_vars: Iterable[str] = ()) -> Expression:
    """Parse ``source`` into an :class:`Expression`.

    Names in ``allowed_vars`` become variables; any other bare name must be
    one of the constants ``pi`` and ``e``.
    """
    if not isinstance(source, str) or not source.strip():
        raise ExprSyntaxError("empty expression", 0)
    allowed = frozenset(allowed_vars)
    clash = allowed & (set(FUNCTIONS) | set(CONSTANTS))
    if clash:
        raise ExpressionError(f"variable names collide with builtins: {sorted(clash)}")
    root = _Parser(source, allowed).parse()
    return Expression(root, allowed, source.strip())


# -- evaluation ---------------------------------------------------------------


def _eval(node, env):
    if isinstance(node, Num):
        return np.float64(node.value)
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Const):
        return np.float64(CONSTANTS[node.name])
    if isinstance(node, Neg):
        return np.negative(_eval(node.operand, env))
    if isinstance(node, BinOp):
        return _BINARY[node.op](_eval(node.left, env), _eval(node.right, env))
    if isinstance(node, Call):
        return FUNCTIONS[node.func](_eval(node.arg, env))
    raise TypeError(f"not an expression node: {node!r}")


def evaluate(e: Expression, bindings: Mapping[str, object]):
    """Evaluate ``e`` in double precision.

    Bindings may be floats or numpy arrays; arrays broadcast elementwise.
    Non-finite results (overflow, log of a negative, division by zero) are
    returned as-is. A scalar result comes back as a Python float.
    """
    missing = e.variables - set(bindings)
    if missing:
        raise MissingBindingError(f"missing binding for {', '.join(sorted(missing))}")
    env = {name: np.asarray(bindings[name], dtype=np.float64) for name in e.variables}
    with np.errstate(all="ignore"):
        out = _eval(e.root, env)
    if np.ndim(out) == 0:
        return float(out)
    return out


# -- printing -----------------------------------------------------------------


def _fmt_num(value: float) -> str:
    if math.isinf(value):
        return "1e999"
    return repr(value)


def _to_source(node) -> str:
    if isinstance(node, Num):
        return _fmt_num(node.value)
    if isinstance(node, (Var, Const)):
        return node.name
    if isinstance(node, Neg):
        return f"(-{_to_source(node.operand)})"
    if isinstance(node, BinOp):
        return f"({_to_source(node.left)} {node.op} {_to_source(node.right)})"
    if isinstance(node, Call):
        return f"{node.func}({_to_source(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


def to_source(e: Expression) -> str:
    """Fully parenthesized text that parses back to the same tree."""
    return _to_source(e.root)
