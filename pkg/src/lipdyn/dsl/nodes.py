"""Immutable expression tree for map bodies.

Nodes are frozen dataclasses, so ``==`` is structural equality and trees
can be shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

COMPARISONS = ("<", "<=", ">", ">=")


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: Expr


@dataclass(frozen=True)
class Abs:
    arg: Expr


@dataclass(frozen=True)
class Add:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow:
    base: Expr
    exponent: int

    def __post_init__(self):
        if not isinstance(self.exponent, int) or isinstance(self.exponent, bool) or self.exponent < 0:
            raise ValueError(f"Pow exponent must be a non-negative int, got {self.exponent!r}")


@dataclass(frozen=True)
class Guard:
    """``lhs op value``.

    Parsed guards always have a :class:`Var` on the left. Guards produced by
    differentiating ``abs(u)`` carry the expression ``u`` instead.
    """

    lhs: Expr
    op: str
    value: float

    def __post_init__(self):
        if self.op not in COMPARISONS:
            raise ValueError(f"unknown comparison {self.op!r}")

    def test(self, v: float) -> bool:
        if self.op == "<":
            return v < self.value
        if self.op == "<=":
            return v <= self.value
        if self.op == ">":
            return v > self.value
        return v >= self.value


@dataclass(frozen=True)
class Piecewise:
    branches: tuple[tuple[Guard, Expr], ...]
    otherwise: Expr

    def __post_init__(self):
        if len(self.branches) < 1:
            raise ValueError("Piecewise needs at least one guarded branch")


Expr = Union[Const, Var, Neg, Abs, Add, Sub, Mul, Div, Pow, Piecewise]
BINARY = (Add, Sub, Mul, Div)


def walk(expr):
    """Yield every node of *expr* (guards' left sides included), pre-order."""
    stack = [expr]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, (Neg, Abs)):
            stack.append(node.arg)
        elif isinstance(node, BINARY):
            stack.extend((node.right, node.left))
        elif isinstance(node, Pow):
            stack.append(node.base)
        elif isinstance(node, Piecewise):
            stack.append(node.otherwise)
            for guard, body in reversed(node.branches):
                stack.append(body)
                stack.append(guard.lhs)
