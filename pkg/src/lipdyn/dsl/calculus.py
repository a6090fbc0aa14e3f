"""Symbolic differentiation and value-preserving simplification."""

from __future__ import annotations

from lipdyn.dsl.evaluate import _int_power
from lipdyn.dsl.nodes import (
    Abs, Add, Const, Div, Guard, Mul, Neg, Piecewise, Pow, Sub, Var,
)

ZERO = Const(0.0)
ONE = Const(1.0)


def differentiate(expr, var: str):
    """Return d(expr)/d(var) as an (unsimplified) expression tree.

    ``abs(u)`` differentiates to ``piecewise { u < 0 => -u'; else => u' }``,
    so the value at ``u == 0`` is the right-hand slope. That point is always
    listed among the map's breakpoints, so callers never rely on it.
    Piecewise bodies are differentiated branch by branch under the same guards.
    """
    d = lambda e: differentiate(e, var)  # noqa: E731

    if isinstance(expr, Const):
        return ZERO
    if isinstance(expr, Var):
        return ONE if expr.name == var else ZERO
    if isinstance(expr, Neg):
        return Neg(d(expr.arg))
    if isinstance(expr, Add):
        return Add(d(expr.left), d(expr.right))
    if isinstance(expr, Sub):
        return Sub(d(expr.left), d(expr.right))
    if isinstance(expr, Mul):
        u, v = expr.left, expr.right
        return Add(Mul(d(u), v), Mul(u, d(v)))
    if isinstance(expr, Div):
        u, v = expr.left, expr.right
        return Div(Sub(Mul(d(u), v), Mul(u, d(v))), Pow(v, 2))
    if isinstance(expr, Pow):
        if expr.exponent == 0:
            return ZERO
        n = expr.exponent
        return Mul(Mul(Const(float(n)), Pow(expr.base, n - 1)), d(expr.base))
    if isinstance(expr, Abs):
        du = d(expr.arg)
        return Piecewise(((Guard(expr.arg, "<", 0.0), Neg(du)),), du)
    if isinstance(expr, Piecewise):
        return Piecewise(
            tuple((guard, d(body)) for guard, body in expr.branches),
            d(expr.otherwise),
        )
    raise TypeError(f"not an expression node: {expr!r}")


def _is_const(e, value=None) -> bool:
    return isinstance(e, Const) and (value is None or e.value == value)


def _step(expr):
    """One bottom-up rewrite pass. Every rule gives bit-identical values
    wherever the original evaluates to a finite number without error."""
    if isinstance(expr, (Const, Var)):
        return expr

    if isinstance(expr, Neg):
        a = _step(expr.arg)
        if _is_const(a):
            return Const(-a.value)
        if isinstance(a, Neg):
            return a.arg
        return Neg(a)

    if isinstance(expr, Abs):
        a = _step(expr.arg)
        return Const(abs(a.value)) if _is_const(a) else Abs(a)

    if isinstance(expr, Pow):
        b = _step(expr.base)
        if expr.exponent == 0:
            return ONE
        if expr.exponent == 1:
            return b
        if _is_const(b):
            return Const(_int_power(b.value, expr.exponent))
        return Pow(b, expr.exponent)

    if isinstance(expr, Piecewise):
        branches = tuple(
            (Guard(_step(g.lhs), g.op, g.value), _step(body)) for g, body in expr.branches
        )
        return Piecewise(branches, _step(expr.otherwise))

    left, right = _step(expr.left), _step(expr.right)
    if isinstance(expr, Add):
        if _is_const(left) and _is_const(right):
            return Const(left.value + right.value)
        if _is_const(right, 0):
            return left
        if _is_const(left, 0):
            return right
        if isinstance(right, Neg):
            return Sub(left, right.arg)
        return Add(left, right)
    if isinstance(expr, Sub):
        if _is_const(left) and _is_const(right):
            return Const(left.value - right.value)
        if _is_const(right, 0):
            return left
        if _is_const(left, 0):
            return Neg(right)
        if isinstance(right, Neg):
            return Add(left, right.arg)
        return Sub(left, right)
    if isinstance(expr, Mul):
        if _is_const(left) and _is_const(right):
            return Const(left.value * right.value)
        if _is_const(left, 0) or _is_const(right, 0):
            return ZERO
        if _is_const(right, 1):
            return left
        if _is_const(left, 1):
            return right
        if _is_const(left, -1):
            return Neg(right)
        if _is_const(right, -1):
            return Neg(left)
        return Mul(left, right)
    if isinstance(expr, Div):
        if _is_const(left) and _is_const(right) and right.value != 0:
            return Const(left.value / right.value)
        if _is_const(right, 1):
            return left
        return Div(left, right)
    raise TypeError(f"not an expression node: {expr!r}")


def simplify(expr):
    """Fold constants and drop identity elements until nothing changes.

    Rules: constant folding, ``x+0 -> x``, ``x*1 -> x``, ``0*x -> 0``,
    ``x^0 -> 1`` (also for ``x == 0``), ``x^1 -> x``, double negation,
    ``a + -b -> a - b``. No algebraic expansion or reordering is done, so
    the result evaluates to exactly the same double as the input.
    """
    while True:
        nxt = _step(expr)
        if nxt == expr:
            return nxt
        expr = nxt
