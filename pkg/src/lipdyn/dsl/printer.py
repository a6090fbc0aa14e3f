from __future__ import annotations

import math

from lipdyn.dsl.nodes import Abs, Add, Const, Div, Mul, Neg, Piecewise, Pow, Sub, Var

# binding strength; an operand is parenthesized when weaker than its slot
_PREC = {Piecewise: 0, Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}
_ATOM = 5
_SYMBOL = {Add: "+", Sub: "-", Mul: "*", Div: "/"}


def format_number(v: float) -> str:
    if not math.isfinite(v):
        raise ValueError(f"cannot print non-finite constant {v!r}")
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def _prec(e) -> int:
    if isinstance(e, Const):
        return _PREC[Neg] if e.value < 0 else _ATOM
    return _PREC.get(type(e), _ATOM)


def _p(e, need: int) -> str:
    text = _fmt(e)
    return f"({text})" if _prec(e) < need else text


def _fmt(e) -> str:
    if isinstance(e, Const):
        return format_number(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, (Add, Sub, Mul, Div)):
        prec = _PREC[type(e)]
        return f"{_p(e.left, prec)} {_SYMBOL[type(e)]} {_p(e.right, prec + 1)}"
    if isinstance(e, Neg):
        inner = _p(e.arg, _PREC[Neg])
        return f"- {inner}" if inner.startswith("-") else f"-{inner}"
    if isinstance(e, Pow):
        return f"{_p(e.base, _ATOM)}^{e.exponent}"
    if isinstance(e, Abs):
        return f"abs({_fmt(e.arg)})"
    if isinstance(e, Piecewise):
        parts = [
            f"{_fmt(g.lhs)} {g.op} {format_number(g.value)} => {_p(body, 1)}"
            for g, body in e.branches
        ]
        parts.append(f"else => {_p(e.otherwise, 1)}")
        return "piecewise { " + "; ".join(parts) + " }"
    raise TypeError(f"not an expression node: {e!r}")


def pretty_print(expr) -> str:
    """Render *expr* in the map language.

    For trees produced by the parser, ``parse_expr(pretty_print(e)) == e``.
    """
    return _fmt(expr)
