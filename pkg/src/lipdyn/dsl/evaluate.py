from __future__ import annotations

import math

import numpy as np

from lipdyn.dsl.nodes import Abs, Add, Const, Div, Mul, Neg, Piecewise, Pow, Sub, Var
from lipdyn.errors import EvalError


def _int_power(base: float, n: int) -> float:
    try:
        return base**n
    except OverflowError:
        return -math.inf if (base < 0 and n % 2) else math.inf


def evaluate(expr, x: float) -> float:
    """Evaluate *expr* at ``x`` in IEEE double arithmetic.

    Every variable is bound to ``x`` (map bodies are single-variable; the
    parser rejects foreign names). A ``Piecewise`` takes the first branch
    whose guard holds and falls through to its else-branch otherwise.

    Raises:
        EvalError: on division by zero.
    """
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        return x
    if isinstance(expr, Add):
        return evaluate(expr.left, x) + evaluate(expr.right, x)
    if isinstance(expr, Sub):
        return evaluate(expr.left, x) - evaluate(expr.right, x)
    if isinstance(expr, Mul):
        return evaluate(expr.left, x) * evaluate(expr.right, x)
    if isinstance(expr, Div):
        num = evaluate(expr.left, x)
        den = evaluate(expr.right, x)
        if den == 0:
            raise EvalError(f"division by zero at x={x!r}")
        return num / den
    if isinstance(expr, Neg):
        return -evaluate(expr.arg, x)
    if isinstance(expr, Abs):
        return abs(evaluate(expr.arg, x))
    if isinstance(expr, Pow):
        return _int_power(evaluate(expr.base, x), expr.exponent)
    if isinstance(expr, Piecewise):
        for guard, body in expr.branches:
            if guard.test(evaluate(guard.lhs, x)):
                return evaluate(body, x)
        return evaluate(expr.otherwise, x)
    raise TypeError(f"not an expression node: {expr!r}")


_ARRAY_OPS = {Add: np.add, Sub: np.subtract, Mul: np.multiply, Div: np.divide}
_ARRAY_CMP = {"<": np.less, "<=": np.less_equal, ">": np.greater, ">=": np.greater_equal}


def evaluate_array(expr, xs: np.ndarray) -> np.ndarray:
    """Vectorized :func:`evaluate` for grid scans.

    Division by zero yields inf/nan instead of raising; callers scanning
    for sign changes skip non-finite values.
    """
    xs = np.asarray(xs, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return _eval_array(expr, xs)


def _eval_array(expr, xs):
    if isinstance(expr, Const):
        return np.full_like(xs, expr.value)
    if isinstance(expr, Var):
        return xs
    op = _ARRAY_OPS.get(type(expr))
    if op is not None:
        return op(_eval_array(expr.left, xs), _eval_array(expr.right, xs))
    if isinstance(expr, Neg):
        return -_eval_array(expr.arg, xs)
    if isinstance(expr, Abs):
        return np.abs(_eval_array(expr.arg, xs))
    if isinstance(expr, Pow):
        return np.power(_eval_array(expr.base, xs), float(expr.exponent))
    if isinstance(expr, Piecewise):
        conds = [_ARRAY_CMP[g.op](_eval_array(g.lhs, xs), g.value) for g, _ in expr.branches]
        values = [_eval_array(body, xs) for _, body in expr.branches]
        return np.select(conds, values, default=_eval_array(expr.otherwise, xs))
    raise TypeError(f"not an expression node: {expr!r}")
