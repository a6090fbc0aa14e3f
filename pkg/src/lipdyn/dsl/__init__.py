"""A small language for defining scalar maps, e.g.::

    map f(x) = piecewise { x < 0 => 2*x; x < 1 => x^2; else => 0.5*x + 0.5 }
"""

from lipdyn.dsl.calculus import differentiate, simplify
from lipdyn.dsl.evaluate import evaluate, evaluate_array
from lipdyn.dsl.lexer import Token, tokenize
from lipdyn.dsl.mapdef import MapDefinition, nondifferentiable_points
from lipdyn.dsl.nodes import (
    Abs, Add, Const, Div, Expr, Guard, Mul, Neg, Piecewise, Pow, Sub, Var,
)
from lipdyn.dsl.parser import parse_expr, parse_map
from lipdyn.dsl.printer import pretty_print

__all__ = [
    "Abs", "Add", "Const", "Div", "Expr", "Guard", "MapDefinition", "Mul", "Neg",
    "Piecewise", "Pow", "Sub", "Token", "Var", "differentiate", "evaluate",
    "evaluate_array", "nondifferentiable_points", "parse_expr", "parse_map",
    "pretty_print", "simplify", "tokenize",
]
