import math

import numpy as np
import pytest
from hypothesis import given, settings

from lipdyn.dsl import (
    Add, Const, Mul, Pow, Var, differentiate, evaluate, nondifferentiable_points, parse_expr,
    parse_map, simplify,
)
from lipdyn.errors import EvalError

from conftest import MAPS
from strategies import exprs, smooth_exprs

X = Var("x")


def fd(expr, x):
    h = 1e-6 * max(1.0, abs(x))
    return (evaluate(expr, x + h) - evaluate(expr, x - h)) / (2 * h)


def test_power_rule():
    assert simplify(differentiate(Pow(X, 2), "x")) == Mul(Const(2.0), X)


def test_tent_derivative_values():
    d = parse_map("map f(x) = -2*abs(x) + 1").derivative
    assert evaluate(d, 0.5) == -2
    assert evaluate(d, -0.5) == 2


def test_logistic_derivative_is_3_minus_6x():
    d = parse_map("map f(x) = 3*x*(1 - x)").derivative
    for x in np.linspace(-3, 3, 61):
        assert evaluate(d, float(x)) == pytest.approx(3 - 6 * x, abs=1e-12)


def test_piecewise_derivative_keeps_guards():
    d = parse_map("map f(x) = piecewise { x < 0 => 2*x; x < 1 => x^2; else => 0.5*x + 0.5 }")
    assert [evaluate(d.derivative, v) for v in (-1.0, 0.25, 3.0)] == [2.0, 0.5, 0.5]


@pytest.mark.parametrize("name", ["piecewise.map", "tent.map", "logistic.map"])
def test_derivative_matches_central_difference(name):
    m = parse_map((MAPS / name).read_text(encoding="utf-8"))
    rng = np.random.default_rng(7)
    checked = 0
    while checked < 100:
        x = float(rng.uniform(-3, 3))
        if any(abs(x - b) <= 1e-3 for b in m.breakpoints):
            continue
        exact = evaluate(m.derivative, x)
        assert abs(exact - fd(m.body, x)) <= 1e-5 * max(1.0, abs(exact))
        checked += 1


@settings(max_examples=200, derandomize=True, deadline=None)
@given(smooth_exprs)
def test_derivative_of_random_polynomials(e):
    d = simplify(differentiate(e, "x"))
    for x in (-1.3, -0.2, 0.7, 1.9):
        exact = evaluate(d, x)
        assert abs(exact - fd(e, x)) <= 1e-5 * max(1.0, abs(exact), abs(evaluate(e, x)))


def test_simplify_examples():
    assert simplify(Add(Const(0.0), X)) == X
    assert simplify(Mul(Const(1.0), Mul(Const(3.0), X))) == Mul(Const(3.0), X)
    assert simplify(Pow(X, 0)) == Const(1.0)
    assert simplify(Mul(Const(0.0), X)) == Const(0.0)
    assert simplify(parse_expr("2 + 3 * 4")) == Const(14.0)


def _value(e, x):
    try:
        return evaluate(e, x)
    except (EvalError, OverflowError):
        return None


@settings(max_examples=300, derandomize=True, deadline=None)
@given(exprs)
def test_simplify_idempotent_and_exact(e):
    s = simplify(e)
    assert simplify(s) == s
    for x in (-2.5, -1.0, 0.0, 0.3, 1.0, 4.0):
        before = _value(e, x)
        if before is None or not math.isfinite(before):
            continue
        assert _value(s, x) == before


def test_nondifferentiable_points():
    pw = parse_map((MAPS / "piecewise.map").read_text(encoding="utf-8"))
    assert nondifferentiable_points(pw, (-2, 3), 1001) == [0.0, 1.0]
    tent = parse_map("map f(x) = -2*abs(x) + 1")
    assert nondifferentiable_points(tent, (-2, 2), 1001) == [0.0]
    logi = parse_map("map f(x) = 3*x*(1 - x)")
    assert nondifferentiable_points(logi, (0, 1), 1001) == []


def test_abs_root_off_grid():
    m = parse_map("map f(x) = abs(3*x - 1)")
    pts = nondifferentiable_points(m, (-2, 2), 10)
    assert len(pts) == 1 and abs(pts[0] - 1 / 3) <= 1e-12
    assert len(m.breakpoints) == 1 and abs(m.breakpoints[0] - 1 / 3) <= 1e-12


def test_division_by_zero():
    with pytest.raises(EvalError):
        evaluate(parse_expr("1 / (x - 1)"), 1.0)
