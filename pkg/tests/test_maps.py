import math

import numpy as np
import pytest

from lipdyn.dsl import parse_map
from lipdyn.errors import MissingParameter, UnknownFamily
from lipdyn.maps import (
    ParamFamily, affine, builtin, compose_k, from_dsl, linear_vector_map, lipschitz_bounds,
    logistic, piecewise_example, tent_ab,
)

from conftest import MAPS


def test_builtin_values():
    assert logistic(3.0)(0.5) == 0.75
    assert tent_ab(-2, 1)(0.0) == 1.0
    assert piecewise_example()(0.5) == 0.25
    assert piecewise_example()(1.0) == 1.0
    assert affine(0.5, 1)(2.0) == 2.0


def test_builtins_agree_with_map_files():
    pairs = [("piecewise.map", piecewise_example()), ("tent.map", tent_ab(-2, 1)),
             ("logistic.map", logistic(3.0))]
    for name, f in pairs:
        g = from_dsl(parse_map((MAPS / name).read_text(encoding="utf-8")))
        assert g.breakpoints == f.breakpoints
        for x in np.linspace(-2, 3, 101):
            x = float(x)
            assert g(x) == pytest.approx(f(x), abs=1e-15)
            if not f.near_breakpoint(x):
                assert g.deriv(x) == pytest.approx(f.deriv(x), abs=1e-12)


def test_logistic_domain_note():
    with pytest.warns(UserWarning):
        f = logistic(4.0)
    assert "outside 0 < a < 4" in f.notes
    assert logistic(3.2).notes == ()


def test_family_errors():
    with pytest.raises(UnknownFamily):
        builtin(ParamFamily("henon", {}))
    with pytest.raises(MissingParameter):
        builtin(ParamFamily("tent_ab", {"a": 2.0}))


def test_near_breakpoint():
    f = piecewise_example()
    assert f.near_breakpoint(1.0 + 5e-10)
    assert not f.near_breakpoint(0.5)
    assert not logistic(2.0).near_breakpoint(0.5)


def test_compose_chain_rule():
    f = logistic(3.2)
    g = compose_k(f, 3)
    x = 0.41
    assert g(x) == f(f(f(x)))
    expected = f.deriv(x) * f.deriv(f(x)) * f.deriv(f(f(x)))
    assert g.deriv(x) == pytest.approx(expected, rel=1e-15)


def test_compose_breakpoint_through_iterate():
    g = compose_k(tent_ab(-2, 1), 2)
    # tent(0.5) = 0, a breakpoint of the base map
    assert g.near_breakpoint(0.5)
    assert not g.near_breakpoint(0.2)


def test_compose_rejects_zero():
    with pytest.raises(ValueError):
        compose_k(logistic(2.0), 0)


def test_linear_vector_map():
    v = linear_vector_map([0.5, 2.0])
    assert np.array_equal(v([2.0, 3.0]), np.array([1.0, 6.0]))
    assert lipschitz_bounds(v) == (2.0, 0.5)
    assert v.norm([3.0, 4.0]) == 5.0
    assert math.isclose(v.norm(v([0.0, 1.0]) - v([0.0, 0.0])), 2.0)
