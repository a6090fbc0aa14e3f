import math

import pytest

from lipdyn.errors import InsufficientSamples, NoBracket
from lipdyn.maps import affine, logistic, piecewise_example, tent_ab
from lipdyn.orbit import (
    cycle_residual, detect_periodicity, find_fixed_points, iterate, polish_fixed_point,
    refine_periodic_orbit,
)


def two_cycle(a):
    s = math.sqrt((a + 1) * (a - 3))
    return sorted([((a + 1) - s) / (2 * a), ((a + 1) + s) / (2 * a)])


def test_iterate_convention():
    orb = iterate(piecewise_example(), 0.5, 3)
    assert orb.samples == (0.25, 0.0625, 0.00390625)
    orb = iterate(affine(1.0, 1.0), 0.0, 3, burn_in=2)
    assert orb.samples == (3.0, 4.0, 5.0)
    assert orb.total_n == 3 and not orb.escaped


def test_iterate_escape():
    orb = iterate(affine(10.0, 0.0), 1.0, 100)
    assert orb.escaped
    assert orb.total_n == 13
    assert abs(orb.samples[-1]) > 1e12


def test_fixed_points():
    assert [c.p for c in find_fixed_points(logistic(3.0), (0, 1))] == pytest.approx([0, 2 / 3])
    assert [c.p for c in find_fixed_points(piecewise_example(), (-2, 3))] == [0.0, 1.0]
    ps = [c.p for c in find_fixed_points(tent_ab(-2, 1), (-2, 2))]
    assert ps == pytest.approx([-1, 1 / 3], abs=1e-10)


def test_fixed_point_residuals():
    for c in find_fixed_points(logistic(2.7), (-1, 1), tol=1e-12):
        assert c.residual <= 1e-12


def test_detect_two_cycle():
    f = logistic(3.2)
    det = detect_periodicity(iterate(f, 0.3, 2000, burn_in=1000), f=f)
    assert det.period == 2
    assert list(det.cycle) == pytest.approx(two_cycle(3.2), abs=1e-9)
    assert det.residual <= 1e-8


def test_detect_fixed_point_and_none():
    f = logistic(2.0)
    assert detect_periodicity(iterate(f, 0.3, 1000)).period == 1
    with pytest.warns(UserWarning):
        g = logistic(4.0)
    assert detect_periodicity(iterate(g, 0.3, 5000, burn_in=1000)) is None


def test_detect_needs_samples():
    with pytest.raises(InsufficientSamples):
        detect_periodicity(iterate(logistic(2.0), 0.3, 100), max_period=64)


def test_tent_float_collapse_is_detected():
    # every double is dyadic, so the tent orbit lands on the fixed point -1
    f = tent_ab(-2, 1)
    det = detect_periodicity(iterate(f, 0.2, 2000), f=f)
    assert det is not None and det.period == 1 and det.cycle == (-1.0,)


def test_refine_two_cycle():
    f = logistic(3.2)
    cyc = refine_periodic_orbit(f, 2, 0.51)
    assert sorted(cyc) == pytest.approx(two_cycle(3.2), abs=1e-11)
    assert cycle_residual(f, cyc) <= 1e-11


def test_refine_no_bracket():
    with pytest.raises(NoBracket):
        refine_periodic_orbit(logistic(2.0), 2, 0.3)


def test_polish():
    f = logistic(3.0)
    p = polish_fixed_point(f, 0.6666666667)
    assert abs(p - 2 / 3) <= 1e-15
    assert polish_fixed_point(f, 0.3) == 0.3
