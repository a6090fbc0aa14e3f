import math

import numpy as np
import pytest

from lipdyn.errors import DegenerateNeighborhood, NotAContraction, NotAFixedPoint
from lipdyn.lipschitz import (
    NeighborhoodSpec, Verdict, classify_fixed_point, classify_fixed_point_smooth,
    classify_fixed_point_vector, classify_periodic_orbit, contraction_fixed_point, cycle_multiplier,
    estimate_lipschitz,
)
from lipdyn.maps import affine, compose_k, linear_vector_map, logistic, piecewise_example, tent_ab
from lipdyn.orbit import refine_periodic_orbit

SINK, SOURCE, INC = Verdict.SINK, Verdict.SOURCE, Verdict.INCONCLUSIVE


@pytest.mark.parametrize("f, p, verdict", [
    (logistic(2.0), 0.5, SINK),
    (logistic(2.0), 0.0, SOURCE),
    (logistic(3.0), 0.0, SOURCE),
    (logistic(3.0), 2 / 3, INC),
    (piecewise_example(), 0.0, INC),
    (piecewise_example(), 1.0, INC),
    (tent_ab(-2, 1), -1.0, SOURCE),
    (tent_ab(-2, 1), 1 / 3, SOURCE),
])
def test_fixture_verdicts(f, p, verdict):
    assert classify_fixed_point(f, p).verdict is verdict


@pytest.mark.parametrize("f, p", [
    (logistic(2.0), 0.5), (logistic(2.0), 0.0), (logistic(3.0), 0.0), (logistic(3.0), 2 / 3),
    (logistic(2.7), 1 - 1 / 2.7), (logistic(0.5), 0.0), (tent_ab(-2, 1), 1 / 3),
    (tent_ab(0.5, 1), 2.0), (affine(0.3, 1), 1 / 0.7),
])
def test_agrees_with_smooth_oracle(f, p):
    oracle = classify_fixed_point_smooth(f, p)
    got = classify_fixed_point(f, p)
    if oracle.verdict is not INC:
        assert got.verdict is oracle.verdict
    else:
        assert got.verdict is INC


def test_piecewise_one_sided_evidence():
    f = piecewise_example()
    at0 = classify_fixed_point(f, 0.0).details
    assert at0["left_slope"] == pytest.approx(2, abs=1e-9)
    assert at0["right_slope"] < 1e-3
    at1 = classify_fixed_point(f, 1.0).details
    assert at1["left_slope"] == pytest.approx(2, abs=1e-3)
    assert at1["right_slope"] == pytest.approx(0.5, abs=1e-8)


def test_breakpoint_fixed_point_uses_pair_quotients():
    cls = classify_fixed_point(piecewise_example(), 0.0)
    assert cls.c_source == "c_hat" and cls.r_source == "r_hat"
    assert cls.details["at_breakpoint"]


def test_not_a_fixed_point():
    with pytest.raises(NotAFixedPoint):
        classify_fixed_point(logistic(2.0), 0.3)


def test_degenerate_radius():
    with pytest.raises(DegenerateNeighborhood):
        estimate_lipschitz(logistic(2.0), NeighborhoodSpec(0.5, radius=1e-15))


@pytest.mark.parametrize("c", [0.3, -0.7, 1.5, -2.25, 3.0])
def test_affine_exactness(c):
    f = affine(c, 0.25)
    est = estimate_lipschitz(f, NeighborhoodSpec(0.0, radius=0.5, rng_seed=3))
    assert abs(est.c_hat - abs(c)) <= 1e-12
    assert abs(est.r_hat - abs(c)) <= 1e-12


def test_monotone_refinement():
    f = logistic(3.7)
    prev = None
    for n in (250, 500, 1000, 2000, 4000):
        est = estimate_lipschitz(f, NeighborhoodSpec(0.4, radius=0.05, pair_samples=n, rng_seed=11))
        if prev is not None:
            assert est.c_hat >= prev.c_hat
            assert est.r_hat <= prev.r_hat
        prev = est


def test_estimates_are_deterministic():
    spec = NeighborhoodSpec(0.3, radius=0.1, rng_seed=5)
    assert estimate_lipschitz(logistic(3.3), spec) == estimate_lipschitz(logistic(3.3), spec)


def test_chain_rule_on_two_cycle():
    f = logistic(3.2)
    cyc = refine_periodic_orbit(f, 2, 0.51)
    g = compose_k(f, 2)
    mult = cycle_multiplier(f, cyc)
    assert abs(g.deriv(cyc[0]) - mult) <= 1e-10 * abs(mult)
    assert mult == pytest.approx(4 + 2 * 3.2 - 3.2**2, abs=1e-10)


def test_periodic_orbit_classification():
    f = logistic(3.2)
    cls = classify_periodic_orbit(f, refine_periodic_orbit(f, 2, 0.51))
    assert cls.verdict is SINK
    assert cls.details["oracle_verdict"] == "Sink"
    assert cls.details["period"] == 2


def test_repelling_two_cycle():
    f = logistic(3.9)
    s = math.sqrt(4.9 * 0.9)
    y = (4.9 - s) / 7.8
    cls = classify_periodic_orbit(f, [y, f(y)])
    assert abs(cls.details["multiplier"]) > 1
    assert cls.verdict is SOURCE


def test_banach():
    fp = contraction_fixed_point(affine(0.5, 1), 100.0)
    assert abs(fp.p - 2) <= 1e-12
    assert fp.iterations <= 60
    with pytest.raises(NotAContraction) as info:
        contraction_fixed_point(affine(2, 0), 1.0)
    assert info.value.iteration == 1


@pytest.mark.parametrize("diag, verdict", [
    ((0.5, 0.25), SINK), ((2.0, 3.0), SOURCE), ((0.5, 2.0), INC),
])
def test_vector_verdicts(diag, verdict):
    v = linear_vector_map(diag)
    spec = NeighborhoodSpec((0.0, 0.0), pair_samples=2000, rng_seed=42)
    a = classify_fixed_point_vector(v, np.zeros(2), spec)
    b = classify_fixed_point_vector(v, np.zeros(2), spec)
    assert a.verdict is verdict
    assert a == b
    lo, hi = min(map(abs, diag)), max(map(abs, diag))
    assert lo - 1e-12 <= a.evidence.r_hat and a.evidence.c_hat <= hi + 1e-12
