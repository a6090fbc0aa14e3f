import math

import pytest

from lipdyn.errors import BreakpointHit, BreakpointOnCycle, OrbitEscaped
from lipdyn.lyapunov import (
    DIVERGED, ESCAPED, SkipPolicy, check_shadowing_consistency, classify_chaos,
    lyapunov_exponent, lyapunov_number, periodic_orbit_exponent,
)
from lipdyn.maps import ScalarMap, affine, logistic, piecewise_example, tent_ab
from lipdyn.orbit import refine_periodic_orbit

LN2 = math.log(2)


def brute_force_exponent(a, x, n, burn):
    # independent oracle: plain loop over a*x*(1-x)
    for _ in range(burn):
        x = a * x * (1 - x)
    total = 0.0
    for _ in range(n):
        total += math.log(abs(a * (1 - 2 * x)))
        x = a * x * (1 - x)
    return total / n


def test_affine_exponent_is_log_slope():
    est = lyapunov_exponent(affine(0.5, 1), 0.3, 1000)
    assert est.h_n == pytest.approx(math.log(0.5), rel=1e-12)
    assert est.status == "converged"
    assert lyapunov_number(est).value == pytest.approx(0.5)


def test_tent_exponent():
    est = lyapunov_exponent(tent_ab(-2, 1), 0.2, 10_000)
    assert abs(est.h_n - LN2) <= 1e-6


def test_matches_brute_force(quiet):
    est = lyapunov_exponent(logistic(4.0), 0.3, 20_000, burn_in=100)
    assert est.h_n == pytest.approx(brute_force_exponent(4.0, 0.3, 20_000, 100), abs=1e-12)


def test_piecewise_collapses_to_minus_inf():
    est = lyapunov_exponent(piecewise_example(), 0.5, 1000)
    assert est.status == DIVERGED and est.h_n == -math.inf
    assert lyapunov_number(est) == (0.0, True)


def test_skip_policies():
    f = tent_ab(-2, 1)
    # tent(0.5) = 0 is the kink
    skip = lyapunov_exponent(f, 0.5, 10)
    assert skip.skipped == 1 and skip.n_used == 9
    pert = lyapunov_exponent(f, 0.5, 10, policy=SkipPolicy("perturb"))
    assert pert.skipped == 0 and pert.h_n == pytest.approx(LN2)
    with pytest.raises(BreakpointHit):
        lyapunov_exponent(f, 0.5, 10, policy=SkipPolicy("fail"))


def test_escape():
    est = lyapunov_exponent(affine(3, 0), 1.0, 1000)
    assert est.status == ESCAPED
    with pytest.raises(OrbitEscaped):
        lyapunov_number(est)


def test_finite_difference_fallback():
    f = logistic(2.5)
    no_deriv = ScalarMap(eval=f.eval)
    a = lyapunov_exponent(f, 0.3, 2000).h_n
    b = lyapunov_exponent(no_deriv, 0.3, 2000).h_n
    assert a == pytest.approx(b, abs=1e-6)


def test_periodic_orbit_exponent_closed_form():
    a = 3.2
    cyc = refine_periodic_orbit(logistic(a), 2, 0.51)
    h = periodic_orbit_exponent(logistic(a), cyc)
    assert abs(h - 0.5 * math.log(4 + 2 * a - a * a)) <= 1e-6
    assert abs(h - (-0.916291)) <= 1e-6


def test_periodic_exponent_rejects_breakpoint_cycle():
    with pytest.raises(BreakpointOnCycle):
        periodic_orbit_exponent(piecewise_example(), [0.0])


def test_shadowing_superstable():
    f = logistic(2.0)
    rep = check_shadowing_consistency(f, 0.3, [0.5], 10_000)
    assert rep.cycle_diverged and rep.h_cycle == -math.inf
    # in doubles the orbit parks next to 0.5, where |f'| is about 2e-16
    assert rep.h_orbit < -30
    assert math.isnan(rep.gap)


def test_chaos_reports(quiet):
    chaos = classify_chaos(logistic(4.0), 0.3, 100_000, burn_in=1000)
    assert chaos.chaotic and chaos.asymptotically_periodic is None
    periodic = classify_chaos(logistic(3.2), 0.3, 100_000, burn_in=1000)
    assert not periodic.chaotic and periodic.asymptotically_periodic.period == 2
    assert not periodic.float_artifact
    tent = classify_chaos(tent_ab(-2, 1), 0.2, 10_000)
    assert tent.float_artifact and not tent.chaotic
    assert abs(tent.exponent.h_n - LN2) <= 1e-6


def test_chaos_needs_enough_iterates():
    with pytest.raises(ValueError):
        classify_chaos(logistic(3.2), 0.3, 100)
