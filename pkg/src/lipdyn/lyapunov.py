"""Lyapunov exponents and numbers along orbits of Lipschitz maps.

The exponent of the orbit ``x_1, x_2, ...`` is the limit of the running
mean of ``ln|f'(x_i)|`` and the Lyapunov number is ``exp`` of it. ``f'``
only exists off a measure-zero set; orbit points that come within ``eta``
of a known breakpoint are handled by a :class:`SkipPolicy`.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from lipdyn.errors import (
    BreakpointHit, BreakpointOnCycle, DerivativeUnavailable, NotAPeriodicOrbit, OrbitEscaped,
)
from lipdyn.maps import BREAKPOINT_ETA, ScalarMap
from lipdyn.orbit import (
    ESCAPE_RADIUS, MAX_PERIOD, PERIOD_TOL, PeriodDetection, cycle_residual,
    detect_periodicity, iterate,
)

DERIV_FLOOR = 1e-300
CONVERGENCE_RTOL = 1e-3
FD_STEP = math.sqrt(sys.float_info.epsilon)

CONVERGED = "converged"
NOT_CONVERGED = "not_converged"
DIVERGED = "diverged_minus_inf"
ESCAPED = "orbit_escaped"


@dataclass(frozen=True)
class SkipPolicy:
    """What to do with orbit points within ``eta`` of a breakpoint.

    ``skip`` drops the term (counted in ``skipped``), ``perturb`` evaluates
    ``f'`` at ``x + perturbation`` instead, ``fail`` raises BreakpointHit.
    """

    mode: str = "skip"
    eta: float = BREAKPOINT_ETA
    perturbation: float = 1e-9

    def __post_init__(self):
        if self.mode not in ("skip", "perturb", "fail"):
            raise ValueError(f"unknown skip mode {self.mode!r}")
        if not self.eta > 0:
            raise ValueError("eta must be positive")


@dataclass(frozen=True)
class LyapunovEstimate:
    h_n: float
    n_used: int
    skipped: int
    status: str
    partials: list = field(default_factory=list)

    @property
    def finite(self) -> bool:
        return math.isfinite(self.h_n)


class LyapunovNumber(NamedTuple):
    value: float
    flagged: bool


def central_difference(f: ScalarMap, x: float) -> float:
    h = FD_STEP * max(1.0, abs(x))
    return (f.eval(x + h) - f.eval(x - h)) / (2 * h)


def _converged(partials) -> bool:
    if len(partials) < 2:
        return False
    a, b = partials[-2], partials[-1]
    if not (math.isfinite(a) and math.isfinite(b)):
        return False
    return a == b or abs(b - a) < CONVERGENCE_RTOL * abs(b)


def lyapunov_exponent(f: ScalarMap, x1: float, n: int, burn_in: int = 0,
                      policy: SkipPolicy = SkipPolicy(),
                      escape_radius: float = ESCAPE_RADIUS) -> LyapunovEstimate:
    """Finite-``n`` exponent ``(1/n) * sum ln|f'(x_i)|`` after ``burn_in`` steps.

    Terms are taken at ``x_(B+1), ..., x_(B+n)`` where ``x_1 = x1``. Without
    an exact derivative, central differences are used and points near a
    breakpoint are always skipped.

    ``partials`` holds the running mean at the end of each window of
    ``n // 10`` terms (and at ``n``); the estimate is ``converged`` when the
    last two agree to 1e-3 relative. Any ``|f'(x_i)| < 1e-300``, including at
    a skipped point, makes the status ``diverged_minus_inf`` and
    ``h_n = -inf``: the derivative product has collapsed and dropping the
    term would hide that.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    exact = f.deriv is not None
    x = float(x1)
    for _ in range(burn_in):
        x = f.eval(x)
        if not abs(x) <= escape_radius:
            return LyapunovEstimate(math.nan, 0, 0, ESCAPED, [])

    window = max(1, n // 10)
    total = 0.0
    used = skipped = 0
    floor_hit = False
    escaped = False
    partials = []
    for i in range(n):
        if not abs(x) <= escape_radius:
            escaped = True
            break
        d = None
        if f.near_breakpoint(x, policy.eta):
            if not exact:
                skipped += 1
            elif policy.mode == "fail":
                raise BreakpointHit(f"orbit point {x!r} (term {i}) is within {policy.eta:g} "
                                    "of a breakpoint", i, x)
            elif policy.mode == "perturb":
                d = f.deriv(x + policy.perturbation)
            else:
                skipped += 1
                if abs(f.deriv(x)) < DERIV_FLOOR:
                    floor_hit = True
        else:
            d = f.deriv(x) if exact else central_difference(f, x)

        if d is not None:
            used += 1
            m = abs(d)
            if m < DERIV_FLOOR:
                floor_hit = True
            elif not floor_hit:
                total += math.log(m)
        x = f.eval(x)
        if (i + 1) % window == 0 or i + 1 == n:
            partials.append(total / used if used else math.nan)

    if floor_hit:
        return LyapunovEstimate(-math.inf, used, skipped, DIVERGED, partials)
    h = total / used if used else math.nan
    if escaped:
        return LyapunovEstimate(h, used, skipped, ESCAPED, partials)
    status = CONVERGED if _converged(partials) else NOT_CONVERGED
    return LyapunovEstimate(h, used, skipped, status, partials)


def lyapunov_number(estimate: LyapunovEstimate) -> LyapunovNumber:
    """``L = exp(h_n)``; a collapsed product gives ``(0.0, flagged=True)``."""
    if estimate.status == ESCAPED:
        raise OrbitEscaped("Lyapunov number is undefined for an escaped orbit")
    if estimate.status == DIVERGED:
        return LyapunovNumber(0.0, True)
    return LyapunovNumber(math.exp(estimate.h_n), False)


def periodic_orbit_exponent(f: ScalarMap, cycle, eta: float = BREAKPOINT_ETA) -> float:
    """Exponent of a k-cycle: ``(1/k) * sum ln|f'(y_i)|``, or ``-inf`` if some
    ``|f'(y_i)| < 1e-300``."""
    cycle = [float(y) for y in cycle]
    if not cycle:
        raise NotAPeriodicOrbit("empty cycle")
    if f.deriv is None:
        raise DerivativeUnavailable(f"{f.label} has no derivative")
    residual = cycle_residual(f, cycle)
    if not residual <= 1e-8:
        raise NotAPeriodicOrbit(f"cycle residual {residual:.3g} exceeds 1e-8")
    if any(f.near_breakpoint(y, eta) for y in cycle):
        raise BreakpointOnCycle("a cycle point lies within eta of a breakpoint")
    mags = [abs(f.deriv(y)) for y in cycle]
    if min(mags) < DERIV_FLOOR:
        return -math.inf
    return sum(math.log(m) for m in mags) / len(cycle)


@dataclass(frozen=True)
class ShadowingReport:
    h_orbit: float
    h_cycle: float
    gap: float
    orbit_status: str
    orbit_diverged: bool
    cycle_diverged: bool


def check_shadowing_consistency(f: ScalarMap, x1: float, cycle, n: int, burn_in: int = 0,
                                policy: SkipPolicy = SkipPolicy()) -> ShadowingReport:
    """Compare the orbit exponent of ``x1`` with the exponent of the cycle it
    approaches. Reports the gap only; no pass/fail judgement."""
    est = lyapunov_exponent(f, x1, n, burn_in, policy)
    h_cycle = periodic_orbit_exponent(f, cycle, policy.eta)
    if math.isfinite(est.h_n) and math.isfinite(h_cycle):
        gap = abs(est.h_n - h_cycle)
    else:
        gap = math.nan
    return ShadowingReport(est.h_n, h_cycle, gap, est.status,
                           est.status == DIVERGED, h_cycle == -math.inf)


@dataclass(frozen=True)
class ChaosReport:
    bounded: bool
    asymptotically_periodic: Optional[PeriodDetection]
    exponent: LyapunovEstimate
    chaotic: bool
    float_artifact: bool = False
    notes: tuple[str, ...] = ()


def _repelling(f: ScalarMap, cycle) -> Optional[bool]:
    if f.deriv is None or any(f.near_breakpoint(y) for y in cycle):
        return None
    mult = 1.0
    for y in cycle:
        mult *= f.deriv(y)
    return abs(mult) > 1


def classify_chaos(f: ScalarMap, x1: float, n: int, burn_in: int = 0,
                   max_period: int = MAX_PERIOD, policy: SkipPolicy = SkipPolicy(),
                   period_tol: float = PERIOD_TOL,
                   escape_radius: float = ESCAPE_RADIUS) -> ChaosReport:
    """Chaotic = bounded, not asymptotically periodic, and a converged
    positive exponent.

    A detected cycle that is repelling (``|multiplier| > 1``) cannot attract
    a true orbit; it shows up because the computed orbit was captured by
    rounding (e.g. tent maps on dyadic doubles). Such reports carry
    ``float_artifact=True``.
    """
    if n < 10 * max_period:
        raise ValueError(f"n must be >= 10 * max_period = {10 * max_period}")
    orbit = iterate(f, x1, n, burn_in, escape_radius)
    bounded = not orbit.escaped
    detection = None
    notes = []
    if bounded:
        window = min(10 * max_period, n - 2 * max_period)
        detection = detect_periodicity(orbit, max_period, period_tol, window, f)
    else:
        notes.append("orbit escaped")
    exponent = lyapunov_exponent(f, x1, n, burn_in, policy, escape_radius)

    artifact = False
    if detection is not None and _repelling(f, detection.cycle):
        artifact = True
        notes.append("orbit captured by a repelling cycle: floating-point collapse artifact")
    chaotic = (bounded and detection is None and exponent.status == CONVERGED
               and exponent.h_n > 0)
    return ChaosReport(bounded, detection, exponent, chaotic, artifact, tuple(notes))
