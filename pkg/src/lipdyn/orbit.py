"""Orbit iteration, fixed points and periodic-orbit detection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from lipdyn.errors import InsufficientSamples, NoBracket
from lipdyn.maps import ScalarMap, compose_k

ESCAPE_RADIUS = 1e12
FP_TOL = 1e-10
PERIOD_TOL = 1e-8
MAX_PERIOD = 64


@dataclass(frozen=True)
class Orbit:
    """An orbit segment of ``x1``.

    ``samples[i]`` is ``f^(burn_in + 1 + i)(x1)``: burn-in iterates are
    discarded and the initial value itself is not repeated in ``samples``.
    """

    x1: float
    burn_in: int
    samples: tuple[float, ...]
    total_n: int
    escaped: bool

    def as_array(self) -> np.ndarray:
        return np.asarray(self.samples, dtype=float)


@dataclass(frozen=True)
class FixedPointCandidate:
    p: float
    residual: float
    bracket: tuple[float, float]
    iterations: int = 0


@dataclass(frozen=True)
class PeriodDetection:
    period: int
    cycle: tuple[float, ...]
    residual: float
    tail_error: float


def iterate(f: ScalarMap, x0: float, n: int, burn_in: int = 0,
            escape_radius: float = ESCAPE_RADIUS) -> Orbit:
    """Apply *f* ``burn_in + n`` times starting from ``x0``.

    Stops early with ``escaped=True`` once an iterate leaves
    ``[-escape_radius, escape_radius]`` (or becomes non-finite); the
    escaping value is the last sample kept.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if escape_radius <= 0:
        raise ValueError("escape_radius must be positive")
    x = float(x0)
    samples = []
    escaped = False
    for i in range(burn_in + n):
        x = f.eval(x)
        if i >= burn_in:
            samples.append(x)
        if not abs(x) <= escape_radius:
            escaped = True
            break
    return Orbit(float(x0), burn_in, tuple(samples), len(samples), escaped)


def _bisect(g, lo, hi, glo, tol, max_iter=200):
    """Bisect a sign change of g on [lo, hi] until |g| <= tol or the bracket
    can no longer be split. Returns (x, g(x), lo, hi)."""
    best_x, best_g = (lo, glo)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        gm = g(mid)
        if abs(gm) < abs(best_g):
            best_x, best_g = mid, gm
        if abs(gm) <= tol:
            return mid, gm, lo, hi
        if (gm < 0) == (glo < 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return best_x, best_g, lo, hi


def find_fixed_points(f: ScalarMap, interval, grid_n: int = 1000,
                      tol: float = FP_TOL) -> list[FixedPointCandidate]:
    """Locate solutions of ``f(p) = p`` on ``interval``.

    ``g(x) = f(x) - x`` is scanned on a uniform grid; exact zeros are kept
    and each sign change is bisected down to ``|g| <= tol``. Breakpoints of
    *f* inside the interval are probed directly, since ``g`` may touch zero
    there without changing sign (or jump across zero without a root).
    """
    lo, hi = map(float, interval)
    if not lo < hi:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")

    def g(x):
        return f.eval(x) - x

    xs = np.linspace(lo, hi, grid_n)
    gs = [g(float(x)) for x in xs]
    found = []
    for x, gx in zip(xs, gs):
        if abs(gx) <= tol:
            found.append(FixedPointCandidate(float(x), abs(gx), (float(x), float(x))))
    for i in range(grid_n - 1):
        a, b = gs[i], gs[i + 1]
        if not (math.isfinite(a) and math.isfinite(b)) or abs(a) <= tol or abs(b) <= tol:
            continue
        if (a < 0) != (b < 0):
            x, gx, blo, bhi = _bisect(g, float(xs[i]), float(xs[i + 1]), a, tol)
            if abs(gx) <= tol:
                found.append(FixedPointCandidate(x, abs(gx), (blo, bhi)))
    for bp in f.breakpoints:
        if lo <= bp <= hi:
            gb = g(bp)
            if abs(gb) <= tol:
                found.append(FixedPointCandidate(bp, abs(gb), (bp, bp)))

    # one candidate per root: keep the smallest residual within each cluster
    found.sort(key=lambda c: c.p)
    merged: list[FixedPointCandidate] = []
    for c in found:
        if merged and c.p - merged[-1].p <= 1e-8:
            if c.residual < merged[-1].residual:
                merged[-1] = c
        else:
            merged.append(c)
    return merged


def polish_fixed_point(f: ScalarMap, p: float, half_width: float = 1e-6) -> float:
    """Bisect ``f(x) - x`` on ``p +- half_width`` when it changes sign there.

    Points typed with ten digits are close to, but not at, the fixed point;
    polishing keeps derivative-based checks at ``p`` meaningful. Returns
    ``p`` unchanged when there is no sign change.
    """
    p = float(p)

    def g(x):
        return f.eval(x) - x

    gp = g(p)
    if gp == 0:
        return p
    for a, b in ((p - half_width, p), (p, p + half_width)):
        ga, gb = g(a), g(b)
        if (ga < 0) != (gb < 0) and ga != 0 and gb != 0:
            x, gx, _, _ = _bisect(g, a, b, ga, 0.0)
            return x if abs(gx) <= abs(gp) else p
    return p


def detect_periodicity(orbit: Orbit, max_period: int = MAX_PERIOD, tol: float = PERIOD_TOL,
                       window: Optional[int] = None,
                       f: Optional[ScalarMap] = None) -> Optional[PeriodDetection]:
    """Smallest ``k <= max_period`` with ``|x[n+k] - x[n]| <= tol`` on the tail.

    The test covers the last ``window`` (default ``10 * max_period``)
    starting indices. The returned cycle is the last ``k`` samples rotated to
    start at their minimum. With *f* given, ``residual`` is
    ``max |f(y_i) - y_(i+1 mod k)|``; without it, the closing gap of the last
    observed period is used instead.
    """
    if window is None:
        window = 10 * max_period
    xs = orbit.as_array()
    if len(xs) < 2 * max_period + window:
        raise InsufficientSamples(
            f"need at least {2 * max_period + window} samples, orbit has {len(xs)}")
    if not np.all(np.isfinite(xs)):
        return None
    m = len(xs)
    for k in range(1, max_period + 1):
        start = m - k - window
        diffs = np.abs(xs[start + k:] - xs[start:m - k])
        tail_error = float(diffs.max())
        if tail_error <= tol:
            last = xs[m - k:]
            j = int(np.argmin(last))
            cycle = tuple(float(v) for v in np.roll(last, -j))
            if f is not None:
                residual = max(abs(f.eval(cycle[i]) - cycle[(i + 1) % k]) for i in range(k))
            else:
                residual = float(np.max(np.abs(xs[m - k:] - xs[m - 2 * k:m - k])))
            return PeriodDetection(k, cycle, float(residual), tail_error)
    return None


def cycle_residual(f: ScalarMap, cycle) -> float:
    k = len(cycle)
    return max(abs(f.eval(cycle[i]) - cycle[(i + 1) % k]) for i in range(k))


def refine_periodic_orbit(f: ScalarMap, k: int, seed: float, tol: float = 1e-12,
                          max_half_width: float = 1e-2) -> list[float]:
    """Polish a period-``k`` point near ``seed`` and return its full cycle.

    Bisection on ``f^k(x) - x``: the bracket starts at ``seed +- 10*tol`` and
    doubles until the ends differ in sign, giving up past ``max_half_width``.
    The cycle is returned in orbit order starting at the refined point.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    fk = compose_k(f, k)

    def g(x):
        return fk.eval(x) - x

    def cycle_from(y):
        pts = [y]
        for _ in range(k - 1):
            pts.append(f.eval(pts[-1]))
        return pts

    seed = float(seed)
    g0 = g(seed)
    if abs(g0) <= tol:
        return cycle_from(seed)

    half = 10 * tol
    while True:
        half = min(half, max_half_width)
        lo, hi = seed - half, seed + half
        glo, ghi = g(lo), g(hi)
        for a, ga, b, gb in ((lo, glo, seed, g0), (seed, g0, hi, ghi)):
            if (ga < 0) != (gb < 0):
                y, gy, _, _ = _bisect(g, a, b, ga, tol)
                if abs(gy) > tol:
                    raise NoBracket(f"bisection stalled at |f^{k}(y) - y| = {abs(gy):.3g} > {tol:g}")
                return cycle_from(y)
        if half >= max_half_width:
            raise NoBracket(f"no sign change of f^{k}(x) - x within {max_half_width:g} of {seed!r}")
        half *= 2


__all__ = [
    "ESCAPE_RADIUS", "FP_TOL", "MAX_PERIOD", "PERIOD_TOL", "FixedPointCandidate", "Orbit",
    "PeriodDetection", "cycle_residual", "detect_periodicity",
    "find_fixed_points", "iterate", "polish_fixed_point", "refine_periodic_orbit",
]
