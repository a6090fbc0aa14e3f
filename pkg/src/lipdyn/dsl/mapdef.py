from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from lipdyn.dsl.calculus import differentiate, simplify
from lipdyn.dsl.evaluate import evaluate_array
from lipdyn.dsl.nodes import Abs, Piecewise, Var, walk

BREAKPOINT_TOL = 1e-12
# Coarse scan over a wide interval plus a fine scan where orbits of the
# example maps actually live.
DEFAULT_SCANS = (((-1e6, 1e6), 20001), ((-10.0, 10.0), 20001))


@dataclass(frozen=True)
class MapDefinition:
    name: str
    variable: str
    body: object
    derivative: object | None
    breakpoints: tuple[float, ...]

    @classmethod
    def build(cls, name, variable, body, scans=DEFAULT_SCANS):
        """Attach the simplified derivative and the candidate breakpoint set."""
        derivative = simplify(differentiate(body, variable))
        proto = cls(name, variable, body, derivative, ())
        points = []
        for interval, grid_n in scans:
            points.extend(nondifferentiable_points(proto, interval, grid_n))
        return cls(name, variable, body, derivative, dedupe_sorted(points))


def dedupe_sorted(values, tol: float = BREAKPOINT_TOL) -> tuple[float, ...]:
    out: list[float] = []
    for v in sorted(float(v) for v in values):
        if not out or v - out[-1] > tol:
            out.append(v)
    return tuple(out)


def _bisect_root(fn, lo: float, hi: float, flo: float, tol: float) -> float:
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = float(fn(np.array([mid]))[0])
        if fm == 0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sign_change_roots(fn, lo: float, hi: float, grid_n: int, tol: float = BREAKPOINT_TOL):
    """Roots of a vectorized *fn* on ``[lo, hi]``: exact grid zeros plus one
    bisected root per sign change between adjacent finite grid values."""
    xs = np.linspace(lo, hi, grid_n)
    ys = fn(xs)
    roots = [float(x) for x in xs[ys == 0]]
    usable = np.isfinite(ys) & (ys != 0)
    neg = ys < 0
    brackets = np.nonzero(usable[:-1] & usable[1:] & (neg[:-1] != neg[1:]))[0]
    for i in brackets:
        roots.append(_bisect_root(fn, float(xs[i]), float(xs[i + 1]), float(ys[i]), tol))
    return roots


def nondifferentiable_points(mapdef: MapDefinition, interval, grid_n: int) -> list[float]:
    """Candidate points where the map may fail to be differentiable.

    The union of guard boundaries lying in ``interval`` and the sign-change
    roots of every ``abs`` argument (grid scan, then bisection to 1e-12).
    Guards whose left side is an expression contribute that expression's roots.
    """
    lo, hi = map(float, interval)
    if not lo < hi:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")

    points = []
    for node in walk(mapdef.body):
        if isinstance(node, Piecewise):
            for guard, _ in node.branches:
                if isinstance(guard.lhs, Var):
                    if lo <= guard.value <= hi:
                        points.append(guard.value)
                else:
                    shifted = lambda xs, g=guard: evaluate_array(g.lhs, xs) - g.value  # noqa: E731
                    points.extend(sign_change_roots(shifted, lo, hi, grid_n))
        elif isinstance(node, Abs):
            arg = node.arg
            points.extend(sign_change_roots(lambda xs, a=arg: evaluate_array(a, xs), lo, hi, grid_n))
    return list(dedupe_sorted(points))
